"""Paraproducts with bounded-oscillation symbols, and the experiment suites.

P(f, u) accumulates psi_t * [(psi_t * f)(phi_t * u)] over the scale band,
with phi the complementary function of psi.  Constant symbols and constant
inputs are annihilated exactly, and the size of P(f, u) is controlled by
bmo_norm(f) times the L^p size of u.  The same checks, run over seeded
corpora with explicit tolerances, are packaged as suites.
"""

import numpy as np

from tentspace import (
    CorpusSpec,
    ExperimentConfig,
    RandomSource,
    SampledFunction,
    ScaleGrid,
    SpatialGrid,
    bmo_norm,
    complementary,
    ell,
    generate_corpus,
    lp_norm,
    mexican_hat,
    pair_paraproduct,
    paraproduct,
    run_suite,
)

grid = SpatialGrid(1, 256)
scales = ScaleGrid(2 * grid.spacing, 0.25, 24)
psi = mexican_hat(1)
phi = complementary(psi)

space = ell(1, 3)
f = generate_corpus(CorpusSpec("bmo_step", 1), grid, space, RandomSource(1))[0]
u = generate_corpus(CorpusSpec("lp_random", 1), grid, ell(2, 1), RandomSource(2))[0]

res = paraproduct(f, u, psi, phi, scales)
print(f"P(f, u): truncated={res.truncated}, "
      f"largest scale slice {res.scale_norms.max():.4f}")
for p in (1.5, 2.0, 3.0):
    R = lp_norm(res.field, p) / (bmo_norm(f) * lp_norm(u, p))
    print(f"  p={p}: ||P||_p / (bmo(f) ||u||_p) = {R:.4f}")

# exact annihilation of constants on both slots
const_f = SampledFunction.constant(grid, space, [1.0, 1.0, 1.0])
const_u = SampledFunction.constant(grid, ell(2, 1), [1.0])
print(f"\n||P(const, u)||_2 = {lp_norm(paraproduct(const_f, u, psi, phi, scales).field, 2):.2e}")
print(f"||P(f, const)||_2 = {lp_norm(paraproduct(f, const_u, psi, phi, scales).field, 2):.2e}")

# the pairing agrees with pairing the assembled field
g = generate_corpus(CorpusSpec("bandlimited_random", 1), grid, ell("inf", 3),
                    RandomSource(3))[0]
val = pair_paraproduct(f, u, g, psi, phi, scales)
print(f"<P(f,u), g> = {val:.6f}")

# a full suite run: seeded corpus, explicit tolerances, pass/fail report
cfg = ExperimentConfig(suite="duality", N=256, K=24, cases=10, seed=4,
                       q_list=[1.0], rho=2.0)
report = run_suite(cfg)
print(f"\nsuite duality: passed={report.passed} "
      f"({report.wallclock:.2f}s, {len(report.cases)} cases)")
for a in report.assertions:
    print(f"  [{'PASS' if a.passed else 'FAIL'}] {a.name}: {a.detail}")
print(f"  LHS/RHS band: {report.bands['lhs_over_rhs']}")
