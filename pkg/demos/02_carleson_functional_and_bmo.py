"""The Carleson functionals C_q and the mean-oscillation norm.

C_q(F)(x) takes, over every ball containing x, the q-mean of the conical
square function truncated at the ball radius.  Its sup norm tracks the
mean-oscillation norm of the underlying function: bounded oscillation
means bounded Carleson energy at every q, with a ratio that is stable
under translation and dilation.
"""

import numpy as np

from tentspace import (
    CorpusSpec,
    RandomSource,
    SampledFunction,
    ScaleGrid,
    SpatialGrid,
    bmo_norm,
    c2_box_profile,
    c_fun,
    ell,
    generate_corpus,
    mexican_hat,
    resolve,
)

grid = SpatialGrid(1, 512)
scales = ScaleGrid(2 * grid.spacing, 0.25, 32)
psi = mexican_hat(1)

# the classical unbounded-but-BMO exemplar: a log singularity
f = generate_corpus(CorpusSpec("bmo_log", 1), grid, ell(2, 1), RandomSource(1))[0]
F = resolve(f, psi, scales)

b = bmo_norm(f)
print(f"bmo_norm(f) = {b:.4f}   sup|f| = {np.abs(f.values).max():.4f}")

print("\nC_q sup norms (nondecreasing in q):")
for q in (0.5, 1.0, 2.0, 4.0):
    cq = c_fun(F, q)
    print(f"  q={q}: ||C_q(F)||_inf = {cq.max():.4f}   ratio to BMO = {cq.max() / b:.3f}")

# translation leaves the ratio exactly invariant
shifted = f.shifted(171)
ratio = c_fun(resolve(f, psi, scales), 1.0).max() / bmo_norm(f)
ratio_shifted = c_fun(resolve(shifted, psi, scales), 1.0).max() / bmo_norm(shifted)
print(f"\ntranslation: ratio {ratio:.12f} -> {ratio_shifted:.12f}")

# the quadratic case cross-checks against the classical box functional
c2 = c_fun(F, 2.0)
box = c2_box_profile(F)
mask = box.values > 1e-12
band = (c2.values[mask] ** 2) / (box.values[mask] ** 2)
print(f"\nC_2^2 vs Carleson-box functional: ratio band "
      f"[{band.min():.3f}, {band.max():.3f}] (fixed-constant equivalence)")
