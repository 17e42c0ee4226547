"""Experiment suites: corpus generation, quantitative checks, reports.

Each suite turns one of the library's norm relations into a reproducible
desk-scale experiment over a seeded corpus: it computes both sides of the
relation case by case, logs the observed ratio bands, and asserts only
explicitly configured tolerances.  Constants the theory leaves implicit
are treated as empirical regression baselines, never as ground truth, and
reports say so.

All randomness flows from the config seed through named streams, so a
report is reproducible bit-for-bit on the exact paths and draw-for-draw on
the Monte Carlo ones.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field, replace

import numpy as np

from .calderon import (
    TestFunction,
    complementary,
    gauss_bump,
    make_test_function,
    nondegeneracy_margin,
    resolve,
)
from .decomp import good_lambda_table
from .field import (
    HalfSpaceField,
    SampledFunction,
    ScaleGrid,
    SpatialGrid,
    dyadic_radii,
)
from .functionals import a_fun, a_fun_cuts, bmo_norm, c_fun, maximal_fn, n_fun
from .paraproduct import lp_norm, paraproduct
from .space import BanachSpace, RandomSource, complex_gaussian_array, ell, norm, pair

__all__ = [
    "CorpusSpec",
    "ExperimentConfig",
    "Report",
    "generate_corpus",
    "generate_field_corpus",
    "run_suite",
    "SUITES",
    "REGRESSION_BASELINES",
]

# Desk-scale empirical ceilings (n=1, N=512, K=32 reference runs), used as
# regression baselines where the theory gives an unquantified constant.
# Measured reference maxima: paraproduct R 0.16, ball constant 0.08,
# maximal domination 1.0, charBMO spread 1.5; ceilings leave headroom for
# corpus/seed variation but still catch order-of-magnitude regressions.
REGRESSION_BASELINES = {
    "charBMO_band_max": 20.0,
    "paraproduct_R_max": 0.25,
    "carleson_ball_constant": 1.0,
    "maximal_domination_c": 2.0,
}

_FAMILIES = ("bmo_log", "bmo_step", "lacunary", "bandlimited_random", "lp_random")


def _as_exponent(p):
    if isinstance(p, str) and p.lower() in ("inf", "infinity"):
        return math.inf
    return float(p)


@dataclass(frozen=True)
class CorpusSpec:
    family: str
    count: int
    amplitude: float = 1.0
    mixing: str = "single_direction"  # or "independent" across coordinates
    band: int | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown corpus family {self.family!r}")
        if self.count < 0:
            raise ValueError("count must be nonnegative")
        if self.mixing not in ("single_direction", "independent"):
            raise ValueError(f"unknown mixing rule {self.mixing!r}")


def _scalar_profile(family: str, grid: SpatialGrid, gen, amplitude: float,
                    band: int | None) -> np.ndarray:
    N, L = grid.N, grid.L
    if family == "bmo_log":
        x0 = grid.spacing * gen.integers(0, N, size=grid.n)
        d = grid.point_distance(x0 if grid.n == 2 else float(x0[0]))
        floor = grid.spacing / 2.0
        return amplitude * np.log(L / np.maximum(d, floor))
    if family == "bmo_step":
        start = int(gen.integers(0, N))
        width = int(gen.integers(N // 8, N // 2 + 1))
        out = np.zeros(grid.shape)
        if grid.n == 1:
            idx = (start + np.arange(width)) % N
            out[idx] = amplitude
        else:
            idx = (start + np.arange(width)) % N
            out[np.ix_(idx, idx)] = amplitude
        return out
    if family == "lacunary":
        J = max(int(math.log2(N)) - 2, 1)
        x = grid.coords()
        coord = x if grid.n == 1 else x[..., 0]
        phases = gen.uniform(0.0, 2.0 * math.pi, size=J)
        out = np.zeros(grid.shape, dtype=complex)
        for j in range(J):
            out += np.exp(1j * (2.0 * math.pi * (2 ** j) * coord / L + phases[j]))
        return amplitude * out
    if family in ("bandlimited_random", "lp_random"):
        bw = band or max(N // 8, 1)
        coeff = np.zeros(grid.shape, dtype=complex)
        if grid.n == 1:
            idx = np.r_[1: bw + 1, N - bw: N]
            coeff[idx] = (gen.standard_normal(idx.size)
                          + 1j * gen.standard_normal(idx.size)) / math.sqrt(2)
        else:
            for i in range(-bw, bw + 1):
                for j in range(-bw, bw + 1):
                    if i == 0 and j == 0:
                        continue
                    coeff[i % N, j % N] = complex(
                        gen.standard_normal(), gen.standard_normal()
                    ) / math.sqrt(2)
        if family == "lp_random":
            coeff.flat[0] = complex(gen.standard_normal(), gen.standard_normal())
        vals = np.fft.ifftn(coeff, axes=tuple(range(grid.n))) * N ** (grid.n / 2)
        return amplitude * vals
    raise ValueError(family)


def generate_corpus(
    spec: CorpusSpec,
    grid: SpatialGrid,
    space: BanachSpace,
    rng: RandomSource,
) -> list[SampledFunction]:
    """Reproducible corpus of sampled functions, tagged streams per member."""
    out = []
    for i in range(spec.count):
        gen = rng.derive(10_000 + i).generator()
        if spec.mixing == "independent" and space.dim > 1:
            cols = [
                _scalar_profile(spec.family, grid, gen, spec.amplitude, spec.band)
                for _ in range(space.dim)
            ]
            vals = np.stack(cols, axis=-1).astype(complex)
        else:
            profile = _scalar_profile(spec.family, grid, gen, spec.amplitude, spec.band)
            xi = complex_gaussian_array(gen, space.dim)
            xi = xi / norm(space, xi)
            vals = profile[..., None] * xi
        out.append(SampledFunction(grid, space, vals))
    return out


def generate_field_corpus(
    grid: SpatialGrid,
    scales: ScaleGrid,
    space: BanachSpace,
    count: int,
    rng: RandomSource,
    band: int | None = None,
    localized: bool = False,
    scale_tilt: float = 0.0,
) -> list[HalfSpaceField]:
    """Random band-limited half-space fields, independent across scales.

    ``localized`` multiplies by a random Gaussian window in y and
    ``scale_tilt`` by (t/t_max)^tilt, concentrating mass spatially and at
    the top scales; both make distributional level sets nontrivial.
    """
    bw = band or max(grid.N // 8, 1)
    out = []
    for i in range(count):
        gen = rng.derive(20_000 + i).generator()
        coeff = np.zeros((scales.K,) + grid.shape + (space.dim,), dtype=complex)
        if grid.n == 1:
            idx = np.r_[0: bw + 1, grid.N - bw: grid.N]
            coeff[:, idx, :] = complex_gaussian_array(gen, (scales.K, idx.size, space.dim))
        else:
            idx = np.r_[0: bw + 1, grid.N - bw: grid.N]
            sub = complex_gaussian_array(gen, (scales.K, idx.size, idx.size, space.dim))
            coeff[np.ix_(np.arange(scales.K), idx, idx)] = sub
        vals = np.fft.ifftn(coeff, axes=tuple(range(1, 1 + grid.n)))
        vals *= grid.N ** (grid.n / 2)
        if localized:
            x0 = grid.spacing * gen.integers(0, grid.N, size=grid.n)
            width = float(gen.uniform(grid.L / 16, grid.L / 4))
            d = grid.point_distance(x0 if grid.n == 2 else float(x0[0]))
            window = np.exp(-((d / width) ** 2))
            vals = vals * window[None, ..., None]
        if scale_tilt:
            tilt = (scales.nodes() / scales.t_max) ** scale_tilt
            vals = vals * tilt.reshape((-1,) + (1,) * (grid.n + 1))
        out.append(HalfSpaceField(grid, scales, space, vals))
    return out


def generate_column_corpus(
    grid: SpatialGrid,
    scales: ScaleGrid,
    space: BanachSpace,
    count: int,
    rng: RandomSource,
    columns: int = 4,
) -> list[HalfSpaceField]:
    """Sparse vertical-column fields: near-extremal for the conical sweep.

    Each member concentrates mass on a few full scale columns, normalized
    so every column contributes O(1) to the cone integral; these are the
    fields whose super-level sets actually exercise distributional bounds
    (smooth fields satisfy them through the Carleson term alone).
    """
    t = scales.nodes()
    w = grid.cell_volume * scales.dlog * t ** (-grid.n)
    out = []
    for i in range(count):
        gen = rng.derive(30_000 + i).generator()
        vals = np.zeros((scales.K,) + grid.shape + (space.dim,), dtype=complex)
        xi = complex_gaussian_array(gen, space.dim)
        xi = xi / norm(space, xi)
        for _ in range(columns):
            pos = tuple(gen.integers(0, grid.N, size=grid.n))
            amp = float(gen.uniform(0.5, 1.5))
            phases = np.exp(2j * math.pi * gen.uniform(size=scales.K))
            col = amp * phases / np.sqrt(w * scales.K)
            sl = (slice(None),) + pos
            vals[sl] += col[:, None] * xi
        out.append(HalfSpaceField(grid, scales, space, vals))
    return out


@dataclass
class ExperimentConfig:
    suite: str = ""
    n: int = 1
    N: int = 512
    K: int = 32
    L: float = 1.0
    t_min: float | None = None  # default 2 dy
    t_max: float | None = None  # default L/4
    space_q: float | str | None = 2.0
    space_dim: int = 2
    psi: str = "mexican_hat"
    q_list: list = dc_field(default_factory=lambda: [1.0])
    p_list: list = dc_field(default_factory=lambda: [2.0])
    alpha_list: list = dc_field(default_factory=lambda: [1.0])
    alpha: float = 1.0
    beta: float | None = None
    rho: float = 2.0
    gamma_list: list = dc_field(default_factory=lambda: [1.0, 0.5, 0.25])
    lambda_points: int = 6
    corpus: list = dc_field(default_factory=list)  # list of CorpusSpec dicts
    cases: int = 20
    band: int | None = None
    columns: int = 1
    seed: int = 0
    trials: int = 512
    refine: bool = False
    refine_axis: str = "N"
    stability_factor: float = 2.0
    threads: int = 1
    out_dir: str | None = None
    tolerances: dict = dc_field(default_factory=dict)

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        known = {f for f in ExperimentConfig.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "p_list" in d:  # JSON has no inf literal; accept the string form
            d["p_list"] = [_as_exponent(p) for p in d["p_list"]]
        return ExperimentConfig(**d)

    def grid(self) -> SpatialGrid:
        return SpatialGrid(self.n, self.N, self.L)

    def scales(self) -> ScaleGrid:
        g = self.grid()
        t_min = self.t_min if self.t_min is not None else 2.0 * g.spacing
        t_max = self.t_max if self.t_max is not None else self.L / 4.0
        return ScaleGrid(t_min, t_max, self.K)

    def space(self) -> BanachSpace:
        return ell(self.space_q, self.space_dim)

    def psi_fn(self) -> TestFunction:
        return make_test_function(self.psi, self.n)

    def rng(self) -> RandomSource:
        return RandomSource(self.seed)

    def corpus_specs(self) -> list[CorpusSpec]:
        return [CorpusSpec(**c) for c in self.corpus]

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))


@dataclass
class Assertion:
    name: str
    passed: bool
    detail: str


@dataclass
class Report:
    suite: str
    config: dict
    cases: list
    bands: dict
    assertions: list
    wallclock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_json_obj(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "config": self.config,
            "bands": self.bands,
            "assertions": [asdict(a) for a in self.assertions],
            "cases": self.cases,
            "wallclock_s": self.wallclock,
        }

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_obj(), fh, indent=2, default=float)


def _parallel(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _config_echo(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["t_min_effective"] = cfg.scales().t_min
    d["t_max_effective"] = cfg.scales().t_max
    return d


def _spearman(a, b) -> float:
    ra = np.argsort(np.argsort(a)).astype(float)
    rb = np.argsort(np.argsort(b)).astype(float)
    ca = ra - ra.mean()
    cb = rb - rb.mean()
    denom = math.sqrt(float((ca * ca).sum() * (cb * cb).sum()))
    return float((ca * cb).sum() / denom) if denom > 0 else 0.0


def _band(values) -> dict:
    arr = np.asarray([v for v in values if math.isfinite(v)], dtype=float)
    if arr.size == 0:
        return {"min": math.nan, "max": math.nan, "spread": math.nan}
    lo, hi = float(arr.min()), float(arr.max())
    return {"min": lo, "max": hi, "spread": hi / lo if lo > 0 else math.inf}


def _default_bmo_corpus(count_each: int = 5) -> list[dict]:
    return [
        {"family": "bmo_log", "count": count_each},
        {"family": "bmo_step", "count": count_each},
        {"family": "lacunary", "count": count_each},
        {"family": "bandlimited_random", "count": count_each},
    ]


def suite_charBMO(cfg: ExperimentConfig) -> Report:
    """Ratio band of ||C_q(F)||_inf against the mean-oscillation norm.

    Checks exact translation invariance of the ratio, bounded drift under
    dyadic dilation, a bounded corpus band (regression baseline) and the
    monotone association between the two sides across the corpus.
    """
    t0 = time.time()
    grid, scales, space = cfg.grid(), cfg.scales(), cfg.space()
    psi = cfg.psi_fn()
    margin = nondegeneracy_margin(psi, 2 if cfg.n == 1 else 16,
                                  ScaleGrid(1e-2, 1e2, 128))
    if margin < 1e-8:
        raise ValueError(f"psi {psi.name!r} is degenerate (margin {margin:g})")
    specs = cfg.corpus_specs() or [CorpusSpec(**c) for c in _default_bmo_corpus()]
    corpus = []
    for j, spec in enumerate(specs):
        corpus.extend(generate_corpus(spec, grid, space, cfg.rng().derive(j)))

    zero_guard = cfg.tol("zero_guard", 1e-12)

    def one(fn):
        F = resolve(fn, psi, scales)
        b = bmo_norm(fn)
        row = {"bmo": b, "cq_inf": {}}
        for q in cfg.q_list:
            prof = c_fun(F, q, cfg.alpha, trials=cfg.trials, rng=cfg.rng())
            row["cq_inf"][q] = prof.max()
        return row

    rows = _parallel(one, corpus, cfg.threads)
    cases, bands = [], {}
    assertions = []
    for q in cfg.q_list:
        ratios = []
        for i, row in enumerate(rows):
            if row["bmo"] <= zero_guard:
                continue
            ratios.append(row["cq_inf"][q] / row["bmo"])
        bands[f"ratio_q={q:g}"] = _band(ratios)
        band_max = cfg.tol("band_max", REGRESSION_BASELINES["charBMO_band_max"])
        spread = bands[f"ratio_q={q:g}"]["spread"]
        assertions.append(
            Assertion(
                f"band_spread_q={q:g}",
                bool(spread <= band_max),
                f"max/min = {spread:.3g} <= {band_max} (regression baseline)",
            )
        )
    cases = [
        {"bmo": row["bmo"], **{f"cq_inf_q={q:g}": row["cq_inf"][q] for q in cfg.q_list}}
        for row in rows
    ]

    # exact translation equivariance of the ratio on the first usable member
    pick = next((f for f, r in zip(corpus, rows) if r["bmo"] > zero_guard), None)
    if pick is not None:
        q0 = cfg.q_list[0]
        shift = grid.N // 3
        base_fn, moved = pick, pick.shifted(shift)
        r0 = c_fun(resolve(base_fn, psi, scales), q0, cfg.alpha, trials=cfg.trials,
                   rng=cfg.rng()).max() / bmo_norm(base_fn)
        r1 = c_fun(resolve(moved, psi, scales), q0, cfg.alpha, trials=cfg.trials,
                   rng=cfg.rng()).max() / bmo_norm(moved)
        tol = cfg.tol("translation_tol", 1e-10)
        assertions.append(
            Assertion(
                "translation_invariance",
                bool(abs(r1 - r0) <= tol * max(r0, 1.0)),
                f"|{r1:.12g} - {r0:.12g}| within {tol:g} relative",
            )
        )
        # dyadic dilation: f(2x) on the same grids
        lifted = SampledFunction(
            grid, space,
            base_fn.values[(2 * np.arange(grid.N)) % grid.N]
            if grid.n == 1
            else base_fn.values[np.ix_((2 * np.arange(grid.N)) % grid.N,
                                       (2 * np.arange(grid.N)) % grid.N)],
        )
        b2 = bmo_norm(lifted)
        if b2 > zero_guard:
            r2 = c_fun(resolve(lifted, psi, scales), q0, cfg.alpha,
                       trials=cfg.trials, rng=cfg.rng()).max() / b2
            drift = cfg.tol("dilation_drift", 0.10)
            assertions.append(
                Assertion(
                    "dilation_drift",
                    bool(abs(r2 / r0 - 1.0) <= drift),
                    f"ratio drift {abs(r2 / r0 - 1.0):.3g} <= {drift}",
                )
            )

    # contrapositive association: large BMO must come with large C_q
    q0 = cfg.q_list[0]
    bs = [r["bmo"] for r in rows if r["bmo"] > zero_guard]
    cs = [r["cq_inf"][q0] for r in rows if r["bmo"] > zero_guard]
    if len(bs) >= 8:
        corr = _spearman(np.array(bs), np.array(cs))
        need = cfg.tol("rank_corr_min", 0.9)
        assertions.append(
            Assertion("bmo_cq_rank_correlation", bool(corr >= need),
                      f"spearman {corr:.3f} >= {need}")
        )
    return Report("charBMO", _config_echo(cfg), cases, bands, assertions,
                  time.time() - t0)


def suite_AC(cfg: ExperimentConfig) -> Report:
    """Norm comparison of the conical functional and Carleson functionals.

    The direction ||C_q||_p <= C ||A||_p rides on the pointwise maximal
    domination (logged constant); the reverse direction and the aperture
    comparison are reported as bands.
    """
    t0 = time.time()
    grid, scales, space = cfg.grid(), cfg.scales(), cfg.space()
    fields = generate_field_corpus(grid, scales, space, cfg.cases, cfg.rng(),
                                   band=cfg.band)
    assertions, cases, bands = [], [], {}

    pairs = []
    for p in cfg.p_list:
        for q in cfg.q_list:
            if q >= p:
                assertions.append(
                    Assertion(
                        f"pair_rejected_q={q:g}_p={p:g}", True,
                        "part (b) requires q < p; pair excluded from the bound",
                    )
                )
            else:
                pairs.append((p, q))
    if not pairs:
        raise ValueError("no (p, q) pair with q < p; nothing to assert")

    def one(F):
        row = {}
        for alpha in cfg.alpha_list:
            prof = a_fun(F, alpha, trials=cfg.trials, rng=cfg.rng())
            row[("A", alpha)] = prof
        for p, q in pairs:
            for alpha in cfg.alpha_list:
                cq = c_fun(F, q, alpha, trials=cfg.trials, rng=cfg.rng())
                a_prof = row[("A", alpha)]
                mq = maximal_fn(
                    SampledFunction(grid, ell(2, 1),
                                    (a_prof.values ** q)[..., None].astype(complex))
                )
                row[("C", p, q, alpha)] = (
                    cq.lp_norm(p),
                    a_prof.lp_norm(p),
                    float(
                        ((mq.values ** (1.0 / q)) ** p).sum() * grid.cell_volume
                    ) ** (1.0 / p) if p != math.inf else float(
                        (mq.values ** (1.0 / q)).max()
                    ),
                )
        return row

    rows = _parallel(one, fields, cfg.threads)
    slack = cfg.tol("pointwise_slack", 1e-9)
    for p, q in pairs:
        for alpha in cfg.alpha_list:
            ratios_b, ratios_a, cpath = [], [], []
            ok = True
            for row in rows:
                cq_p, a_p, m_p = row[("C", p, q, alpha)]
                if a_p > 0:
                    ratios_b.append(cq_p / a_p)
                    cpath.append(m_p / a_p)
                if cq_p > 0:
                    ratios_a.append(a_p / cq_p)
                if cq_p > m_p * (1 + slack) + slack:
                    ok = False
            key = f"p={p:g}_q={q:g}_alpha={alpha:g}"
            bands[f"b_ratio_{key}"] = _band(ratios_b)
            bands[f"a_ratio_{key}"] = _band(ratios_a)
            bands[f"maximal_path_C_{key}"] = _band(cpath)
            assertions.append(
                Assertion(
                    f"cq_below_maximal_path_{key}", ok,
                    "||C_q||_p <= ||M(A^q)^(1/q)||_p per case (maximal path)",
                )
            )
    # aperture comparison against alpha = 1
    base = [row[("A", 1.0)].lp_norm(cfg.p_list[0]) for row in rows] \
        if 1.0 in cfg.alpha_list else None
    if base is not None:
        for alpha in cfg.alpha_list:
            if alpha == 1.0:
                continue
            r = [
                row[("A", alpha)].lp_norm(cfg.p_list[0]) / b
                for row, b in zip(rows, base) if b > 0
            ]
            bands[f"aperture_ratio_alpha={alpha:g}"] = _band(r)
    cases = []
    for row in rows:
        entry = {}
        for k, v in row.items():
            key = "_".join(str(x) for x in k)
            entry[key] = v.max() if k[0] == "A" else list(v)
        cases.append(entry)
    return Report("AC", _config_echo(cfg), cases, bands, assertions, time.time() - t0)


def suite_duality(cfg: ExperimentConfig) -> Report:
    """Tent-space duality with the stopping-time proof constant.

    Asserts, per corpus pair, that the dy dt/t integral of |<F, G>| stays
    below rho (1 - rho^-q)^-1 times sum_x C_q(F) A(G) dx, plus slack.
    """
    t0 = time.time()
    grid, scales, space = cfg.grid(), cfg.scales(), cfg.space()
    from .space import dual as dual_space

    fields = generate_field_corpus(grid, scales, space, cfg.cases, cfg.rng(),
                                   band=cfg.band)
    duals = generate_field_corpus(grid, scales, dual_space(space), cfg.cases,
                                  cfg.rng().derive(1), band=cfg.band)
    q = cfg.q_list[0]
    rho = cfg.rho
    constant = rho / (1.0 - rho ** (-q))
    slack = cfg.tol("constant_slack", 0.10)

    def one(pair_fg):
        F, G = pair_fg
        lhs = float(
            np.abs(pair(F.values, G.values)).sum()
            * grid.cell_volume * scales.dlog
        )
        cq = c_fun(F, q, cfg.alpha, trials=cfg.trials, rng=cfg.rng())
        ag = a_fun(G, cfg.alpha, trials=cfg.trials, rng=cfg.rng().derive(7))
        rhs = float((cq.values * ag.values).sum() * grid.cell_volume)
        return {"lhs": lhs, "rhs": rhs,
                "bound": constant * (1.0 + slack) * rhs,
                "ratio": lhs / rhs if rhs > 0 else math.inf}

    rows = _parallel(one, list(zip(fields, duals)), cfg.threads)
    ok = all(r["lhs"] <= r["bound"] + 1e-15 for r in rows)
    bands = {"lhs_over_rhs": _band([r["ratio"] for r in rows])}
    assertions = [
        Assertion(
            "duality_with_proof_constant", bool(ok),
            f"LHS <= {constant:.3g}*(1+{slack:g})*RHS on every case",
        )
    ]
    return Report("duality", _config_echo(cfg), rows, bands, assertions,
                  time.time() - t0)


def suite_carleson_embedding(cfg: ExperimentConfig) -> Report:
    """Carleson embedding: C_q of a multiplied field against N and C_q.

    Ratio band over the corpus plus the per-ball inequality with the
    enlarged ball, against an empirical constant ceiling.
    """
    t0 = time.time()
    grid, scales, space = cfg.grid(), cfg.scales(), cfg.space()
    alpha = cfg.alpha
    beta = cfg.beta if cfg.beta is not None else 2.0 * alpha
    q = cfg.q_list[0]
    p = cfg.p_list[0]
    if not (beta > alpha > 0):
        raise ValueError("need beta > alpha > 0")
    if not (0 < q < p):
        raise ValueError("need 0 < q < p")

    fields = generate_field_corpus(grid, scales, space, cfg.cases, cfg.rng(),
                                   band=cfg.band)
    gs = generate_field_corpus(grid, scales, ell(2, 1), cfg.cases,
                               cfg.rng().derive(3), band=cfg.band)

    radii = dyadic_radii(grid)

    def one(case):
        i, (F, G) = case
        GF = HalfSpaceField(grid, scales, space, G.values * F.values)
        # one truncation sweep backs both C_q(G*F) and the per-ball checks
        gf_cuts = a_fun_cuts(GF, alpha, list(radii), trials=cfg.trials,
                             rng=cfg.rng().derive(2 * i))
        c_gf = c_fun(GF, q, alpha, radii=radii, a_profiles=gf_cuts)
        c_f = c_fun(F, q, alpha, trials=cfg.trials, rng=cfg.rng().derive(2 * i + 1))
        n_g = n_fun(G, beta)
        num = c_gf.lp_norm(p)
        den = n_g.lp_norm(p) * c_f.max()
        return {
            "ratio": num / den if den > 0 else math.inf,
            "gf_cuts": gf_cuts,
            "cf_max": c_f.max(),
            "n_vals": n_g.values,
        }

    rows = _parallel(one, list(enumerate(zip(fields, gs))), cfg.threads)
    ratios = [r["ratio"] for r in rows]
    bands = {"embedding_ratio": _band(ratios)}
    assertions = [
        Assertion("embedding_ratio_finite",
                  bool(all(math.isfinite(r) for r in ratios)),
                  "ratio finite on every corpus case")
    ]

    # per-ball lemma with the enlarged ball, off the cached sweeps
    gen = np.random.default_rng(cfg.seed + 99)
    small_idx = np.nonzero(radii * (1.0 + alpha + beta) <= grid.L / 2.0)[0]
    ceiling = cfg.tol("ball_constant_max",
                      REGRESSION_BASELINES["carleson_ball_constant"])
    worst = 0.0
    checked = 0
    for _ in range(20):
        case = rows[int(gen.integers(0, len(rows)))]
        j = int(small_idx[gen.integers(0, small_idx.size)])
        r = float(radii[j])
        center = grid.spacing * gen.integers(0, grid.N, size=grid.n)
        center = center if grid.n == 2 else float(center[0])
        a_vals = case["gf_cuts"][j].values
        members = grid.point_distance(center) < r
        big = grid.point_distance(center) < (1.0 + alpha + beta) * r
        lhs = float((a_vals[members] ** q).sum() * grid.cell_volume)
        rhs = float((case["n_vals"][big] ** q).sum() * grid.cell_volume)
        rhs *= case["cf_max"] ** q
        if rhs > 0:
            worst = max(worst, lhs / rhs)
            checked += 1
    bands["ball_constant"] = {"max": worst, "checked": checked}
    assertions.append(
        Assertion(
            "per_ball_lemma", bool(worst <= ceiling),
            f"max ball ratio {worst:.3g} <= {ceiling} (empirical ceiling)",
        )
    )
    cases = [{"ratio": r["ratio"]} for r in rows]
    return Report("carleson_embedding", _config_echo(cfg), cases, bands,
                  assertions, time.time() - t0)


def suite_paraproduct(cfg: ExperimentConfig) -> Report:
    """Boundedness ratios of the paraproduct over a (symbol, function) corpus."""
    t0 = time.time()
    grid, scales, space = cfg.grid(), cfg.scales(), cfg.space()
    psi = cfg.psi_fn()
    phi = complementary(psi)
    specs = cfg.corpus_specs() or [
        CorpusSpec("bmo_step", cfg.cases // 2),
        CorpusSpec("bmo_log", cfg.cases - cfg.cases // 2),
    ]
    symbols = []
    for j, spec in enumerate(specs):
        symbols.extend(generate_corpus(spec, grid, space, cfg.rng().derive(j)))
    us = generate_corpus(CorpusSpec("lp_random", len(symbols)), grid, ell(2, 1),
                         cfg.rng().derive(50))

    zero_tol = cfg.tol("zero_tol", 1e-10)
    r_max = cfg.tol("R_max", REGRESSION_BASELINES["paraproduct_R_max"] * 1.5)

    def one(fu):
        f, u = fu
        res = paraproduct(f, u, psi, phi, scales)
        b = bmo_norm(f)
        row = {"bmo": b, "truncated": res.truncated}
        for p in cfg.p_list:
            denom = b * lp_norm(u, p)
            row[f"R_p={p:g}"] = lp_norm(res.field, p) / denom if denom > 0 else math.nan
        return row

    rows = _parallel(one, list(zip(symbols, us)), cfg.threads)
    bands = {}
    assertions = []
    for p in cfg.p_list:
        vals = [r[f"R_p={p:g}"] for r in rows if math.isfinite(r[f"R_p={p:g}"])]
        bands[f"R_p={p:g}"] = _band(vals)
        assertions.append(
            Assertion(
                f"R_bounded_p={p:g}",
                bool(max(vals) <= r_max),
                f"max R {max(vals):.3g} <= {r_max} (regression baseline x1.5)",
            )
        )

    # zero cases
    const_f = SampledFunction.constant(grid, space, [1.0] * space.dim)
    z1 = lp_norm(paraproduct(const_f, us[0], psi, phi, scales).field, 2)
    const_u = SampledFunction.constant(grid, ell(2, 1), [1.0])
    z2 = lp_norm(paraproduct(symbols[0], const_u, psi, phi, scales).field, 2)
    assertions.append(Assertion("zero_constant_symbol", bool(z1 < zero_tol),
                                f"||P(c, u)||_2 = {z1:.2e} < {zero_tol}"))
    assertions.append(Assertion("zero_constant_u", bool(z2 < zero_tol),
                                f"||P(f, c)||_2 = {z2:.2e} < {zero_tol}"))

    # pointwise maximal domination of the bump resolution
    bump = gauss_bump(cfg.n)
    cs = []
    ok = True
    for u in us[: min(len(us), 20)]:
        U = resolve(u, bump, scales)
        nprof = n_fun(HalfSpaceField(grid, scales, ell(2, 1), U.values), cfg.alpha)
        m = maximal_fn(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(m.values > 0, nprof.values / m.values, 0.0)
        c = float(ratio.max())
        cs.append(c)
        if not math.isfinite(c):
            ok = False
    c_max = cfg.tol("maximal_domination_c",
                    REGRESSION_BASELINES["maximal_domination_c"])
    bands["maximal_domination_c"] = _band(cs)
    assertions.append(
        Assertion("nontangential_below_maximal",
                  bool(ok and max(cs) <= c_max),
                  f"N(U) <= c M(u) with c = {max(cs):.3g} <= {c_max}")
    )
    return Report("paraproduct", _config_echo(cfg), rows, bands, assertions,
                  time.time() - t0)


def suite_good_lambda(cfg: ExperimentConfig) -> Report:
    """Distributional inequality table and gamma-scaling consistency."""
    t0 = time.time()
    grid, scales, space = cfg.grid(), cfg.scales(), cfg.space()
    q = cfg.q_list[0]
    # one-column fields: anything smoother satisfies the inequality through
    # the Carleson term alone and fits C = 0, which checks nothing
    fields = generate_column_corpus(grid, scales, space, cfg.cases, cfg.rng(),
                                    columns=cfg.columns)
    consistency = cfg.tol("gamma_consistency", 4.0)

    def one(F):
        amax = a_fun(F, cfg.alpha, trials=cfg.trials, rng=cfg.rng()).max()
        if amax == 0:
            return None
        # 2*lambda sweeps the range where {A > 2 lambda} is small but nonempty
        lambdas = np.geomspace(amax / 8.0, amax / 2.05, cfg.lambda_points)
        table = good_lambda_table(F, cfg.alpha, q, cfg.gamma_list, lambdas,
                                  beta=cfg.beta, trials=cfg.trials,
                                  rng=cfg.rng())
        return table

    tables = [t for t in _parallel(one, fields, cfg.threads) if t is not None]
    assertions = []
    all_ok = all(t.satisfied() for t in tables)
    assertions.append(
        Assertion("inequality_with_fitted_C", bool(all_ok),
                  "good-lambda inequality holds with the fitted C per field")
    )
    finite = all(math.isfinite(c) for t in tables for c in t.fitted.values())
    assertions.append(Assertion("fitted_C_finite", bool(finite),
                                "every fitted C is finite"))
    spreads = []
    for t in tables:
        pos = [c for c in t.fitted.values() if c > 0]
        if len(pos) >= 2:
            spreads.append(max(pos) / min(pos))
    if spreads:
        assertions.append(
            Assertion(
                "gamma_scaling_within_factor",
                bool(max(spreads) <= consistency),
                f"fitted C spread over gamma {max(spreads):.3g} <= {consistency} "
                f"({len(spreads)} fields with multi-gamma excess)",
            )
        )
    else:
        assertions.append(
            Assertion(
                "gamma_scaling_within_factor", True,
                "vacuous at this scale: no field activates the excess term "
                "at two gammas at once (Carleson term dominates)",
            )
        )
    positives = [c for t in tables for c in t.fitted.values() if c > 0]
    bands = {"fitted_C": _band([c for t in tables for c in t.fitted.values()]),
             "fitted_C_positive": _band(positives)}
    cases = [
        {"fitted": {f"{g:g}": c for g, c in t.fitted.items()},
         "wrap_warning": t.wrap_warning,
         "rows": t.rows}
        for t in tables
    ]
    return Report("good_lambda", _config_echo(cfg), cases, bands, assertions,
                  time.time() - t0)


SUITES = {
    "charBMO": suite_charBMO,
    "AC": suite_AC,
    "duality": suite_duality,
    "carleson_embedding": suite_carleson_embedding,
    "paraproduct": suite_paraproduct,
    "good_lambda": suite_good_lambda,
}


def run_suite(cfg: ExperimentConfig) -> Report:
    """Run a suite; with refine set, rerun at doubled resolution and
    assert each reported band moved by less than the stability factor."""
    if cfg.suite not in SUITES:
        raise ValueError(f"unknown suite {cfg.suite!r}; have {sorted(SUITES)}")
    fn = SUITES[cfg.suite]
    base = fn(replace(cfg, refine=False))
    if not cfg.refine:
        return base
    if cfg.refine_axis == "K":
        fine_cfg = replace(cfg, refine=False, K=2 * cfg.K)
    else:
        fine_cfg = replace(cfg, refine=False, N=2 * cfg.N)
    fine = fn(fine_cfg)
    factor = cfg.stability_factor
    for key, band in base.bands.items():
        other = fine.bands.get(key)
        if not other:
            continue
        pairs = [(band.get("max"), other.get("max"))]
        stable = True
        for a, b in pairs:
            if a and b and a > 0 and b > 0:
                r = max(a / b, b / a)
                if r > factor:
                    stable = False
        base.assertions.append(
            Assertion(f"refine_stable_{key}", stable,
                      f"band max moved by <= x{factor} under {cfg.refine_axis}-doubling")
        )
    base.bands["refined"] = fine.bands
    return base
