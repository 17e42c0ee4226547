"""Conical square function, Carleson functionals, maximal functions, BMO.

Everything here is a sweep over all grid points at once.  The key identity
is that restricting a field to the cone of base x and summing is a
circular windowed sum in x, one window per scale (radius alpha * t_k), so
a full profile costs K sliding windows instead of N region constructions.

Monte Carlo sweeps (non-Hilbert targets) draw one complex Gaussian per
half-space atom per trial, shared by every base point: the randomized cone
sum is then the same windowed sum applied to g * F, and paired comparisons
across x, alpha or truncation height ride on common random numbers.

Ball suprema (Carleson functional, maximal function, BMO) run over the
dyadic radius family L*2^-j with grid-point centers: a ball of the family
contains x exactly when its center lies in the same-radius window around
x, so the sup over balls containing x is a windowed max of windowed means.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from ._windows import (
    per_scale_window_sum,
    window_count,
    window_max,
    window_sum,
)
from .field import (
    HalfSpaceField,
    SampledFunction,
    ScaleGrid,
    SpatialGrid,
    dyadic_radii,
)
from .space import RandomSource, norm

__all__ = [
    "FunctionalProfile",
    "a_fun",
    "a_fun_cuts",
    "c_fun",
    "n_fun",
    "bmo_norm",
    "maximal_fn",
    "c2_box_profile",
]

SWEEP_TRIALS = 512  # default Monte Carlo trials for whole-grid sweeps


@dataclass
class FunctionalProfile:
    """Nonnegative profile of a functional over the spatial grid."""

    kind: str
    grid: SpatialGrid
    values: np.ndarray
    params: dict = dc_field(default_factory=dict)
    stderr: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError("profile shape must match the grid")
        if np.any(self.values < -1e-12):
            raise ValueError("profiles are nonnegative")

    def max(self) -> float:
        return float(self.values.max())

    def lp_norm(self, p) -> float:
        """L^p norm with dy^n cell weights; p=None means the sup norm."""
        if p is None or p == math.inf:
            return self.max()
        return float(
            ((self.values ** p).sum() * self.grid.cell_volume) ** (1.0 / p)
        )

    def to_sampled(self) -> SampledFunction:
        from .space import ell

        return SampledFunction(self.grid, ell(2, 1), self.values[..., None].astype(complex))

    def to_csv(self, path) -> None:
        coords = self.grid.coords()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            if self.grid.n == 1:
                w.writerow(["x", "value", "stderr"])
                for i in range(self.grid.N):
                    err = 0.0 if self.stderr is None else float(self.stderr[i])
                    w.writerow([coords[i], self.values[i], err])
            else:
                w.writerow(["x1", "x2", "value", "stderr"])
                for i in range(self.grid.N):
                    for j in range(self.grid.N):
                        err = 0.0 if self.stderr is None else float(self.stderr[i, j])
                        w.writerow([coords[i, j, 0], coords[i, j, 1],
                                    self.values[i, j], err])


def _scale_weights(grid: SpatialGrid, scales: ScaleGrid) -> np.ndarray:
    """Per-atom dmu weight at each scale: dy^n * dlog t * t^-n."""
    t = scales.nodes()
    return grid.cell_volume * scales.dlog * t ** (-grid.n)


def _cut_index(scales: ScaleGrid, h) -> int:
    """Number of scale nodes strictly below the truncation height."""
    if h is None or h == math.inf:
        return scales.K
    return int(np.searchsorted(scales.nodes(), h, side="left"))


def _effective_height(scales: ScaleGrid, h) -> float:
    return scales.t_max if h is None or h == math.inf else float(h)


def _a_squared_exact(field: HalfSpaceField, alpha: float,
                     cut_indices: np.ndarray) -> np.ndarray:
    """A^2 profiles at the given truncation indices, Hilbert path."""
    grid, scales = field.grid, field.scales
    w = _scale_weights(grid, scales)
    sq = (np.abs(field.values) ** 2).sum(axis=-1)
    rows = w.reshape((-1,) + (1,) * grid.n) * sq
    radii = alpha * scales.nodes()
    per_scale = per_scale_window_sum(grid, rows, radii)
    prefix = np.concatenate(
        [np.zeros((1,) + grid.shape), np.cumsum(per_scale, axis=0)], axis=0
    )
    return prefix[np.asarray(cut_indices, dtype=int)]


def _a_mc(field: HalfSpaceField, alpha: float, cut_indices: np.ndarray,
          trials: int, rng: RandomSource | None) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo A profiles (values, stderr) at each truncation index."""
    grid, scales = field.grid, field.scales
    K, d = scales.K, field.space.dim
    cuts = np.asarray(cut_indices, dtype=int)
    w = _scale_weights(grid, scales)
    weighted = np.sqrt(w).reshape((-1,) + (1,) * grid.n + (1,)) * field.values
    radii = alpha * scales.nodes()
    gen = (rng if rng is not None else RandomSource(0)).generator()

    # component axis ahead of space so windowed sums need no transposition
    weighted_t = np.moveaxis(weighted, -1, 1)[:, None]  # (K, 1, d, *spatial)
    acc1 = np.zeros((cuts.size,) + grid.shape)
    acc2 = np.zeros((cuts.size,) + grid.shape)
    chunk = max(1, min(trials, 4_000_000 // (max(K * grid.size * d, 1))))
    done = 0
    while done < trials:
        take = min(chunk, trials - done)
        re = gen.standard_normal((K, take, 1) + grid.shape)
        im = gen.standard_normal((K, take, 1) + grid.shape)
        g = (re + 1j * im) / math.sqrt(2.0)
        rows = g * weighted_t  # (K, take, d, *spatial)
        sums = per_scale_window_sum(grid, rows, radii)
        prefix = np.concatenate(
            [np.zeros((1,) + sums.shape[1:], dtype=complex), np.cumsum(sums, axis=0)],
            axis=0,
        )
        for c, m in enumerate(cuts):
            sq = (np.abs(prefix[m]) ** 2).sum(axis=1)  # (take, *spatial)
            acc1[c] += sq.sum(axis=0)
            acc2[c] += (sq * sq).sum(axis=0)
        done += take

    mean = acc1 / trials
    var = np.maximum(acc2 / trials - mean ** 2, 0.0) * trials / max(trials - 1, 1)
    values = np.sqrt(mean)
    stderr = np.zeros_like(values)
    pos = values > 0
    stderr[pos] = np.sqrt(var[pos] / trials) / (2.0 * values[pos])
    return values, stderr


def a_fun_cuts(
    field: HalfSpaceField,
    alpha: float,
    heights,
    trials: int = SWEEP_TRIALS,
    rng: RandomSource | None = None,
    force_mc: bool = False,
) -> list[FunctionalProfile]:
    """Truncated conical square functions at several heights in one sweep.

    Sharing one sweep keeps the truncations perfectly coupled: on the
    Monte Carlo path every height sees the same Gaussian draws, so height
    monotonicity and stopping-time logic behave like the exact path.
    """
    if alpha <= 0:
        raise ValueError("aperture must be positive")
    heights = list(heights)
    cuts = np.array([_cut_index(field.scales, h) for h in heights])
    if field.space.is_hilbert and not force_mc:
        vals = np.sqrt(_a_squared_exact(field, alpha, cuts))
        errs = [None] * len(heights)
    else:
        vals, errs_arr = _a_mc(field, alpha, cuts, trials, rng)
        errs = list(errs_arr)
    out = []
    for i, h in enumerate(heights):
        out.append(
            FunctionalProfile(
                "A",
                field.grid,
                vals[i],
                {
                    "alpha": alpha,
                    "h": _effective_height(field.scales, h),
                    "t_max": field.scales.t_max,
                },
                stderr=None if errs[i] is None else errs[i],
            )
        )
    return out


def a_fun(
    field: HalfSpaceField,
    alpha: float = 1.0,
    h=None,
    trials: int = SWEEP_TRIALS,
    rng: RandomSource | None = None,
    force_mc: bool = False,
) -> FunctionalProfile:
    """Conical square function A(F|h) at every grid point.

    ``h=None`` keeps all scales (the report records the effective height
    t_max); a finite h keeps scale nodes strictly below it.
    """
    return a_fun_cuts(field, alpha, [h], trials=trials, rng=rng, force_mc=force_mc)[0]


def c_fun(
    field: HalfSpaceField,
    q: float,
    alpha: float = 1.0,
    trials: int = SWEEP_TRIALS,
    rng: RandomSource | None = None,
    force_mc: bool = False,
    radii: np.ndarray | None = None,
    a_profiles: list | None = None,
) -> FunctionalProfile:
    """Carleson functional C_q: sup over balls containing x of q-means.

    For each dyadic radius r the truncated profile A(F|r) is averaged in
    q-th power over every ball of radius r, and the sup over balls
    containing x is the windowed max of those means.  Monte Carlo stderr
    is propagated through the q-mean by the delta method and through the
    sup conservatively (max of the window's stderr).

    ``a_profiles`` lets a caller reuse truncated A sweeps at exactly the
    dyadic radii instead of recomputing them.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    grid = field.grid
    if radii is None:
        radii = dyadic_radii(grid)
    if a_profiles is not None:
        if len(a_profiles) != len(radii):
            raise ValueError("a_profiles must match the radius list")
        profiles = a_profiles
    else:
        profiles = a_fun_cuts(field, alpha, list(radii), trials=trials,
                              rng=rng, force_mc=force_mc)
    best = np.zeros(grid.shape)
    best_err = np.zeros(grid.shape)
    mc = profiles[0].stderr is not None
    for r, prof in zip(radii, profiles):
        count = window_count(grid, r)
        mean_q = window_sum(grid, prof.values ** q, r) / count
        cand = window_max(grid, mean_q, r)
        if mc:
            a, s = prof.values, prof.stderr
            term = np.where(a > 0, q * a ** (q - 1.0) * s, 0.0)
            var_mean = window_sum(grid, term * term, r) / count ** 2
            err_mean = np.sqrt(var_mean)
            cand_err = window_max(grid, err_mean, r)
            best_err = np.where(cand > best, cand_err, best_err)
        best = np.maximum(best, cand)
    values = best ** (1.0 / q)
    stderr = None
    if mc:
        stderr = np.where(values > 0, best_err / q * best ** (1.0 / q - 1.0), 0.0)
    return FunctionalProfile(
        "Cq",
        grid,
        values,
        {"q": q, "alpha": alpha, "t_max": field.scales.t_max,
         "radii": [float(r) for r in radii]},
        stderr=stderr,
    )


def n_fun(field: HalfSpaceField, alpha: float = 1.0) -> FunctionalProfile:
    """Non-tangential maximal function of a scalar field: sup |G| on cones.

    For diagonal scalar multipliers the Gauss-bound of the range equals the
    sup of the moduli, so this profile is exact.
    """
    if field.space.dim != 1:
        raise ValueError("n_fun expects a scalar field (target dimension 1)")
    if alpha <= 0:
        raise ValueError("aperture must be positive")
    grid, scales = field.grid, field.scales
    mods = field.scalar_modulus()
    radii = alpha * scales.nodes()
    from ._windows import per_scale_window_max

    per_scale = per_scale_window_max(grid, mods, radii)
    return FunctionalProfile(
        "N", grid, per_scale.max(axis=0),
        {"alpha": alpha, "t_max": scales.t_max},
    )


def _scalar_values(g) -> tuple[SpatialGrid, np.ndarray]:
    if isinstance(g, SampledFunction):
        if g.space.dim != 1:
            raise ValueError("expected a scalar sampled function")
        return g.grid, np.abs(g.values[..., 0])
    raise TypeError("expected a SampledFunction")


def maximal_fn(g: SampledFunction) -> FunctionalProfile:
    """Hardy-Littlewood maximal function over the dyadic ball family."""
    grid, mods = _scalar_values(g)
    best = np.zeros(grid.shape)
    for r in dyadic_radii(grid):
        count = window_count(grid, r)
        means = window_sum(grid, mods, r) / count
        best = np.maximum(best, window_max(grid, means, r))
    return FunctionalProfile("M", grid, best, {"radii": "dyadic"})


def bmo_norm(f: SampledFunction) -> float:
    """Mean-oscillation norm: sup over dyadic balls of mean ||f - f_B||_X."""
    grid = f.grid
    vecs = np.moveaxis(f.values, -1, 0)  # (d, *spatial)
    worst = 0.0
    for r in dyadic_radii(grid):
        count = window_count(grid, r)
        mu = window_sum(grid, vecs, r) / count
        mu_pts = np.moveaxis(mu, 0, -1)
        acc = np.zeros(grid.shape)
        if grid.n == 1:
            offs = np.nonzero(grid.offset_distance() < r)[0]
            for o in offs:
                shifted = np.roll(f.values, -int(o), axis=0)
                acc += norm(f.space, shifted - mu_pts)
        else:
            oi, oj = np.nonzero(grid.offset_distance() < r)
            for a, b in zip(oi, oj):
                shifted = np.roll(f.values, (-int(a), -int(b)), axis=(0, 1))
                acc += norm(f.space, shifted - mu_pts)
        worst = max(worst, float(acc.max()) / count)
    return worst


def c2_box_profile(field: HalfSpaceField) -> FunctionalProfile:
    """Classical Carleson box functional for scalar fields.

    sup over dyadic balls containing x of (1/|B|) * the dy dt/t integral
    of |F|^2 over the cylinder B x (0, r(B)); the quadratic cross-check
    partner of c_fun(F, 2).
    """
    if field.space.dim != 1:
        raise ValueError("c2_box_profile expects a scalar field")
    grid, scales = field.grid, field.scales
    sq = np.abs(field.values[..., 0]) ** 2
    t = scales.nodes()
    best = np.zeros(grid.shape)
    for r in dyadic_radii(grid):
        m = _cut_index(scales, r)
        if m == 0:
            continue
        count = window_count(grid, r)
        inner = sq[:m].sum(axis=0) * scales.dlog
        means = window_sum(grid, inner, r) / count
        best = np.maximum(best, window_max(grid, means, r))
    return FunctionalProfile("C2box", grid, np.sqrt(best),
                             {"t_max": scales.t_max})
