"""Dyadic cubes, Whitney decomposition, stopping times, good-lambda data.

Open sets are unions of grid cells: cell i is the half-open box
[i*dy, (i+1)*dy)^n and its representative point is the cell center.  The
complement of an open set is sampled at the complement cell centers, and
all cube-to-set distances are torus distances to those points.  With that
convention the maximal-cube construction terminates after at most a few
levels below the grid (a boundary cell splits into sub-cells near the
complement) and the emitted cubes provably satisfy the distance sandwich
diam(Q) < d(Q, G^c) <= 4 diam(Q) while tiling the set exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from ._windows import per_scale_window_sum
from .field import HalfSpaceField, ScaleGrid, SpatialGrid
from .functionals import FunctionalProfile, a_fun, a_fun_cuts, c_fun
from .space import RandomSource

__all__ = [
    "DyadicCube",
    "WhitneyDecomposition",
    "whitney",
    "whitney_check",
    "StoppingProfile",
    "stopping_time",
    "fubini_defect",
    "GoodLambdaTable",
    "good_lambda_table",
    "set_measure",
]

_MAX_EXTRA_LEVELS = 8  # recursion floor below the grid level


@dataclass(frozen=True)
class DyadicCube:
    """Half-open dyadic cube: side L*2^-level, anchored at index*side."""

    level: int
    index: tuple

    def side(self, grid: SpatialGrid) -> float:
        return grid.L * 2.0 ** (-self.level)

    def diam(self, grid: SpatialGrid) -> float:
        return math.sqrt(grid.n) * self.side(grid)

    def anchor(self, grid: SpatialGrid) -> tuple:
        s = self.side(grid)
        return tuple(i * s for i in self.index)

    def children(self) -> list:
        if len(self.index) == 1:
            (i,) = self.index
            return [DyadicCube(self.level + 1, (2 * i + a,)) for a in (0, 1)]
        i, j = self.index
        return [
            DyadicCube(self.level + 1, (2 * i + a, 2 * j + b))
            for a in (0, 1)
            for b in (0, 1)
        ]


def _axis_point_to_interval(p: np.ndarray, a: float, s: float, L: float) -> np.ndarray:
    """Torus distance from coordinates p to the interval [a, a+s) mod L."""
    delta = (p - a) % L
    inside = delta <= s
    gap = np.minimum(delta - s, L - delta)
    return np.where(inside, 0.0, gap)


def _cube_distance(grid: SpatialGrid, cube: DyadicCube, pts: np.ndarray) -> np.ndarray:
    """Torus distances from a cube to an array of points."""
    s = cube.side(grid)
    anchor = cube.anchor(grid)
    if grid.n == 1:
        return _axis_point_to_interval(pts, anchor[0], s, grid.L)
    dx = _axis_point_to_interval(pts[:, 0], anchor[0], s, grid.L)
    dy = _axis_point_to_interval(pts[:, 1], anchor[1], s, grid.L)
    return np.hypot(dx, dy)


def _complement_centers(grid: SpatialGrid, cells: np.ndarray) -> np.ndarray:
    comp = ~cells
    if grid.n == 1:
        idx = np.nonzero(comp)[0]
        return (idx + 0.5) * grid.spacing
    ii, jj = np.nonzero(comp)
    return np.stack([(ii + 0.5), (jj + 0.5)], axis=-1) * grid.spacing


@dataclass
class WhitneyDecomposition:
    grid: SpatialGrid
    cells: np.ndarray  # source open set as a boolean cell mask
    cubes: list = dc_field(default_factory=list)

    @property
    def max_level(self) -> int:
        return max((c.level for c in self.cubes), default=0)


def _cells_in_cube(grid: SpatialGrid, cube: DyadicCube):
    """Grid-cell index ranges covered by (or covering) the cube."""
    j_max = int(round(math.log2(grid.N)))
    if cube.level <= j_max:
        w = 2 ** (j_max - cube.level)
        return tuple((i * w, (i + 1) * w) for i in cube.index), True
    shift = cube.level - j_max
    return tuple((i >> shift, (i >> shift) + 1) for i in cube.index), False


def _intersects(grid: SpatialGrid, cube: DyadicCube, cells: np.ndarray) -> bool:
    ranges, _ = _cells_in_cube(grid, cube)
    if grid.n == 1:
        (lo, hi), = ranges
        return bool(cells[lo:hi].any())
    (l0, h0), (l1, h1) = ranges
    return bool(cells[l0:h0, l1:h1].any())


def _min_dist_to_points(grid: SpatialGrid, level: int, idx: np.ndarray,
                        pts: np.ndarray) -> np.ndarray:
    """Min torus distance from each cube (rows of idx) to the point set."""
    s = grid.L * 2.0 ** (-level)
    out = np.empty(idx.shape[0])
    chunk = max(1, 4_000_000 // max(pts.shape[0], 1))
    for lo in range(0, idx.shape[0], chunk):
        sub = idx[lo: lo + chunk]
        if grid.n == 1:
            delta = (pts[None, :] - sub[:, 0:1] * s) % grid.L
            gap = np.where(delta <= s, 0.0, np.minimum(delta - s, grid.L - delta))
            out[lo: lo + chunk] = gap.min(axis=1)
        else:
            d0 = (pts[None, :, 0] - sub[:, 0:1] * s) % grid.L
            d1 = (pts[None, :, 1] - sub[:, 1:2] * s) % grid.L
            g0 = np.where(d0 <= s, 0.0, np.minimum(d0 - s, grid.L - d0))
            g1 = np.where(d1 <= s, 0.0, np.minimum(d1 - s, grid.L - d1))
            out[lo: lo + chunk] = np.hypot(g0, g1).min(axis=1)
    return out


def _torus_tree(grid: SpatialGrid, pts: np.ndarray):
    """KD-tree over the 3^n periodic images of a point set."""
    from scipy.spatial import cKDTree

    shifts = (-grid.L, 0.0, grid.L)
    if grid.n == 1:
        imgs = np.concatenate([pts + m for m in shifts])[:, None]
    else:
        imgs = np.concatenate(
            [pts + np.array([m0, m1]) for m0 in shifts for m1 in shifts]
        )
    return cKDTree(imgs)


def _pooled_any(cells: np.ndarray, n: int) -> list[np.ndarray]:
    """pooled[j]: does the level-j cube contain any set cell (j <= j_max)."""
    levels = [cells]
    cur = cells
    while cur.shape[0] > 1:
        if n == 1:
            cur = cur.reshape(-1, 2).any(axis=1)
        else:
            m = cur.shape[0] // 2
            cur = cur.reshape(m, 2, m, 2).any(axis=(1, 3))
        levels.append(cur)
    return levels[::-1]  # index by level


def whitney(grid: SpatialGrid, cells: np.ndarray) -> WhitneyDecomposition:
    """Whitney decomposition of an open union of grid cells.

    Returns the maximal dyadic cubes Q with d(Q, G^c) <= 4 diam(Q); cubes
    may descend below the grid cells near the boundary of the set.  An
    empty set yields an empty decomposition; a set with empty complement
    is rejected.
    """
    cells = np.asarray(cells, dtype=bool)
    if cells.shape != grid.shape:
        raise ValueError("cell mask must match the grid shape")
    if not cells.any():
        return WhitneyDecomposition(grid, cells, [])
    if cells.all():
        raise ValueError("open set must have nonempty complement")

    comp_pts = _complement_centers(grid, cells)
    tree = _torus_tree(grid, comp_pts)
    j_max = int(round(math.log2(grid.N)))
    pooled = _pooled_any(cells, grid.n)

    def intersects(level: int, idx: np.ndarray) -> np.ndarray:
        if level <= j_max:
            mask = pooled[level]
            return mask[tuple(idx.T)] if grid.n == 2 else mask[idx[:, 0]]
        shift = level - j_max
        down = idx >> shift
        return cells[tuple(down.T)] if grid.n == 2 else cells[down[:, 0]]

    def cond_many(level: int, idx: np.ndarray) -> np.ndarray:
        # center distance brackets the cube distance within half a diameter;
        # the exact computation only runs on the undecided band
        s = grid.L * 2.0 ** (-level)
        diam = math.sqrt(grid.n) * s
        centers = (idx + 0.5) * s
        dc = tree.query(centers)[0]
        cond = dc <= 4.0 * diam
        band = ~cond & (dc - diam / 2.0 <= 4.0 * diam)
        if band.any():
            d = _min_dist_to_points(grid, level, idx[band], comp_pts)
            cond[band] = d <= 4.0 * diam
        return cond

    out: list[DyadicCube] = []
    candidates = np.zeros((1, grid.n), dtype=np.int64)  # the root cube
    level = 0
    while candidates.shape[0]:
        if level > j_max + _MAX_EXTRA_LEVELS:
            raise RuntimeError("Whitney level sweep failed to terminate")
        # expand to children and evaluate the distance condition on them
        M = candidates.shape[0]
        branch = 2 ** grid.n
        if grid.n == 1:
            kids = np.repeat(2 * candidates, 2, axis=0)
            kids[1::2, 0] += 1
        else:
            kids = np.repeat(2 * candidates, 4, axis=0)
            kids[:, 0] += np.tile([0, 0, 1, 1], M)
            kids[:, 1] += np.tile([0, 1, 0, 1], M)
        keep = intersects(level + 1, kids)
        cond_child = np.ones(kids.shape[0], dtype=bool)
        if keep.any():
            cond_child[keep] = cond_many(level + 1, kids[keep])
        fails = (keep & ~cond_child).reshape(M, branch).any(axis=1)
        for row in candidates[fails]:
            out.append(DyadicCube(level, tuple(int(v) for v in row)))
        survive = np.repeat(~fails, branch) & keep
        candidates = kids[survive]
        level += 1
    return WhitneyDecomposition(grid, cells, out)


@dataclass
class WhitneyReport:
    ok: bool
    disjoint: bool
    union_exact: bool
    sandwich_ok: bool
    worst: dict


def whitney_check(dec: WhitneyDecomposition) -> WhitneyReport:
    """Independent verification of the three Whitney conditions.

    Distances are recomputed with a shifted-image formula rather than the
    constructor's modular one, and coverage is checked by exact integer
    occupancy marks on a virtual refinement of the grid.
    """
    grid, cells = dec.grid, dec.cells
    j_max = int(round(math.log2(grid.N)))
    J = max([j_max] + [c.level for c in dec.cubes])
    scale = 2 ** J

    occupancy = np.zeros((scale,) * grid.n, dtype=np.uint8)
    for cube in dec.cubes:
        w = 2 ** (J - cube.level)
        if grid.n == 1:
            (i,) = cube.index
            occupancy[i * w: (i + 1) * w] += 1
        else:
            i, j = cube.index
            occupancy[i * w: (i + 1) * w, j * w: (j + 1) * w] += 1
    disjoint = bool(occupancy.max() <= 1)
    up = 2 ** (J - j_max)
    want = np.repeat(cells, up, axis=0)
    if grid.n == 2:
        want = np.repeat(want, up, axis=1)
    union_exact = bool(np.array_equal(occupancy.astype(bool), want))

    comp = _complement_centers(grid, cells)
    tree = _torus_tree(grid, comp)
    image_pts = np.asarray(tree.data)
    sandwich_ok = True
    worst = {"ratio_low": math.inf, "ratio_high": 0.0}
    for cube in dec.cubes:
        dmin = _clamp_cube_distance(grid, cube, image_pts, tree)
        diam = cube.diam(grid)
        ratio = dmin / diam
        worst["ratio_low"] = min(worst["ratio_low"], ratio)
        worst["ratio_high"] = max(worst["ratio_high"], ratio)
        if not (diam < dmin <= 4.0 * diam):
            sandwich_ok = False
    ok = disjoint and union_exact and sandwich_ok
    return WhitneyReport(ok, disjoint, union_exact, sandwich_ok, worst)


def _clamp_cube_distance(grid: SpatialGrid, cube: DyadicCube,
                         image_pts: np.ndarray, tree) -> float:
    """Exact box-to-point-set distance via unfolded images and clamping.

    The center distance brackets the answer within half a diameter, so
    only images inside that radius need the exact clamp formula.
    """
    s = cube.side(grid)
    anchor = np.asarray(cube.anchor(grid), dtype=float)
    center = anchor + s / 2.0
    dc = float(tree.query(center[None, :])[0][0])
    near = tree.query_ball_point(center, dc + s * math.sqrt(grid.n) / 2.0 + 1e-12)
    pts = image_pts[near]
    lo = anchor[None, :]
    hi = lo + s
    gaps = np.maximum(np.maximum(lo - pts, pts - hi), 0.0)
    return float(np.sqrt((gaps * gaps).sum(axis=1)).min())


@dataclass
class StoppingProfile:
    """Largest passing truncation height per grid point.

    ``tau`` holds scale nodes or +inf; ``cut_index`` counts the scale nodes
    strictly below tau (the cone truncation index used downstream).
    """

    grid: SpatialGrid
    scales: ScaleGrid
    rho: float
    q: float
    alpha: float
    tau: np.ndarray
    cut_index: np.ndarray


def stopping_time(
    field: HalfSpaceField,
    q: float,
    rho: float,
    alpha: float = 1.0,
    cq: FunctionalProfile | None = None,
    trials: int = 512,
    rng: RandomSource | None = None,
    force_mc: bool = False,
) -> StoppingProfile:
    """tau(x): the largest scale node at which A(F|node) <= rho * C_q(F).

    +inf where the inequality still holds at t_max.  The empty truncation
    A(F|t_min) = 0 always passes, so tau >= t_min everywhere.
    """
    if rho <= 1.0:
        raise ValueError("stopping threshold rho must exceed 1")
    scales = field.scales
    if cq is None:
        cq = c_fun(field, q, alpha, trials=trials, rng=rng, force_mc=force_mc)
    nodes = scales.nodes()
    profs = a_fun_cuts(field, alpha, list(nodes), trials=trials, rng=rng,
                       force_mc=force_mc)
    a_vals = np.stack([p.values for p in profs])  # (K, *spatial)
    passes = a_vals <= rho * cq.values[None]
    # A(F|t_0) sums nothing, so node 0 always passes and a last pass exists
    k_star = scales.K - 1 - np.argmax(passes[::-1], axis=0)
    at_top = k_star == scales.K - 1
    tau = np.where(at_top, np.inf, nodes[np.minimum(k_star, scales.K - 1)])
    cut = np.where(at_top, scales.K, k_star)
    return StoppingProfile(field.grid, scales, rho, q, alpha, tau, cut.astype(int))


def set_measure(grid: SpatialGrid, mask: np.ndarray) -> float:
    """Grid-cell measure of a boolean set: count times dy^n."""
    return float(np.count_nonzero(mask)) * grid.cell_volume


def fubini_defect(H, tau: StoppingProfile) -> float:
    """C0 * integral over stopped cones minus the plain dy dt/t integral.

    C0 = (1 - rho^-q)^-1.  The change-of-order bound says the defect is
    nonnegative up to quadrature slack.
    """
    if isinstance(H, HalfSpaceField):
        if H.space.dim != 1:
            raise ValueError("H must be scalar")
        vals = H.values[..., 0].real
    else:
        vals = np.asarray(H, dtype=float)
    grid, scales = tau.grid, tau.scales
    if vals.shape != (scales.K,) + grid.shape:
        raise ValueError("H must be sampled on the tau profile's half-space")
    if np.any(vals < 0):
        raise ValueError("H must be nonnegative")

    t = scales.nodes()
    w_cone = grid.cell_volume * scales.dlog * t ** (-grid.n)
    per_scale = per_scale_window_sum(grid, vals, tau.alpha * t)
    per_scale = per_scale * w_cone.reshape((-1,) + (1,) * grid.n)
    prefix = np.concatenate(
        [np.zeros((1,) + grid.shape), np.cumsum(per_scale, axis=0)], axis=0
    )
    flatp = prefix.reshape(scales.K + 1, grid.size)
    inner = np.take_along_axis(flatp, tau.cut_index.reshape(1, -1), axis=0)[0]
    c0 = 1.0 / (1.0 - tau.rho ** (-tau.q))
    lhs = c0 * float(inner.sum()) * grid.cell_volume
    rhs = float(vals.sum()) * grid.cell_volume * scales.dlog
    return lhs - rhs


@dataclass
class GoodLambdaTable:
    rows: list  # dicts: gamma, lam, m_lhs, m_cq, m_beta, fitted_C
    fitted: dict  # gamma -> minimal C over the lambda list
    alpha: float
    beta: float
    q: float
    wrap_warning: bool

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["gamma", "lambda", "m_lhs", "m_cq", "m_beta", "fitted_C"])
            for r in self.rows:
                w.writerow([r["gamma"], r["lam"], r["m_lhs"], r["m_cq"],
                            r["m_beta"], r["fitted_C"]])

    def satisfied(self) -> bool:
        """Inequality m_lhs <= m_cq + C gamma^q m_beta with the fitted C."""
        for r in self.rows:
            c = self.fitted[r["gamma"]]
            if not math.isfinite(c):
                return False
            bound = r["m_cq"] + c * r["gamma"] ** self.q * r["m_beta"]
            if r["m_lhs"] > bound + 1e-12:
                return False
        return True


def good_lambda_table(
    field: HalfSpaceField,
    alpha: float,
    q: float,
    gammas,
    lambdas,
    beta: float | None = None,
    trials: int = 512,
    rng: RandomSource | None = None,
    force_mc: bool = False,
) -> GoodLambdaTable:
    """Super-level measures of A at two apertures against C_q.

    For each gamma the fitted C is the smallest constant making
    |{A > 2 lam}| <= |{C_q > gamma lam}| + C gamma^q |{A_beta > lam}|
    hold across the whole lambda list.
    """
    grid = field.grid
    beta = alpha + 10.0 if beta is None else beta
    wrap = beta * field.scales.t_max > grid.L / 2
    a_narrow = a_fun(field, alpha, trials=trials, rng=rng, force_mc=force_mc)
    a_wide = a_fun(field, beta, trials=trials, rng=rng, force_mc=force_mc)
    cq = c_fun(field, q, alpha, trials=trials, rng=rng, force_mc=force_mc)

    rows = []
    fitted = {}
    for gamma in gammas:
        if not 0.0 < gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        need = 0.0
        entries = []
        for lam in lambdas:
            if lam <= 0:
                raise ValueError("lambda must be positive")
            m_lhs = set_measure(grid, a_narrow.values > 2.0 * lam)
            m_cq = set_measure(grid, cq.values > gamma * lam)
            m_beta = set_measure(grid, a_wide.values > lam)
            entries.append((lam, m_lhs, m_cq, m_beta))
            excess = m_lhs - m_cq
            if excess > 0:
                if m_beta == 0:
                    need = math.inf
                else:
                    need = max(need, excess / (gamma ** q * m_beta))
        fitted[gamma] = need
        for lam, m_lhs, m_cq, m_beta in entries:
            rows.append(
                {"gamma": gamma, "lam": lam, "m_lhs": m_lhs, "m_cq": m_cq,
                 "m_beta": m_beta, "fitted_C": need}
            )
    return GoodLambdaTable(rows, fitted, alpha, beta, q, wrap)
