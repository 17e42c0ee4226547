"""Gauss norms of fields restricted to regions.

For an l^2 target the Gauss norm collapses to the weighted L^2 sum over
the region's atoms and is computed exactly.  Otherwise it is estimated by
Monte Carlo: draw one complex standard Gaussian per region atom, form the
randomized sum S = sum_i sqrt(w_i) g_i F_i in the target space, and return
sqrt(E ||S||^2) with a delta-method standard error.

Atoms are enumerated in the region's canonical order and all paired
comparisons reuse common random numbers, so estimates are reproducible and
defects of exact identities carry only the Monte Carlo noise of the
difference, not of the two terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import HalfSpaceField, Region
from .space import RandomSource, dual, norm, pair

__all__ = [
    "GaussEstimate",
    "gauss_norm",
    "paired_multiplier_defect",
    "unimodular_invariance_defect",
    "duality_defect",
    "DualityDetail",
]

_CHUNK_ELEMS = 2_000_000  # complex draws held at once in the MC loop


@dataclass(frozen=True)
class GaussEstimate:
    value: float
    stderr: float
    trials: int
    exact: bool

    def __post_init__(self):
        if self.value < 0 or self.stderr < 0:
            raise ValueError("estimate and stderr must be nonnegative")
        if self.exact and self.stderr != 0.0:
            raise ValueError("exact estimates carry zero stderr")


def _atom_values(field: HalfSpaceField, region: Region) -> tuple[np.ndarray, np.ndarray]:
    vals = region.restrict(field)
    return vals, np.sqrt(region.weights)


def _second_moments(field, region, trials, rng, scale_field=None):
    """Per-trial squared norms of the Gaussian sum, chunked over trials."""
    vals, wsqrt = _atom_values(field, region)
    weighted = wsqrt[:, None] * vals
    if scale_field is not None:
        weighted_b = wsqrt[:, None] * (scale_field[:, None] * vals)
    A = region.size
    gen = (rng if rng is not None else RandomSource(0)).generator()
    chunk = max(1, min(trials, _CHUNK_ELEMS // max(A, 1)))
    m = np.empty(trials)
    mb = np.empty(trials) if scale_field is not None else None
    done = 0
    while done < trials:
        take = min(chunk, trials - done)
        re = gen.standard_normal((take, A))
        im = gen.standard_normal((take, A))
        g = (re + 1j * im) / math.sqrt(2.0)
        s = g @ weighted
        m[done: done + take] = norm(field.space, s) ** 2
        if scale_field is not None:
            sb = g @ weighted_b
            mb[done: done + take] = norm(field.space, sb) ** 2
        done += take
    return (m, mb) if scale_field is not None else m


def _estimate_from_moments(m: np.ndarray) -> GaussEstimate:
    trials = m.size
    mean = float(m.mean())
    if mean <= 0.0:
        return GaussEstimate(0.0, 0.0, trials, False)
    var = float(m.var(ddof=1)) if trials > 1 else 0.0
    stderr = math.sqrt(var / trials) / (2.0 * math.sqrt(mean))
    return GaussEstimate(math.sqrt(mean), stderr, trials, False)


def gauss_norm(
    field: HalfSpaceField,
    region: Region,
    trials: int = 2000,
    rng: RandomSource | None = None,
    force_mc: bool = False,
) -> GaussEstimate:
    """Gauss norm of the field restricted to the region.

    Exact (stderr 0) when the target is l^2 and ``force_mc`` is off;
    otherwise a Monte Carlo estimate with ``trials`` draws.
    """
    if region.size == 0:
        return GaussEstimate(0.0, 0.0, 0, True)
    if field.space.is_hilbert and not force_mc:
        vals, wsqrt = _atom_values(field, region)
        total = float((region.weights * (np.abs(vals) ** 2).sum(axis=1)).sum())
        return GaussEstimate(math.sqrt(total), 0.0, 0, True)
    if trials < 2:
        raise ValueError("Monte Carlo path needs at least two trials")
    m = _second_moments(field, region, trials, rng)
    return _estimate_from_moments(m)


def paired_multiplier_defect(
    field: HalfSpaceField,
    region: Region,
    multiplier: np.ndarray,
    trials: int = 2000,
    rng: RandomSource | None = None,
    force_mc: bool = False,
) -> tuple[float, float]:
    """(gauss_norm(g*F) - gauss_norm(F), stderr) with common random numbers.

    ``multiplier`` is a scalar field over (K, *spatial).  On the exact
    Hilbert path the stderr is zero.
    """
    expect = (field.scales.K,) + field.grid.shape
    multiplier = np.asarray(multiplier)
    if multiplier.shape != expect:
        raise ValueError(f"multiplier shape {multiplier.shape} != {expect}")
    if region.size == 0:
        return 0.0, 0.0
    flat = multiplier.reshape(field.scales.K, field.grid.size)
    g_atoms = flat[region.scale_idx, region.spatial_idx]
    if field.space.is_hilbert and not force_mc:
        vals, _ = _atom_values(field, region)
        sq = (np.abs(vals) ** 2).sum(axis=1)
        base = float((region.weights * sq).sum())
        scaled = float((region.weights * np.abs(g_atoms) ** 2 * sq).sum())
        return math.sqrt(scaled) - math.sqrt(base), 0.0
    if trials < 2:
        raise ValueError("Monte Carlo path needs at least two trials")
    m, mb = _second_moments(field, region, trials, rng, scale_field=g_atoms)
    est, est_b = _estimate_from_moments(m), _estimate_from_moments(mb)
    diff = mb - m
    if est.value == 0.0 and est_b.value == 0.0:
        return 0.0, 0.0
    denom = 2.0 * max(est.value, est_b.value)
    stderr = math.sqrt(float(diff.var(ddof=1)) / trials) / denom
    return est_b.value - est.value, stderr


def unimodular_invariance_defect(
    field: HalfSpaceField,
    region: Region,
    phases: np.ndarray,
    trials: int = 2000,
    rng: RandomSource | None = None,
    force_mc: bool = False,
    details: bool = False,
):
    """|gauss_norm(v*F) - gauss_norm(F)| for a unimodular scalar field v."""
    expect = (field.scales.K,) + field.grid.shape
    phases = np.asarray(phases, dtype=complex)
    if phases.shape != expect:
        raise ValueError(f"phase field shape {phases.shape} != {expect}")
    flat = np.abs(phases).reshape(field.scales.K, field.grid.size)
    mods = flat[region.scale_idx, region.spatial_idx]
    if region.size and np.abs(mods - 1.0).max() > 1e-12:
        raise ValueError("phase field is not unimodular on the region")
    defect, stderr = paired_multiplier_defect(
        field, region, phases, trials=trials, rng=rng, force_mc=force_mc
    )
    return (abs(defect), stderr) if details else abs(defect)


@dataclass(frozen=True)
class DualityDetail:
    defect: float
    integral: float
    norm_f: GaussEstimate
    norm_g: GaussEstimate

    @property
    def stderr(self) -> float:
        a = self.norm_f.stderr * self.norm_g.value
        b = self.norm_g.stderr * self.norm_f.value
        return math.sqrt(a * a + b * b)


def duality_defect(
    field: HalfSpaceField,
    dual_field: HalfSpaceField,
    region: Region,
    trials: int = 2000,
    rng: RandomSource | None = None,
    force_mc: bool = False,
    details: bool = False,
):
    """integral_R |<F, G>| dmu  minus  gauss_norm(F) * gauss_norm(G).

    The Gauss-norm duality says this is never essentially positive: the
    defect must stay below a few combined standard errors.
    """
    if dual(field.space) != dual_field.space:
        raise ValueError(
            f"spaces are not dual: {field.space.label()} vs {dual_field.space.label()}"
        )
    if field.grid != dual_field.grid or field.scales != dual_field.scales:
        raise ValueError("fields must share grid and scales")
    fv = region.restrict(field)
    gv = region.restrict(dual_field)
    integral = float((region.weights * np.abs(pair(fv, gv))).sum())
    base = rng if rng is not None else RandomSource(0)
    nf = gauss_norm(field, region, trials, base.derive(101), force_mc=force_mc)
    ng = gauss_norm(dual_field, region, trials, base.derive(102), force_mc=force_mc)
    det = DualityDetail(integral - nf.value * ng.value, integral, nf, ng)
    return det if details else det.defect
