"""Paraproduct of a vector-valued symbol with a scalar function.

P(f, u) accumulates, over the scale grid, the slices
psi_t * [(psi_t * f) (phi_t * u)], every convolution an exact cyclic one.
The same slices back both the sampled field and the dual pairing
<P(f, u), g>, so the two agree up to summation-order roundoff.

Per-scale contribution norms are kept as diagnostics: when the endpoint
slices still carry weight relative to the peak, the scale band is too
narrow and the result is flagged as truncated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calderon import TestFunction
from .field import SampledFunction, ScaleGrid
from .space import dual, norm, pair

__all__ = ["ParaproductResult", "paraproduct", "pair_paraproduct", "lp_norm"]

_MEAN_ZERO_TOL = 1e-12


@dataclass
class ParaproductResult:
    field: SampledFunction
    scale_norms: np.ndarray  # dlog-weighted L^2 size of each slice
    truncated: bool
    pairing: complex | None = None


def _check_inputs(f: SampledFunction, u: SampledFunction, psi: TestFunction):
    if abs(psi.integral) > _MEAN_ZERO_TOL:
        raise ValueError(f"{psi.name} must have vanishing integral")
    if f.grid != u.grid:
        raise ValueError("symbol and function must share a grid")
    if u.space.dim != 1:
        raise ValueError("u must be scalar-valued")


def _slices(f, u, psi, phi, scales):
    """Yield (k, slice_k) with slice_k = psi_t*[(psi_t*f)(phi_t*u)]."""
    grid = f.grid
    axes = tuple(range(grid.n))
    fhat = np.fft.fftn(f.values, axes=axes)
    uhat = np.fft.fftn(u.values[..., 0], axes=axes)
    for k, t in enumerate(scales.nodes()):
        mp = psi.fourier_grid(grid, t)
        mf = phi.fourier_grid(grid, t)
        a = np.fft.ifftn(fhat * mp[..., None], axes=axes)
        b = np.fft.ifftn(uhat * mf, axes=axes)
        prod = a * b[..., None]
        sl = np.fft.ifftn(np.fft.fftn(prod, axes=axes) * mp[..., None], axes=axes)
        yield k, sl


def paraproduct(
    f: SampledFunction,
    u: SampledFunction,
    psi: TestFunction,
    phi: TestFunction,
    scales: ScaleGrid,
    tail_tol: float = 0.05,
) -> ParaproductResult:
    """P(f, u) on the grid, accumulated over the scale band."""
    _check_inputs(f, u, psi)
    grid = f.grid
    acc = np.zeros(grid.shape + (f.space.dim,), dtype=complex)
    contrib = np.zeros(scales.K)
    for k, sl in _slices(f, u, psi, phi, scales):
        acc += scales.dlog * sl
        sq = float((np.abs(sl) ** 2).sum()) * grid.cell_volume
        contrib[k] = scales.dlog * math.sqrt(sq)
    peak = contrib.max()
    truncated = bool(peak > 0 and max(contrib[0], contrib[-1]) > tail_tol * peak)
    return ParaproductResult(
        SampledFunction(grid, f.space, acc), contrib, truncated
    )


def pair_paraproduct(
    f: SampledFunction,
    u: SampledFunction,
    g: SampledFunction,
    psi: TestFunction,
    phi: TestFunction,
    scales: ScaleGrid,
) -> complex:
    """<P(f, u), g> accumulated scale by scale.

    g lives in the dual target; the value equals pairing paraproduct(f, u)
    against g directly, up to summation-order roundoff.
    """
    _check_inputs(f, u, psi)
    if g.grid != f.grid:
        raise ValueError("g must share the grid")
    if dual(f.space) != g.space:
        raise ValueError(
            f"g must take values in the dual of {f.space.label()}, "
            f"got {g.space.label()}"
        )
    total = 0.0 + 0.0j
    vol = f.grid.cell_volume
    for _, sl in _slices(f, u, psi, phi, scales):
        total += scales.dlog * complex(pair(sl, g.values).sum() * vol)
    return total


def lp_norm(v: SampledFunction, p) -> float:
    """L^p norm with grid-cell weights; p=None or inf gives the sup norm."""
    pointwise = norm(v.space, v.values)
    if p is None or p == math.inf:
        return float(pointwise.max())
    if p < 1:
        raise ValueError("p must be at least 1")
    return float(((pointwise ** p).sum() * v.grid.cell_volume) ** (1.0 / p))
