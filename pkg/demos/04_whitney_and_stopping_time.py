"""Whitney decomposition and the stopping time behind the duality bound.

An open union of grid cells decomposes into disjoint dyadic cubes whose
diameters are comparable to their distance from the complement; an
independent checker verifies disjointness, exact cover and the distance
sandwich.  The stopping time tau(x) is the largest truncation height at
which the truncated cone functional still sits below rho times the
Carleson functional; most of every ball survives the stopping.
"""

import numpy as np

from tentspace import (
    RandomSource,
    ScaleGrid,
    SpatialGrid,
    a_fun,
    dyadic_radii,
    ell,
    fubini_defect,
    generate_field_corpus,
    set_measure,
    stopping_time,
    whitney,
    whitney_check,
)

grid = SpatialGrid(1, 256)
scales = ScaleGrid(2 * grid.spacing, 0.25, 24)

# a random open set from thresholding a smooth profile
gen = np.random.default_rng(3)
smooth = np.fft.ifft(np.fft.fft(gen.normal(size=grid.N))
                     * np.exp(-np.abs(np.fft.fftfreq(grid.N) * grid.N) / 5)).real
cells = smooth > np.quantile(smooth, 0.6)
dec = whitney(grid, cells)
report = whitney_check(dec)
levels = sorted({c.level for c in dec.cubes})
print(f"open set of {cells.sum()} cells -> {len(dec.cubes)} Whitney cubes, "
      f"levels {levels}")
print(f"checker: disjoint={report.disjoint} union_exact={report.union_exact} "
      f"sandwich={report.sandwich_ok}")
print(f"distance/diameter ratios in [{report.worst['ratio_low']:.2f}, "
      f"{report.worst['ratio_high']:.2f}] (must lie in (1, 4])")

# stopping time for a single-column field (homogeneous ones never stop:
# their Carleson functional tracks the cone functional too closely)
from tentspace.harness import generate_column_corpus

F = generate_column_corpus(grid, scales, ell(2, 1), 1, RandomSource(5),
                           columns=1)[0]
rho, q = 1.5, 1.0
prof = stopping_time(F, q=q, rho=rho)
finite = np.isfinite(prof.tau)
print(f"\nstopping time at rho={rho}, q={q}: {finite.sum()} of {grid.N} "
      f"points stop at a finite height, the rest run to tau = inf")

# the measure lemma: most of any ball keeps tau above its radius
radii = dyadic_radii(grid)
worst = 1.0
rng = np.random.default_rng(1)
for _ in range(200):
    r = float(radii[rng.integers(0, radii.size)])
    c = grid.spacing * int(rng.integers(0, grid.N))
    members = grid.point_distance(c) < r
    frac = set_measure(grid, members & (prof.tau > r)) / set_measure(grid, members)
    worst = min(worst, frac)
print(f"min fraction of a ball with tau > r(B): {worst:.3f} "
      f">= 1 - rho^-q = {1 - rho ** (-q):.3f} (minus one cell)")

# the change-of-order bound with the proof constant
H = np.random.default_rng(2).uniform(size=(scales.K,) + grid.shape)
defect = fubini_defect(H, prof)
print(f"\nFubini defect (must be >= 0 up to quadrature slack): {defect:.4f}")
