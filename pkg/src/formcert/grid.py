"""Rational sampling grids standing in for compact polydiscs.

Sup norms are grid maxima of exact rational absolute values: honest lower
bounds for the true sup over the polydisc, compared exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class GridSpec:
    """Closed polydisc sampled on a rational grid.

    ``center`` and ``radius`` are per-axis rationals; ``samples`` points per
    axis (at least 2).
    """

    center: tuple
    radius: tuple
    samples: int

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(Fraction(c) for c in self.center))
        object.__setattr__(self, "radius", tuple(Fraction(r) for r in self.radius))
        if len(self.center) != len(self.radius):
            raise ValueError("center/radius dimension mismatch")
        if any(r <= 0 for r in self.radius):
            raise ValueError("radii must be positive")
        if self.samples < 2:
            raise ValueError("need at least 2 samples per axis")

    @property
    def dim(self):
        return len(self.center)

    def axis_points(self, i):
        c, r = self.center[i], self.radius[i]
        m = self.samples
        return [c - r + 2 * r * Fraction(j, m - 1) for j in range(m)]

    def points(self):
        """All grid points as tuples of Fractions."""
        axes = [self.axis_points(i) for i in range(self.dim)]
        return list(itertools.product(*axes))


def unit_interval_points(samples):
    return [Fraction(j, samples - 1) for j in range(samples)]


def sup_norm(p, grid):
    """Max of |p| over the grid points, exact.

    Grid axes are matched to the ring's space variables in order.
    """
    names = [v.name for v in p.ring.space_variables]
    if len(names) != grid.dim:
        raise ValueError(
            "grid dimension %d does not match %d space variables"
            % (grid.dim, len(names))
        )
    best = Fraction(0)
    for pt in grid.points():
        v = abs(p.eval(dict(zip(names, pt))))
        if v > best:
            best = v
    return best
