"""Floating-point auxiliary views; never authoritative.

Exact rationals are converted to doubles only at the last moment, for SVD
rank cross-checks and plot/diagnostic output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from formcert.grid import unit_interval_points

RANK_POSITIVE_TOL = 1e-9
EXACT_ZERO_TOL = 1e-12


@dataclass
class SampledMatrix:
    point: tuple
    entries: np.ndarray          # q x n floats
    singular_values: np.ndarray  # descending


def _values_at(ring, point):
    names = [v.name for v in ring.space_variables]
    return dict(zip(names, point))


def evaluate_forms(forms, points):
    """Evaluate the coefficient matrix at each point; exact until the cast."""
    out = []
    for pt in points:
        values = _values_at(forms.ring, pt)
        entries = np.array(
            [[float(p.eval(values)) for p in row] for row in forms.rows]
        )
        sv = np.linalg.svd(entries, compute_uv=False)
        out.append(SampledMatrix(tuple(pt), entries, sv))
    return out


def min_singular_over_grid(forms, K, t_samples=None):
    """Minimum n-th singular value over the grid (and t-grid if requested).

    For tuples over a t-extended ring pass ``t_samples`` to sweep t in [0,1].
    """
    n = forms.n
    best = None
    t_values = [None]
    if t_samples is not None:
        t_values = unit_interval_points(t_samples)
    for pt in K.points():
        for tv in t_values:
            values = _values_at(forms.ring, pt)
            if tv is not None:
                values["t"] = tv
            entries = np.array(
                [[float(p.eval(values)) for p in row] for row in forms.rows]
            )
            sv = np.linalg.svd(entries, compute_uv=False)
            nth = sv[n - 1] if len(sv) >= n else 0.0
            if best is None or nth < best:
                best = nth
    return best


def write_singular_values_csv(forms, K, path, t_samples=None):
    """Emit (point, singular values) rows for external plotting."""
    t_values = [None]
    if t_samples is not None:
        t_values = unit_interval_points(t_samples)
    names = [v.name for v in forms.ring.space_variables]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = list(names)
        if t_samples is not None:
            header.append("t")
        header += ["sigma%d" % (i + 1) for i in range(forms.n)]
        writer.writerow(header)
        for pt in K.points():
            for tv in t_values:
                values = _values_at(forms.ring, pt)
                row = [float(Fraction(x)) for x in pt]
                if tv is not None:
                    values["t"] = tv
                    row.append(float(tv))
                entries = np.array(
                    [[float(p.eval(values)) for p in r] for r in forms.rows]
                )
                sv = np.linalg.svd(entries, compute_uv=False)
                row += [float(s) for s in sv[: forms.n]]
                writer.writerow(row)
    return path
