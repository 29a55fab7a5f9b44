"""Matplotlib figure rendering for the CLI report path.

Figures are diagnostic companions to the CSV output; the exact certificates
remain the authoritative record.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from formcert import numeric
from formcert.grid import unit_interval_points


def plot_min_singular(forms, K, path):
    """n-th singular value over the grid: line for n=1, heatmap for n=2."""
    n = forms.n
    names = [v.name for v in forms.ring.space_variables]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if n == 1:
        xs = [float(x) for x in K.axis_points(0)]
        ys = []
        for x in K.axis_points(0):
            sm = numeric.evaluate_forms(forms, [(x,)])[0]
            ys.append(float(sm.singular_values[n - 1]))
        ax.plot(xs, ys, marker="o", ms=3)
        ax.set_xlabel(names[0])
        ax.set_ylabel("sigma_%d" % n)
    elif n == 2:
        ax0 = [float(x) for x in K.axis_points(0)]
        ax1 = [float(x) for x in K.axis_points(1)]
        Z = np.zeros((len(ax1), len(ax0)))
        for i, x in enumerate(K.axis_points(0)):
            for j, y in enumerate(K.axis_points(1)):
                sm = numeric.evaluate_forms(forms, [(x, y)])[0]
                Z[j, i] = float(sm.singular_values[n - 1])
        im = ax.imshow(
            Z,
            origin="lower",
            extent=[ax0[0], ax0[-1], ax1[0], ax1[-1]],
            aspect="auto",
            cmap="viridis",
        )
        fig.colorbar(im, ax=ax, label="sigma_%d" % n)
        ax.set_xlabel(names[0])
        ax.set_ylabel(names[1])
    else:
        # higher dimensions: sorted scatter of the grid values
        vals = sorted(
            float(sm.singular_values[n - 1])
            for sm in numeric.evaluate_forms(forms, K.points())
        )
        ax.plot(vals)
        ax.set_xlabel("grid point (sorted)")
        ax.set_ylabel("sigma_%d" % n)
    ax.set_title("smallest relevant singular value over the sample grid")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_homotopy_rank(homotopy, K, path, t_samples=9):
    """Minimum n-th singular value over x, as a function of the global t."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    m = len(homotopy.segments)
    ts = []
    ys = []
    for idx, seg in enumerate(homotopy.segments):
        for tv in unit_interval_points(t_samples):
            # evaluate the segment at this local t, then scan the grid
            snapshot = seg.at(tv)
            y = numeric.min_singular_over_grid(snapshot, K)
            ts.append((idx + float(tv)) / m)
            ys.append(y)
    ax.plot(ts, ys, marker="o", ms=3)
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_xlabel("global homotopy parameter t")
    ax.set_ylabel("min over grid of sigma_n")
    ax.set_title("rank margin along the homotopy")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
