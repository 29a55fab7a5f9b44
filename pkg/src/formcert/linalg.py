"""Exact linear algebra over the rationals.

Small dense systems only; everything is ``Fraction`` and deterministic.
"""

from __future__ import annotations

from fractions import Fraction


def rref(matrix):
    """Reduced row echelon form.

    Returns ``(rows, pivots)`` where ``rows`` is the reduced matrix and
    ``pivots`` the pivot column of each nonzero row.
    """
    rows = [list(map(Fraction, r)) for r in matrix]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for k in range(r, len(rows)):
            if rows[k][c] != 0:
                pivot = k
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def solve(matrix, rhs):
    """One exact solution of ``matrix @ x = rhs`` (free variables set to 0).

    Returns the solution vector or None if the system is inconsistent.
    """
    if not matrix:
        return []
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = rref(aug)
    ncols = len(matrix[0])
    x = [Fraction(0)] * ncols
    for row, p in zip(rows, pivots):
        if p == ncols:
            return None  # 0 = nonzero
        x[p] = row[-1]
    return x


def nullspace(matrix):
    """Basis of the kernel of ``matrix`` as a list of vectors."""
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows, pivots = rref(matrix)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[free]
        basis.append(v)
    return basis


def lstsq(matrix, rhs):
    """Exact least-squares solution via normal equations.

    The normal system is always consistent; ties among minimizers are broken
    by zeroing free variables, which keeps the result deterministic.
    """
    ncols = len(matrix[0]) if matrix else 0
    ata = [[Fraction(0)] * ncols for _ in range(ncols)]
    atb = [Fraction(0)] * ncols
    for row, b in zip(matrix, rhs):
        for i in range(ncols):
            ri = row[i]
            if ri == 0:
                continue
            atb[i] += ri * b
            for j in range(ncols):
                ata[i][j] += ri * row[j]
    sol = solve(ata, atb)
    assert sol is not None
    return sol
