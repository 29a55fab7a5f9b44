"""Exact rational linear algebra."""

from fractions import Fraction

from formcert import linalg

F = Fraction


def test_solve_unique():
    A = [[F(2), F(1)], [F(1), F(3)]]
    b = [F(5), F(10)]
    x = linalg.solve(A, b)
    assert x == [F(1), F(3)]


def test_solve_inconsistent():
    A = [[F(1), F(1)], [F(2), F(2)]]
    assert linalg.solve(A, [F(1), F(3)]) is None


def test_solve_underdetermined_sets_free_to_zero():
    A = [[F(1), F(1)]]
    x = linalg.solve(A, [F(4)])
    assert x is not None
    assert x[0] + x[1] == 4


def test_nullspace():
    A = [[F(1), F(2), F(3)]]
    basis = linalg.nullspace(A)
    assert len(basis) == 2
    for v in basis:
        assert sum(a * b for a, b in zip(A[0], v)) == 0


def test_nullspace_full_rank_trivial():
    A = [[F(1), F(0)], [F(0), F(1)]]
    assert linalg.nullspace(A) == []


def test_lstsq_exact_when_consistent():
    A = [[F(1), F(0)], [F(0), F(1)], [F(1), F(1)]]
    b = [F(1), F(2), F(3)]
    x = linalg.lstsq(A, b)
    assert x == [F(1), F(2)]


def test_lstsq_minimizes():
    # classic overdetermined system: best fit of constant to (0, 1)
    A = [[F(1)], [F(1)]]
    b = [F(0), F(1)]
    x = linalg.lstsq(A, b)
    assert x == [F(1, 2)]


def test_rref_idempotent():
    A = [[F(2), F(4)], [F(1), F(2)]]
    R, pivots = linalg.rref(A)
    R2, pivots2 = linalg.rref(R)
    assert R == R2 and pivots == pivots2
