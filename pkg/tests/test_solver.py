"""Certified restricted solves, Bezout lifting, parametric variant, stability."""

import random
from fractions import Fraction

import pytest

from formcert import geometry, semitrans, solver
from formcert.grid import GridSpec
from formcert.groebner import Ideal
from formcert.ring import KIND_PARAMETER, Ring, Variable


@pytest.fixture
def R2():
    return Ring.space(["x1", "x2"])


def d_dx(ring, i):
    comps = [ring.zero] * len(ring.space_variables)
    comps[i] = ring.one
    return geometry.VectorField(ring, comps)


def _setup(sigma, L):
    chain = semitrans.tangency_chain(sigma, L)
    assert chain.status == semitrans.REACHED_UNIT
    cert = semitrans.extract_certificate(chain, sigma, L)
    bez = solver.bezout_lift(cert, L, sigma)
    return cert, bez


def test_bezout_identity_verifies(R2):
    sigma = Ideal(R2, [R2.parse("x1^2 - x2")])
    L = d_dx(R2, 0)
    cert, bez = _setup(sigma, L)
    assert bez.verify(L)
    # the expected cofactor 1/2 for L^2 f_1 = 2
    assert bez.coefficients[(0, 2)] == R2.const(Fraction(1, 2))


def test_solve_order_one_constant_rhs(R2):
    sigma = Ideal(R2, [R2.parse("x2")])
    L = d_dx(R2, 1)
    cert, bez = _setup(sigma, L)
    sol = solver.solve_restricted(L, sigma, R2.one, cert, bez)
    assert sol.f == R2.parse("x2")
    assert (L.apply(sol.f) - R2.one).is_zero()
    assert sol.verify()


def test_solve_order_one_poly_rhs(R2):
    sigma = Ideal(R2, [R2.parse("x2")])
    L = d_dx(R2, 1)
    cert, bez = _setup(sigma, L)
    sol = solver.solve_restricted(L, sigma, R2.parse("x1"), cert, bez)
    assert sol.f == R2.parse("x1*x2")
    assert sol.verify()


def test_solve_order_two(R2):
    sigma = Ideal(R2, [R2.parse("x1^2 - x2")])
    L = d_dx(R2, 0)
    cert, bez = _setup(sigma, L)
    sol = solver.solve_restricted(L, sigma, R2.one, cert, bez)
    assert sol.f == R2.parse("x1")
    assert sol.verify()
    assert sigma.membership(L.apply(sol.f) - R2.one) is not None


def test_solver_linearity(R2):
    sigma = Ideal(R2, [R2.parse("x1^2 - x2")])
    L = d_dx(R2, 0)
    cert, bez = _setup(sigma, L)
    g1, g2 = R2.parse("x1 + 1"), R2.parse("x2^2 - 3")
    s1 = solver.solve_restricted(L, sigma, g1, cert, bez)
    s2 = solver.solve_restricted(L, sigma, g2, cert, bez)
    s12 = solver.solve_restricted(L, sigma, g1 + g2, cert, bez)
    # the formula is linear in g, so the difference solves Lf = 0 on Sigma
    diff = s12.f - s1.f - s2.f
    assert sigma.membership(L.apply(diff)) is not None


def test_residual_certificate_is_constructive(R2):
    sigma = Ideal(R2, [R2.parse("x1^3 - x2")])
    L = d_dx(R2, 0)
    cert, bez = _setup(sigma, L)
    rng = random.Random(3)
    for _ in range(5):
        g = R2.from_dict({
            (e1, e2): Fraction(rng.randint(-3, 3))
            for e1 in range(3) for e2 in range(2)
        })
        sol = solver.solve_restricted(L, sigma, g, cert, bez)
        c = sol.residual_certificate
        assert c.expand() == L.apply(sol.f) - g
        assert c.verify()


def _flagship(R2):
    rows = [
        [R2.one, R2.zero],
        [R2.zero, R2.parse("x2")],
        [R2.zero, R2.parse("1 + x2")],
    ]
    return geometry.FormTuple(R2, rows)


def test_solve_replacement_primitive_exact_primitive(R2):
    forms = _flagship(R2)
    sigma = geometry.full_degeneracy_ideal(forms, 2).ideal
    L, _ = geometry.construct_field_on_sigma(forms, 2, sigma, 1)
    cert, bez = _setup(sigma, L)
    sol, approx = solver.solve_replacement_primitive(
        forms, 2, sigma, L, R2.parse("x2"), cert, bez,
        GridSpec((0, 0), (1, 1), 5),
    )
    assert sol.f == R2.parse("x2")  # h = 0: g_3 already solves it
    assert sigma.membership(L.apply(sol.f) - R2.one) is not None


def test_solve_replacement_primitive_with_correction(R2):
    forms = _flagship(R2)
    sigma = geometry.full_degeneracy_ideal(forms, 2).ideal
    L, _ = geometry.construct_field_on_sigma(forms, 2, sigma, 1)
    cert, bez = _setup(sigma, L)
    g3 = R2.parse("x2 + x2^2")
    sol, approx = solver.solve_replacement_primitive(
        forms, 2, sigma, L, g3, cert, bez, GridSpec((0, 0), (1, 1), 5),
    )
    # h = -2 x2^2 from the formula applied to 1 - L g_3 = -2 x2
    assert sol.f - g3 == R2.parse("-2*x2^2")
    assert sigma.membership(L.apply(sol.f) - R2.one) is not None


def _parametric_ring():
    R = Ring.space(["x1", "x2"])
    return R.extend([Variable("s1", KIND_PARAMETER)])


def test_parametric_solve_and_specialization():
    S = _parametric_ring()
    sigma = Ideal(S, [S.parse("x2 - s1")])
    L = d_dx(S, 1)
    cert, bez = _setup(sigma, L)
    sol = solver.solve_restricted_parametric(L, sigma, S.one, cert, bez)
    assert sol.f == S.parse("x2 - s1")
    rng = random.Random(5)
    for _ in range(10):
        s = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        f_s, cert_s = solver.specialize_solution(sol, sigma, {"s1": s})
        assert cert_s.verify()
        # specialized residual lies in the specialized ideal
        sigma_s = Ideal(S, [g.subs({"s1": s}) for g in sigma.generators])
        assert sigma_s.membership(L.apply(f_s) - S.one) is not None


def test_parametric_uniform_order():
    S = _parametric_ring()
    sigma = Ideal(S, [S.parse("x1^2 - s1*x2")])
    L = d_dx(S, 0)
    cert, bez = _setup(sigma, L)
    assert cert.order == 2
    sol = solver.solve_restricted_parametric(L, sigma, S.one, cert, bez)
    assert sol.f == S.parse("x1")


def test_stability_fixture():
    R = Ring.space(["x1"])
    f = [R.parse("x1"), R.parse("1 - x1")]
    a = [R.one, R.one]
    ft = [R.parse("x1 + 1/100"), R.parse("1 - x1")]
    rep = solver.stability_report(f, a, ft, GridSpec((0,), (1,), 9), 1)
    assert rep.identity_exact()
    assert rep.a_norm == 1
    assert rep.f_change == Fraction(1, 100)
    # regression values from the first verified run
    assert [str(p) for p in rep.perturbed_a] == ["100/101", "100/101"]
    assert rep.a_change == Fraction(1, 101)
    assert rep.bound == Fraction(1, 25)
    assert rep.bound_holds
    assert rep.within_delta


def test_stability_zero_perturbation_trivial():
    R = Ring.space(["x1"])
    f = [R.parse("x1"), R.parse("1 - x1")]
    a = [R.one, R.one]
    rep = solver.stability_report(f, a, list(f), GridSpec((0,), (1,), 5), 1)
    assert rep.identity_exact()
    assert rep.a_change == 0
    assert rep.f_change == 0


def test_stability_precondition_failures():
    R = Ring.space(["x1"])
    K = GridSpec((0,), (1,), 5)
    with pytest.raises(ValueError):
        solver.stability_report(
            [R.parse("x1")], [R.one], [R.parse("x1")], K, 2
        )
    with pytest.raises(ValueError):
        solver.stability_report(
            [R.parse("x1"), R.parse("1 - x1")],
            [R.one, R.one],
            [R.parse("x1"), R.parse("x1^2")],
            K, 2,
        )
