"""Tuples of 1-forms on affine space, their degeneracy loci, and vector fields.

A tuple of q forms is a q x n polynomial matrix, row i holding the dx_j
coefficients of the i-th form.  The degeneracy locus of a row subset is cut
out by all n x n minors of those rows, in a fixed row-combination order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from formcert.groebner import Ideal, LinearConstraint, degree_bounded_linear_solve
from formcert.ring import RingContextError


class NoSolutionAtDegreeError(RuntimeError):
    """The polynomial ansatz up to the given degree admits no solution.

    This does not mean the field fails to exist; callers may raise the bound.
    """

    def __init__(self, degree):
        super().__init__("no solution with components of degree <= %d" % degree)
        self.degree = degree


class FormTuple:
    """q forms sum_j M[i][j] dx_j over the ring's space variables."""

    def __init__(self, ring, rows):
        space = ring.space_variables
        self.ring = ring
        self.n = len(space)
        self.rows = tuple(tuple(r) for r in rows)
        self.q = len(self.rows)
        for row in self.rows:
            if len(row) != self.n:
                raise ValueError("row length %d != n = %d" % (len(row), self.n))
            for p in row:
                if p.ring != ring:
                    raise RingContextError("form entry in wrong ring")

    def __eq__(self, other):
        return (
            isinstance(other, FormTuple)
            and self.ring == other.ring
            and self.rows == other.rows
        )

    def __repr__(self):
        return "FormTuple(q=%d, n=%d)" % (self.q, self.n)

    def replace_row(self, k, row):
        rows = list(self.rows)
        rows[k] = tuple(row)
        return FormTuple(self.ring, rows)

    def map_to(self, ring):
        return FormTuple(ring, [[p.map_to(ring) for p in r] for r in self.rows])

    def subs(self, values):
        return FormTuple(self.ring, [[p.subs(values) for p in r] for r in self.rows])


class VectorField:
    """L = sum_j components[j] d/dx_j."""

    def __init__(self, ring, components):
        self.ring = ring
        self.components = tuple(components)
        if len(self.components) != len(ring.space_variables):
            raise ValueError("component count does not match space dimension")
        for p in self.components:
            if p.ring != ring:
                raise RingContextError("field component in wrong ring")

    def __eq__(self, other):
        return (
            isinstance(other, VectorField)
            and self.ring == other.ring
            and self.components == other.components
        )

    def __repr__(self):
        return "VectorField(%s)" % (", ".join(str(c) for c in self.components),)

    def map_to(self, ring):
        return VectorField(ring, [c.map_to(ring) for c in self.components])

    def apply(self, p):
        """Lie derivative L(p)."""
        if p.ring != self.ring:
            raise RingContextError("polynomial in wrong ring")
        acc = self.ring.zero
        for comp, var in zip(self.components, self.ring.space_variables):
            if not comp.is_zero():
                acc = acc + comp * p.diff(var.name)
        return acc

    def iterate(self, p, k):
        """k-fold Lie derivative L^k(p)."""
        for _ in range(k):
            p = self.apply(p)
        return p


@dataclass
class DegeneracyLocus:
    """Row subset plus the ideal of its n x n minors (zeros kept in `minors`)."""

    subset: tuple
    minors: tuple
    ideal: Ideal


def lie_derivative(L, p):
    return L.apply(p)


def iterated_lie(L, p, k):
    return L.iterate(p, k)


def contract(row, L):
    """Pairing of one form row with a vector field: sum_j M[j] * L_j."""
    acc = L.ring.zero
    for m, c in zip(row, L.components):
        acc = acc + m * c
    return acc


def exterior_derivative(f):
    """Row of partials of ``f`` with respect to the space variables."""
    return tuple(f.diff(v.name) for v in f.ring.space_variables)


def determinant(matrix):
    """Exact determinant by cofactor expansion (desk-scale n)."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    ring = matrix[0][0].ring
    if n == 1:
        return matrix[0][0]
    acc = ring.zero
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        sub = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = entry * determinant(sub)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def minors_of_rows(forms, rows):
    """All n x n minors of the selected rows, in fixed combination order."""
    n = forms.n
    out = []
    for combo in itertools.combinations(sorted(rows), n):
        out.append(determinant([list(forms.rows[i]) for i in combo]))
    return out


def degeneracy_ideal(forms, subset):
    """Locus where the selected forms drop below rank n."""
    subset = tuple(sorted(subset))
    if len(subset) < forms.n:
        raise ValueError("need at least n = %d rows, got %d" % (forms.n, len(subset)))
    minors = tuple(minors_of_rows(forms, subset))
    return DegeneracyLocus(subset, minors, Ideal(forms.ring, minors))


def full_degeneracy_ideal(forms, exclude):
    """Locus where the rows other than ``exclude`` drop below rank n.

    One ideal generated by the union of all minors of all n-subsets of the
    remaining rows; it cuts out the same set as the intersection of the
    per-subset loci, which is all the downstream verdicts need.
    """
    remaining = tuple(i for i in range(forms.q) if i != exclude)
    if len(remaining) < forms.n:
        raise ValueError("fewer than n rows remain after excluding %d" % exclude)
    minors = tuple(minors_of_rows(forms, remaining))
    return DegeneracyLocus(remaining, minors, Ideal(forms.ring, minors))


def verify_full_rank(forms):
    """True iff the forms have rank n at every complex point, with certificate.

    The check is unit-ideal membership for the ideal of all n x n minors of
    all row subsets; over an algebraically closed field this is exactly
    emptiness of the degeneracy locus.
    """
    locus = degeneracy_ideal(forms, range(forms.q))
    ok, cert = locus.ideal.is_unit()
    return ok, cert, locus


def construct_field_on_sigma(forms, k, sigma, degree, max_increment=4):
    """Field L with phi_j L = 0 (j != k) and phi_k L = 1 on Sigma.

    Components are found by exact degree-bounded linear solving, starting at
    ``degree`` and raising the ansatz up to ``max_increment`` more before
    giving up with :class:`NoSolutionAtDegreeError`.

    Returns ``(L, certificates)`` where certificates[i] witnesses the i-th
    contraction condition modulo ``sigma``.
    """
    ring = forms.ring
    unit, _ = sigma.is_unit()
    if unit:
        # empty locus: every condition holds vacuously
        zero_field = VectorField(ring, [ring.zero] * forms.n)
        return zero_field, _contraction_certificates(forms, k, zero_field, sigma)
    names = ["L%d" % (j + 1) for j in range(forms.n)]
    last = degree + max_increment
    for d in range(degree, last + 1):
        constraints = []
        for i in range(forms.q):
            terms = tuple((forms.rows[i][j], names[j]) for j in range(forms.n))
            target = ring.one if i == k else ring.zero
            constraints.append(LinearConstraint(terms, target, sigma))
        sol = degree_bounded_linear_solve(ring, constraints, d)
        if sol is not None:
            L = VectorField(ring, [sol[n] for n in names])
            return L, _contraction_certificates(forms, k, L, sigma)
    raise NoSolutionAtDegreeError(last)


def _contraction_certificates(forms, k, L, sigma):
    certs = []
    ring = forms.ring
    for i in range(forms.q):
        value = contract(forms.rows[i], L)
        target = value - (ring.one if i == k else ring.zero)
        cert = sigma.membership(target)
        if cert is None:
            raise AssertionError("contraction condition violated for row %d" % i)
        certs.append(cert)
    return certs


def is_exact_row(row):
    """Primitive f with df equal to the row, or None if the row is not closed.

    Works over the space variables only; entries must not involve homotopy or
    parameter variables.
    """
    if not row:
        return None
    ring = row[0].ring
    space = [v.name for v in ring.space_variables]
    for p in row:
        if p.variables_used() - set(space):
            return None
    for i in range(len(space)):
        for j in range(i + 1, len(space)):
            if row[i].diff(space[j]) != row[j].diff(space[i]):
                return None
    # integrate coordinate by coordinate
    f = ring.zero
    for i, name in enumerate(space):
        residual = row[i] - f.diff(name)
        f = f + residual.integrate(name)
    for i, name in enumerate(space):
        if f.diff(name) != row[i]:
            raise AssertionError("integration of a closed row failed")
    return f
