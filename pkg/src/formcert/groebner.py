"""Buchberger engine with cofactor tracking.

Every reduction remembers how its output is expressed in the original
generators, so each verdict (normal form, membership, unit ideal) can hand
back a :class:`MembershipCertificate` that re-verifies by ring arithmetic
alone, with no Groebner machinery involved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from formcert.ring import Poly

DEFAULT_MAX_PAIRS = 200_000
DEFAULT_MAX_DEGREE = 40


class ResourceLimitError(RuntimeError):
    """Degree or S-pair budget exceeded; never a wrong verdict."""


@dataclass(frozen=True)
class MembershipCertificate:
    """Witness that ``target = sum(cofactor * generators[index])`` exactly.

    ``cofactors`` pairs generator indices with polynomial cofactors; indices
    refer to ``generators``.
    """

    target: Poly
    cofactors: tuple
    generators: tuple

    def expand(self):
        acc = self.target.ring.zero
        for idx, cof in self.cofactors:
            acc = acc + cof * self.generators[idx]
        return acc

    def verify(self):
        return self.expand() == self.target


def _mono_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _mono_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


class Ideal:
    """Finitely generated polynomial ideal with a cached reduced basis.

    The zero ideal is represented by an empty generator list; zero generators
    passed to the constructor are dropped.
    """

    def __init__(self, ring, generators, max_pairs=DEFAULT_MAX_PAIRS,
                 max_degree=DEFAULT_MAX_DEGREE):
        self.ring = ring
        gens = []
        for g in generators:
            if g.ring != ring:
                g = g.map_to(ring)
            if not g.is_zero():
                gens.append(g)
        self.generators = tuple(gens)
        self.max_pairs = max_pairs
        self.max_degree = max_degree
        self._basis = None          # list[Poly], reduced GB, monic
        self._basis_cofactors = None  # parallel list of cofactor tuples

    def __repr__(self):
        return "Ideal(%s)" % (", ".join(str(g) for g in self.generators) or "0")

    # --- basis ---------------------------------------------------------------

    def reduced_basis(self):
        """The unique monic reduced Groebner basis for the ring's order."""
        self._compute()
        return list(self._basis)

    def basis_certificates(self):
        """Membership certificate of each basis element in the generators."""
        self._compute()
        certs = []
        for b, cof in zip(self._basis, self._basis_cofactors):
            pairs = tuple((i, c) for i, c in enumerate(cof) if not c.is_zero())
            certs.append(MembershipCertificate(b, pairs, self.generators))
        return certs

    def _compute(self):
        if self._basis is not None:
            return
        basis, cofs = _buchberger(
            self.ring, self.generators, self.max_pairs, self.max_degree
        )
        self._basis = basis
        self._basis_cofactors = cofs

    # --- verdicts ------------------------------------------------------------

    def normal_form(self, p):
        """Unique reduced normal form plus a certificate for ``p - remainder``."""
        if p.ring != self.ring:
            p = p.map_to(self.ring)
        self._compute()
        rem, quots = _reduce_full(p, self._basis, self.max_degree)
        # cofactors over the original generators
        acc = [self.ring.zero] * len(self.generators)
        for q, cof in zip(quots, self._basis_cofactors):
            if q.is_zero():
                continue
            for i, c in enumerate(cof):
                if not c.is_zero():
                    acc[i] = acc[i] + q * c
        pairs = tuple((i, c) for i, c in enumerate(acc) if not c.is_zero())
        cert = MembershipCertificate(p - rem, pairs, self.generators)
        return rem, cert

    def membership(self, p):
        """Certificate if ``p`` lies in the ideal, else None."""
        rem, cert = self.normal_form(p)
        if rem.is_zero():
            return cert
        return None

    def is_unit(self):
        """(verdict, certificate-for-1-or-None).

        True iff 1 is in the ideal, i.e. the complex variety is empty.
        """
        self._compute()
        if len(self._basis) == 1 and self._basis[0] == self.ring.one:
            cert = self.membership(self.ring.one)
            return True, cert
        return False, None

    def contains_ideal(self, other):
        return all(self.membership(g) is not None for g in other.generators)


def ideal_equal(a, b):
    """Equality of ideals via identical reduced bases."""
    if a.ring != b.ring:
        raise ValueError("ideals live in different rings")
    return a.reduced_basis() == b.reduced_basis()


# --- Buchberger internals ----------------------------------------------------


def _reduce_full(p, basis, max_degree):
    """Fully reduce every term of ``p`` by ``basis``; track quotients."""
    ring = p.ring
    quots = [ring.zero] * len(basis)
    rem = ring.zero
    work = p
    lms = [b.leading_monomial() for b in basis]
    while not work.is_zero():
        if work.total_degree() > max_degree:
            raise ResourceLimitError(
                "intermediate degree %d exceeds budget %d"
                % (work.total_degree(), max_degree)
            )
        wm = work.leading_monomial()
        wc = work.leading_coefficient()
        hit = None
        for i, lm in enumerate(lms):
            if _mono_divides(lm, wm):
                hit = i
                break
        if hit is None:
            lt = work.leading_term()
            rem = rem + lt
            work = work - lt
        else:
            factor = ring.monomial(
                _mono_div(wm, lms[hit]), wc / basis[hit].leading_coefficient()
            )
            quots[hit] = quots[hit] + factor
            work = work - factor * basis[hit]
    return rem, quots


def _buchberger(ring, generators, max_pairs, max_degree):
    """Reduced Groebner basis with cofactors over ``generators``."""
    ngens = len(generators)
    if ngens == 0:
        return [], []

    # working basis: list of (poly, cofactor list)
    G = []
    for i, g in enumerate(generators):
        cof = [ring.zero] * ngens
        cof[i] = ring.one
        lc = g.leading_coefficient()
        G.append((g.scale(1 / lc), [c.scale(1 / lc) for c in cof]))

    pairs = [(i, j) for i in range(len(G)) for j in range(i + 1, len(G))]

    def pair_key(ij):
        i, j = ij
        lcm = _mono_lcm(G[i][0].leading_monomial(), G[j][0].leading_monomial())
        return (sum(lcm), ring.monomial_key(lcm), i, j)

    processed = set()
    count = 0
    while pairs:
        pairs.sort(key=pair_key)
        i, j = pairs.pop(0)
        processed.add((i, j))
        count += 1
        if count > max_pairs:
            raise ResourceLimitError("S-pair budget %d exceeded" % (max_pairs,))
        gi, gj = G[i][0], G[j][0]
        lmi, lmj = gi.leading_monomial(), gj.leading_monomial()
        lcm = _mono_lcm(lmi, lmj)
        # product criterion
        if lcm == tuple(a + b for a, b in zip(lmi, lmj)):
            continue
        # chain criterion
        skip = False
        for k in range(len(G)):
            if k in (i, j):
                continue
            if _mono_divides(G[k][0].leading_monomial(), lcm):
                a = (min(i, k), max(i, k))
                b = (min(j, k), max(j, k))
                if a in processed and b in processed:
                    skip = True
                    break
        if skip:
            continue
        fi = ring.monomial(_mono_div(lcm, lmi), 1)
        fj = ring.monomial(_mono_div(lcm, lmj), 1)
        s = fi * gi - fj * gj
        s_cof = [fi * a - fj * b for a, b in zip(G[i][1], G[j][1])]
        rem, quots = _reduce_full(s, [g for g, _ in G], max_degree)
        if rem.is_zero():
            continue
        cof = s_cof
        for q, (_, gc) in zip(quots, G):
            if q.is_zero():
                continue
            cof = [c - q * d for c, d in zip(cof, gc)]
        lc = rem.leading_coefficient()
        new = (rem.scale(1 / lc), [c.scale(1 / lc) for c in cof])
        G.append(new)
        k = len(G) - 1
        pairs.extend((m, k) for m in range(k))

    # interreduce to the unique reduced basis
    changed = True
    while changed:
        changed = False
        for idx in range(len(G)):
            others = [G[m][0] for m in range(len(G)) if m != idx]
            if not others:
                continue
            rem, quots = _reduce_full(G[idx][0], others, max_degree)
            if rem == G[idx][0]:
                continue
            changed = True
            cof = list(G[idx][1])
            oc = [G[m][1] for m in range(len(G)) if m != idx]
            for q, gc in zip(quots, oc):
                if q.is_zero():
                    continue
                cof = [c - q * d for c, d in zip(cof, gc)]
            if rem.is_zero():
                del G[idx]
            else:
                lc = rem.leading_coefficient()
                G[idx] = (rem.scale(1 / lc), [c.scale(1 / lc) for c in cof])
            break

    G.sort(key=lambda e: ring.monomial_key(e[0].leading_monomial()), reverse=True)
    return [g for g, _ in G], [c for _, c in G]


# --- degree-bounded linear solving -------------------------------------------


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coeff * unknown) == target`` modulo ``modulus`` (None = exact)."""

    terms: tuple  # of (Poly coefficient, str unknown-name)
    target: Poly
    modulus: object = None  # Ideal or None


def monomials_up_to(ring, degree, variables=None):
    """All monomials of total degree <= degree, deterministic order."""
    if variables is None:
        variables = [v.name for v in ring.variables]
    idxs = [ring.index(n) for n in variables]
    out = []
    for degs in itertools.product(range(degree + 1), repeat=len(idxs)):
        if sum(degs) > degree:
            continue
        e = [0] * ring.nvars
        for i, d in zip(idxs, degs):
            e[i] = d
        out.append(tuple(e))
    out.sort(key=ring.monomial_key)
    return out


def degree_bounded_linear_solve(ring, constraints, degree, variables=None):
    """Solve for unknown polynomials of degree <= ``degree``.

    Constraints are linear in the unknowns with polynomial coefficients, each
    holding exactly or modulo an ideal.  Reduces to one rational linear system
    on monomial coefficients.  Returns ``{name: Poly}`` or None.
    """
    monos = monomials_up_to(ring, degree, variables)
    names = []
    for c in constraints:
        for _, u in c.terms:
            if u not in names:
                names.append(u)
    columns = [(u, m) for u in names for m in monos]
    col_index = {cm: i for i, cm in enumerate(columns)}

    rows = []
    rhs = []
    for c in constraints:
        # residual coefficients, linear in the unknowns
        contrib = {}  # monomial of residual -> row dict col->Fraction
        def bump(poly, col, sign=1):
            for e, k in poly.terms:
                row = contrib.setdefault(e, {})
                row[col] = row.get(col, Fraction(0)) + sign * k

        for coeff, u in c.terms:
            for m in monos:
                prod = coeff * ring.monomial(m, 1)
                if c.modulus is not None:
                    prod, _ = c.modulus.normal_form(prod)
                bump(prod, col_index[(u, m)])
        target = c.target
        if c.modulus is not None:
            target, _ = c.modulus.normal_form(target)
        tvals = dict(target.terms)
        for e in set(contrib) | set(tvals):
            rowdict = contrib.get(e, {})
            row = [Fraction(0)] * len(columns)
            for col, v in rowdict.items():
                row[col] = v
            rows.append(row)
            rhs.append(tvals.get(e, Fraction(0)))

    from formcert import linalg

    if not rows:
        sol = [Fraction(0)] * len(columns)
    else:
        sol = linalg.solve(rows, rhs)
    if sol is None:
        return None
    result = {}
    for u in names:
        d = {}
        for m in monos:
            v = sol[col_index[(u, m)]]
            if v:
                d[m] = v
        result[u] = ring.from_dict(d)
    return result
