"""Tangency order and semi-transversality of a field along a variety.

The central object is the ascending ideal chain I_0 = J(Sigma),
I_{k+1} = I_k + (L g : g generator of I_k).  The chain reaching the unit
ideal certifies finite tangency order globally; stabilization short of the
unit ideal exhibits the locus where no finite-order witness exists.

Genericity arguments are replaced throughout by seeded random draws followed
by exact re-verification; a draw that fails verification is reported, never
silently accepted.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from formcert import geometry
from formcert.grid import sup_norm
from formcert.groebner import Ideal, MembershipCertificate, ideal_equal

DEFAULT_MAX_STEPS = 16

REACHED_UNIT = "reached_unit"
STABILIZED = "stabilized"
BUDGET_EXCEEDED = "budget_exceeded"


@dataclass
class TangencyChain:
    ideals: list
    status: str
    order: int = None          # set when status == REACHED_UNIT
    stabilized: Ideal = None   # set when status == STABILIZED


@dataclass(frozen=True)
class NotSemiTransversal:
    """Stabilized locus on whose variety every witness has infinite order."""

    locus: Ideal


@dataclass
class TangencyCertificate:
    """Functions vanishing on Sigma whose iterated Lie derivatives generate 1.

    ``labels`` names each generator of the unit certificate: ``("f", j, k)``
    is the k-th Lie derivative of ``functions[j]``; ``("sigma", m)`` is the
    m-th generator of Sigma itself (used only in the empty-locus case).
    """

    functions: tuple
    order: int
    labels: tuple
    unit_certificate: MembershipCertificate
    membership_certificates: tuple  # functions[j] in J(Sigma)

    def verify(self):
        if not self.unit_certificate.verify():
            return False
        return all(c.verify() for c in self.membership_certificates)


@dataclass
class PerturbationRecord:
    perturbation: object          # Poly f, possibly zero
    factors: tuple                # product decomposition: (r, g_1, ..., g_{n+2})
    target_index: int
    seed: int
    retries: int
    verdict: str
    scaling: object = None        # Fraction applied to meet the eps budget


class RetriesExhaustedError(RuntimeError):
    def __init__(self, seeds):
        super().__init__(
            "no verified perturbation after %d seeded draws" % len(seeds)
        )
        self.seeds = tuple(seeds)


class MaxRoundsExceededError(RuntimeError):
    def __init__(self, locus, records):
        super().__init__("reduction loop exhausted its round budget")
        self.locus = locus
        self.records = tuple(records)


def tangency_chain(sigma, L, max_steps=DEFAULT_MAX_STEPS):
    """Compute the chain until unit, stabilization, or the step budget."""
    ring = sigma.ring
    ideals = [sigma]
    unit, _ = sigma.is_unit()
    if unit:
        return TangencyChain(ideals, REACHED_UNIT, order=0)
    current = sigma
    for step in range(1, max_steps + 1):
        gens = current.reduced_basis()
        new_gens = list(gens)
        for g in gens:
            lg = L.apply(g)
            if not lg.is_zero():
                new_gens.append(lg)
        nxt = Ideal(ring, new_gens,
                    max_pairs=sigma.max_pairs, max_degree=sigma.max_degree)
        ideals.append(nxt)
        unit, _ = nxt.is_unit()
        if unit:
            return TangencyChain(ideals, REACHED_UNIT, order=step)
        if ideal_equal(current, nxt):
            return TangencyChain(ideals, STABILIZED, stabilized=current)
        current = nxt
    return TangencyChain(ideals, BUDGET_EXCEEDED)


def tangency_order(sigma, L, max_steps=DEFAULT_MAX_STEPS):
    """Least N with 1 in I_N, or the stabilized locus as a failure witness.

    Raises :class:`formcert.groebner.ResourceLimitError`-style budget errors
    through; a BUDGET_EXCEEDED chain is returned as an indeterminate
    NotSemiTransversal carrying the last ideal (reported as such upstream).
    """
    chain = tangency_chain(sigma, L, max_steps)
    if chain.status == REACHED_UNIT:
        return chain.order
    if chain.status == STABILIZED:
        return NotSemiTransversal(chain.stabilized)
    return NotSemiTransversal(chain.ideals[-1])


def extract_certificate(chain, sigma, L):
    """Greedy unit-ideal certificate over iterated Lie derivatives.

    Requires a chain that reached the unit ideal.  Starts from all of Sigma's
    generators and drops those whose removal keeps the unit certificate.
    """
    if chain.status != REACHED_UNIT:
        raise ValueError("certificate extraction needs a chain that reached 1")
    ring = sigma.ring
    N = chain.order
    if N == 0:
        ok, cert = sigma.is_unit()
        assert ok
        labels = tuple(("sigma", m) for m in range(len(sigma.generators)))
        return TangencyCertificate((), 0, labels, cert, ())

    def unit_cert_for(funcs):
        labels = tuple(
            ("f", j, k) for j in range(len(funcs)) for k in range(N + 1)
        )
        gens = [L.iterate(funcs[j], k) for (_, j, k) in labels]
        ideal = Ideal(ring, gens,
                      max_pairs=sigma.max_pairs, max_degree=sigma.max_degree)
        ok, cert = ideal.is_unit()
        if not ok:
            return None
        # re-index the certificate over the full (possibly zero) gen list
        index_map = {}
        pos = 0
        for i, g in enumerate(gens):
            if not g.is_zero():
                index_map[pos] = i
                pos += 1
        pairs = tuple((index_map[i], c) for i, c in cert.cofactors)
        full = MembershipCertificate(ring.one, pairs, tuple(gens))
        return labels, full

    funcs = list(sigma.generators)
    got = unit_cert_for(funcs)
    if got is None:
        raise AssertionError("chain reached unit but derivative ideal did not")
    # greedy minimization of the function count
    i = 0
    while i < len(funcs) and len(funcs) > 1:
        trial = funcs[:i] + funcs[i + 1:]
        trial_cert = unit_cert_for(trial)
        if trial_cert is not None:
            funcs = trial
            got = trial_cert
        else:
            i += 1
    labels, cert = got
    member = tuple(
        MembershipCertificate(
            f, ((sigma.generators.index(f), ring.one),), sigma.generators
        )
        for f in funcs
    )
    return TangencyCertificate(tuple(funcs), N, labels, cert, member)


# --- randomized perturbation -------------------------------------------------


def _child_rng(seed, attempt):
    return random.Random(seed * 1_000_003 + attempt)


def _random_poly(rng, ring, degree):
    from formcert.groebner import monomials_up_to

    names = [v.name for v in ring.space_variables]
    monos = monomials_up_to(ring, degree, names)
    while True:
        d = {}
        for m in monos:
            c = rng.randint(-3, 3)
            if c:
                d[m] = c
        p = ring.from_dict(d)
        if not p.is_zero():
            return p


def _order_off_locus(sigma, sigma_prime_gens, L, n, max_power=3):
    """Finite order on the complement of Sigma': power-adjoining test.

    Sound but incomplete stand-in for localization: success means the chain
    of Sigma + (Sigma')^c reaches the unit ideal within n+1 steps for some
    power c <= max_power.
    """
    ring = sigma.ring
    gens_nonzero = [g for g in sigma_prime_gens if not g.is_zero()]
    if not gens_nonzero:
        return False
    for c in range(1, max_power + 1):
        powers = [
            _product(ring, combo)
            for combo in itertools.combinations_with_replacement(gens_nonzero, c)
        ]
        start = Ideal(ring, list(sigma.generators) + powers,
                      max_pairs=sigma.max_pairs, max_degree=sigma.max_degree)
        chain = tangency_chain(start, L, max_steps=n + 1)
        if chain.status == REACHED_UNIT:
            return True
    return False


def _product(ring, polys):
    acc = ring.one
    for p in polys:
        acc = acc * p
    return acc


def perturb_for_semitransversality(forms, k, sigma_prime, K, eps, seed,
                                   max_retries=10, poly_degree=1,
                                   max_halvings=64, field_degree_cap=4):
    """Seeded random exact perturbation of one form by a differential.

    Adds df to a target row not involved in Sigma', with
    f = r * g_1 * ... * g_{n+2} built from Sigma' generators so that
    f lies in J(Sigma')^{n+2} by construction, scaled until every component
    of df stays below eps on K.  Acceptance is a posteriori: the perturbed
    configuration must have finite tangency order off Sigma' (power-adjoining
    test).  Returns ``(record, new_forms)`` or raises RetriesExhaustedError.
    """
    ring = forms.ring
    n = forms.n
    candidates = [
        i for i in range(forms.q) if i != k and i not in sigma_prime.subset
    ]
    if not candidates:
        raise ValueError("no row available to perturb outside Sigma'")
    target = candidates[0]

    # idempotent success: nothing to do if the order is already finite
    sigma = geometry.full_degeneracy_ideal(forms, k)
    try:
        L, _ = geometry.construct_field_on_sigma(
            forms, k, sigma.ideal, _start_degree(forms), field_degree_cap
        )
    except geometry.NoSolutionAtDegreeError:
        L = None
    if L is not None and isinstance(tangency_order(sigma.ideal, L), int):
        record = PerturbationRecord(
            ring.zero, (), target, seed, 0, "accepted-zero"
        )
        return record, forms

    # vacuous case: Sigma' empty means there is no complement to improve
    sp_unit, _ = sigma_prime.ideal.is_unit()
    if sp_unit:
        record = PerturbationRecord(
            ring.zero, (), target, seed, 0, "accepted-vacuous"
        )
        return record, forms

    gens = [g for g in sigma_prime.minors if not g.is_zero()]
    if not gens or eps <= 0:
        raise RetriesExhaustedError([seed])

    seeds_tried = []
    for attempt in range(max_retries):
        rng = _child_rng(seed, attempt)
        seeds_tried.append(seed * 1_000_003 + attempt)
        picks = [gens[rng.randrange(len(gens))] for _ in range(n + 2)]
        r = _random_poly(rng, ring, poly_degree)
        f = _product(ring, [r] + picks)
        # scale df under the eps budget on K
        from fractions import Fraction

        scale = Fraction(1)
        halvings = 0
        while True:
            df = geometry.exterior_derivative(f.scale(scale))
            worst = max((sup_norm(c, K) for c in df), default=Fraction(0))
            if worst < eps:
                break
            scale /= 2
            halvings += 1
            if halvings > max_halvings:
                scale = None
                break
        if scale is None:
            continue
        f = f.scale(scale)
        df = geometry.exterior_derivative(f)
        new_row = tuple(a + b for a, b in zip(forms.rows[target], df))
        new_forms = forms.replace_row(target, new_row)
        new_sigma = geometry.full_degeneracy_ideal(new_forms, k)
        try:
            new_L, _ = geometry.construct_field_on_sigma(
                new_forms, k, new_sigma.ideal, _start_degree(new_forms),
                field_degree_cap,
            )
        except geometry.NoSolutionAtDegreeError:
            continue
        if _order_off_locus(new_sigma.ideal, sigma_prime.minors, new_L, n):
            record = PerturbationRecord(
                f, tuple([r.scale(scale)] + picks), target, seed,
                attempt + 1, "accepted", scale,
            )
            return record, new_forms
    raise RetriesExhaustedError(seeds_tried)


def _start_degree(forms):
    return max(
        (p.total_degree() for row in forms.rows for p in row if not p.is_zero()),
        default=0,
    )


def reduction_loop(forms, k, K, eps, seed, max_rounds=4, max_retries=10):
    """Iterate perturbations until the full locus has finite tangency order.

    Cycles through the (n-1)-subsets of the remaining rows (each joined with
    row k to form Sigma'), splitting the eps budget as eps/2^round.
    """
    from fractions import Fraction

    ok, _, _ = geometry.verify_full_rank(forms)
    if not ok:
        raise ValueError("input forms are not of full rank everywhere")
    records = []
    n = forms.n
    for rnd in range(max_rounds + 1):
        sigma = geometry.full_degeneracy_ideal(forms, k)
        unit, _ = sigma.ideal.is_unit()
        if unit:
            return forms, records
        try:
            L, _ = geometry.construct_field_on_sigma(
                forms, k, sigma.ideal, _start_degree(forms)
            )
        except geometry.NoSolutionAtDegreeError:
            raise MaxRoundsExceededError(sigma.ideal, records)
        if isinstance(tangency_order(sigma.ideal, L), int):
            return forms, records
        if rnd == max_rounds:
            break
        remaining = [i for i in range(forms.q) if i != k]
        budget = Fraction(eps) / 2 ** (rnd + 1)
        advanced = False
        for subset in itertools.combinations(remaining, n - 1):
            rows = tuple(sorted(subset + (k,)))
            if len(rows) < n:
                continue
            sigma_prime = geometry.degeneracy_ideal(forms, rows)
            if not [i for i in remaining if i not in sigma_prime.subset]:
                continue
            sp_unit, _ = sigma_prime.ideal.is_unit()
            if sp_unit:
                continue  # empty Sigma': nothing off it to improve
            try:
                record, forms = perturb_for_semitransversality(
                    forms, k, sigma_prime, K, budget, seed + rnd,
                    max_retries=max_retries,
                )
            except RetriesExhaustedError:
                continue
            if not record.perturbation.is_zero():
                records.append(record)
                advanced = True
        if not advanced:
            break
    sigma = geometry.full_degeneracy_ideal(forms, k)
    raise MaxRoundsExceededError(sigma.ideal, records)
