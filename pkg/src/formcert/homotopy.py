"""Rank-preserving homotopies: replacement segments, verification, driver.

A homotopy is a list of segments, each a form tuple over the ring extended
by the homotopy variable t, covering equal slices of [0,1] after affine
reparameterization.  Rank along a segment is certified by the stronger
statement that the ideal of all n x n minors is the unit ideal over all
complex (x, t); when that fails the verdict degrades to exact sampling on a
rational grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from formcert import geometry, semitrans, solver
from formcert.grid import GridSpec, unit_interval_points
from formcert.groebner import Ideal, ResourceLimitError
from formcert.ring import KIND_HOMOTOPY, Variable

T_NAME = "t"

UNIT_CERTIFIED = "unit_certified"
SAMPLED_ONLY = "sampled_only"
FAILED = "failed"


@dataclass
class Segment:
    """One homotopy piece: forms over Q[x, t], local parameter t in [0,1]."""

    forms: object        # FormTuple over the t-extended ring
    base_ring: object

    def at(self, t_value):
        """Form tuple in the base ring at a fixed local parameter value."""
        sub = self.forms.subs({T_NAME: Fraction(t_value)})
        return sub.map_to(self.base_ring)

    @property
    def start(self):
        return self.at(0)

    @property
    def end(self):
        return self.at(1)


@dataclass
class Homotopy:
    segments: list

    @property
    def start(self):
        return self.segments[0].start

    @property
    def end(self):
        return self.segments[-1].end

    def intervals(self):
        m = len(self.segments)
        return [(Fraction(i, m), Fraction(i + 1, m)) for i in range(m)]

    def check_endpoints(self):
        for a, b in zip(self.segments, self.segments[1:]):
            if a.end != b.start:
                return False
        return True


class EndpointMismatchError(ValueError):
    pass


@dataclass
class RankReport:
    verdict: str
    certificates: tuple = ()        # per-segment unit certificates
    min_abs_minor: Fraction = None  # sampled fallback
    witness: tuple = None           # (point dict, t value) where rank drops
    resource_limited: bool = False


def _t_ring(ring):
    return ring.extend([Variable(T_NAME, KIND_HOMOTOPY)])


def replacement_segment(forms, k, f):
    """Row k moves along (1 - t) phi_k + t df; other rows are constant."""
    ring = forms.ring
    tr = _t_ring(ring)
    t = tr.var(T_NAME)
    one_minus_t = tr.one - t
    df = [p.map_to(tr) for p in geometry.exterior_derivative(f)]
    rows = []
    for i, row in enumerate(forms.rows):
        lifted = [p.map_to(tr) for p in row]
        if i == k:
            lifted = [one_minus_t * a + t * b for a, b in zip(lifted, df)]
        rows.append(lifted)
    return Segment(geometry.FormTuple(tr, rows), ring)


def perturbation_segment(forms, target, f):
    """Row ``target`` moves along phi + t df; an exact perturbation path."""
    ring = forms.ring
    tr = _t_ring(ring)
    t = tr.var(T_NAME)
    df = [p.map_to(tr) for p in geometry.exterior_derivative(f)]
    rows = []
    for i, row in enumerate(forms.rows):
        lifted = [p.map_to(tr) for p in row]
        if i == target:
            lifted = [a + t * b for a, b in zip(lifted, df)]
        rows.append(lifted)
    return Segment(geometry.FormTuple(tr, rows), ring)


def conjoin(h1, h2):
    """Concatenate homotopies; endpoints must match bitwise."""
    if h1.segments and h2.segments and h1.end != h2.start:
        raise EndpointMismatchError("homotopy endpoints do not match")
    return Homotopy(h1.segments + h2.segments)


def verify_rank(homotopy, K=None, t_samples=9):
    """Certify rank n over the whole parameter range, or sample honestly.

    Unit-ideal success covers all complex (x, t), hence t in [0,1] a
    fortiori.  The sampling fallback reports, over grid x and t points, the
    minimum over points of the largest absolute n x n minor, or a witness
    point where every minor vanishes.
    """
    segments = (
        homotopy.segments if isinstance(homotopy, Homotopy) else [homotopy]
    )
    certs = []
    pending = []
    resource_limited = False
    for seg in segments:
        try:
            ok, cert, _ = geometry.verify_full_rank(seg.forms)
        except ResourceLimitError:
            ok, cert = False, None
            resource_limited = True
        if ok:
            certs.append(cert)
        else:
            pending.append(seg)
    if not pending:
        return RankReport(UNIT_CERTIFIED, tuple(certs))

    if K is None:
        n = len(segments[0].base_ring.space_variables)
        K = GridSpec((0,) * n, (1,) * n, 5)
    names = [v.name for v in segments[0].base_ring.space_variables]
    best = None
    for seg in pending:
        minors = geometry.minors_of_rows(
            seg.forms, range(seg.forms.q)
        )
        for pt in K.points():
            for tv in unit_interval_points(t_samples):
                values = dict(zip(names, pt))
                values[T_NAME] = tv
                largest = max(abs(m.eval(values)) for m in minors)
                if largest == 0:
                    return RankReport(
                        FAILED,
                        tuple(certs),
                        witness=(dict(zip(names, pt)), tv),
                        resource_limited=resource_limited,
                    )
                if best is None or largest < best:
                    best = largest
    return RankReport(
        SAMPLED_ONLY, tuple(certs), min_abs_minor=best,
        resource_limited=resource_limited,
    )


def verify_contraction_invariance(segment, L, sigma, k):
    """phi_{k,t} L - phi_k L stays in Sigma * Q[x, t], with certificate."""
    tr = segment.forms.ring
    L_t = L.map_to(tr)
    row_t = segment.forms.rows[k]
    row_0 = [p.map_to(tr) for p in segment.start.rows[k]]
    diff = geometry.contract(row_t, L_t) - geometry.contract(row_0, L_t)
    lifted = Ideal(tr, [g.map_to(tr) for g in sigma.generators])
    cert = lifted.membership(diff)
    return cert is not None, cert


# --- full pipeline -----------------------------------------------------------


@dataclass
class StepReport:
    k: int
    skipped_exact: bool = False
    sigma_generators: tuple = ()
    perturbations: tuple = ()
    vector_field: object = None
    tangency_certificate: object = None
    solution: object = None
    rank_report: object = None
    contraction_ok: bool = None
    approximation: dict = field(default_factory=dict)


@dataclass
class PipelineResult:
    homotopy: Homotopy
    primitives: list
    final_forms: object
    steps: list
    success: bool
    failed_stage: str = None
    failure: str = None


def replace_all_forms(forms, K, eps, seed, max_rounds=4, max_retries=10,
                      degree_cap=4, g_primitives=None, order=None,
                      max_steps=semitrans.DEFAULT_MAX_STEPS):
    """Replace every form by a differential through rank-preserving segments.

    Processes rows in ascending order (configurable); rows that already are
    differentials keep their primitive and contribute a constant segment.
    Honest failures from any stage abort with partial progress recorded.
    """
    if forms.q <= forms.n:
        raise ValueError(
            "q must exceed n: replacing a form with q <= n is the open case"
        )
    ok, _, _ = geometry.verify_full_rank(forms)
    if not ok:
        raise ValueError("input forms are not of full rank everywhere")

    ring = forms.ring
    order = list(order) if order is not None else list(range(forms.q))
    homotopy = Homotopy([])
    primitives = [None] * forms.q
    steps = []
    current = forms

    def fail(step, stage, message):
        steps.append(step)
        return PipelineResult(
            homotopy, primitives, current, steps, False, stage, message
        )

    for k in order:
        step = StepReport(k)
        primitive = geometry.is_exact_row(current.rows[k])
        if primitive is not None:
            step.skipped_exact = True
            primitives[k] = primitive
            seg = replacement_segment(current, k, primitive)
            homotopy = conjoin(homotopy, Homotopy([seg]))
            step.rank_report = verify_rank(Homotopy([seg]), K)
            steps.append(step)
            continue

        # make the degeneracy locus finite-order via bounded randomized reduction
        before_loop = current
        try:
            current, records = semitrans.reduction_loop(
                current, k, K, eps, seed, max_rounds=max_rounds,
                max_retries=max_retries,
            )
        except semitrans.MaxRoundsExceededError as e:
            return fail(step, "semi-transversality",
                        "surviving locus: %r" % (e.locus,))
        step.perturbations = tuple(records)
        # replay each accepted df as a linear path t * df
        state = before_loop
        for rec in records:
            if rec.perturbation.is_zero():
                continue
            seg = perturbation_segment(state, rec.target_index,
                                       rec.perturbation)
            homotopy = conjoin(homotopy, Homotopy([seg]))
            state = seg.end
        assert state == current

        sigma = geometry.full_degeneracy_ideal(current, k)
        step.sigma_generators = tuple(sigma.minors)
        try:
            L, _ = geometry.construct_field_on_sigma(
                current, k, sigma.ideal, semitrans._start_degree(current),
                degree_cap,
            )
        except geometry.NoSolutionAtDegreeError as e:
            return fail(step, "field-construction", str(e))
        step.vector_field = L

        chain = semitrans.tangency_chain(sigma.ideal, L, max_steps)
        if chain.status != semitrans.REACHED_UNIT:
            return fail(step, "tangency",
                        "chain did not reach the unit ideal")
        cert = semitrans.extract_certificate(chain, sigma.ideal, L)
        step.tangency_certificate = cert
        bez = solver.bezout_lift(cert, L, sigma.ideal)

        g_k = ring.zero
        if g_primitives is not None and g_primitives[k] is not None:
            g_k = g_primitives[k]
        try:
            solution, approx = solver.solve_replacement_primitive(
                current, k, sigma.ideal, L, g_k, cert, bez, K
            )
        except solver.ResidualNotInIdealError as e:
            return fail(step, "solve", str(e))
        step.solution = solution
        step.approximation = approx
        primitives[k] = solution.f

        seg = replacement_segment(current, k, solution.f)
        step.rank_report = verify_rank(Homotopy([seg]), K)
        if step.rank_report.verdict == FAILED:
            return fail(step, "rank-verification",
                        "witness: %r" % (step.rank_report.witness,))
        ok_c, _ = verify_contraction_invariance(seg, L, sigma.ideal, k)
        step.contraction_ok = ok_c
        homotopy = conjoin(homotopy, Homotopy([seg]))
        current = current.replace_row(
            k, geometry.exterior_derivative(solution.f)
        )
        steps.append(step)

    return PipelineResult(homotopy, primitives, current, steps, True)
