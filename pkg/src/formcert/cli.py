"""Batch front end: job files in, summaries and certificate reports out.

Exit codes: 0 success, 1 input error, 2 honest mathematical failure
(e.g. not semi-transversal, rank witness found), 3 resource exhaustion.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from fractions import Fraction

from formcert import geometry, homotopy, numeric, semitrans, solver
from formcert.grid import GridSpec
from formcert.groebner import Ideal, ResourceLimitError
from formcert.report import (
    cert_to_json,
    dump_report,
    finish_report,
    frac_str,
    report_skeleton,
    ring_from_json,
    verify_report,
)
from formcert.ring import (
    KIND_PARAMETER,
    PolyParseError,
    Ring,
    Variable,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MATH = 2
EXIT_RESOURCE = 3

COMMANDS = (
    "rank-locus",
    "rank-check",
    "tangency-order",
    "certificate",
    "solve",
    "solve-parametric",
    "stability",
    "homotopy-step",
    "pipeline",
)

DEFAULT_OPTIONS = {
    "seed": 0,
    "degree_bound": 2,
    "max_retries": 10,
    "max_rounds": 4,
    "eps": "1/10",
    "t_samples": 9,
    "grid": None,
    "order": "grevlex",
}


class InputError(ValueError):
    pass


class MathFailure(RuntimeError):
    pass


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="formcert",
        description="certified degeneracy loci, tangency orders, restricted "
        "solves, and rank-preserving replacement homotopies",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--job", required=True, help="job JSON file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--degree-bound", type=int, default=None)
        p.add_argument("--max-retries", type=int, default=None)
        p.add_argument("--max-rounds", type=int, default=None)
        p.add_argument(
            "--grid", default=None,
            help="center,radius,samples (scalars applied to every axis)",
        )
        p.add_argument("--order", choices=["grevlex", "lex"], default=None)
        p.add_argument("--out", default=None, help="report JSON output path")
        p.add_argument(
            "--plot-dir", default=None,
            help="write diagnostic CSV and figure files into this directory",
        )
    v = sub.add_parser("verify")
    v.add_argument("report", help="report JSON file to re-verify")
    return parser


def _load_job(args):
    try:
        with open(args.job) as fh:
            job = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError("cannot read job file: %s" % e)
    options = dict(DEFAULT_OPTIONS)
    options.update(job.get("options", {}))
    for key in ("seed", "degree_bound", "max_retries", "max_rounds", "order"):
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            options[key] = cli_val
    if args.grid is not None:
        try:
            c, r, s = args.grid.split(",")
            options["grid"] = {"center": c, "radius": r, "samples": int(s)}
        except ValueError:
            raise InputError("--grid expects center,radius,samples")
    return job, options


def _ring_of(job, options):
    variables = job.get("variables")
    if not variables:
        raise InputError("job must declare 'variables'")
    ring = Ring.space(variables, options["order"])
    params = job.get("parameters", [])
    if params:
        ring = ring.extend([Variable(s, KIND_PARAMETER) for s in params])
    return ring


def _parse_poly(ring, text, what):
    try:
        return ring.parse(text)
    except PolyParseError as e:
        raise InputError("%s: %s" % (what, e))


def _forms_of(job, ring):
    obj = job.get("forms")
    if obj is None:
        raise InputError("job must carry a 'forms' object")
    rows = [
        [_parse_poly(ring, s, "forms row %d" % (i + 1)) for s in row]
        for i, row in enumerate(obj["rows"])
    ]
    forms = geometry.FormTuple(ring, rows)
    if "n" in obj and obj["n"] != forms.n:
        raise InputError("declared n=%s does not match ring" % obj["n"])
    if "q" in obj and obj["q"] != forms.q:
        raise InputError("declared q=%s does not match row count" % obj["q"])
    return forms


def _grid_of(job, options, ring):
    obj = options.get("grid") or job.get("grid")
    n = len(ring.space_variables)
    if obj is None:
        return GridSpec((0,) * n, (1,) * n, 5)
    center = obj.get("center", "0")
    radius = obj.get("radius", "1")
    if not isinstance(center, list):
        center = [center] * n
    if not isinstance(radius, list):
        radius = [radius] * n
    return GridSpec(
        [Fraction(c) for c in center],
        [Fraction(r) for r in radius],
        int(obj.get("samples", 5)),
    )


def _field_of(job, ring):
    comps = job.get("field")
    if comps is None:
        raise InputError("job must carry a 'field' component list")
    n = len(ring.space_variables)
    if len(comps) != n:
        raise InputError("field needs %d components" % n)
    return geometry.VectorField(
        ring, [_parse_poly(ring, c, "field component") for c in comps]
    )


def _sigma_of(job, ring):
    gens = job.get("sigma")
    if gens is None:
        raise InputError("job must carry 'sigma' generators")
    return Ideal(ring, [_parse_poly(ring, g, "sigma generator") for g in gens])


def _k_of(job, forms):
    k = job.get("k")
    if k is None:
        raise InputError("job must carry a 1-based form index 'k'")
    if not (1 <= k <= forms.q):
        raise InputError("k=%s out of range 1..%d" % (k, forms.q))
    return k - 1


def _tangency_data(job, options, ring):
    sigma = _sigma_of(job, ring)
    L = _field_of(job, ring)
    chain = semitrans.tangency_chain(sigma, L)
    return sigma, L, chain


def _grid_json(K):
    return {
        "center": [frac_str(c) for c in K.center],
        "radius": [frac_str(r) for r in K.radius],
        "samples": K.samples,
    }


# --- command implementations --------------------------------------------------


def _cmd_rank_locus(job, options, report):
    ring = ring_from_json(report["ring"])
    forms = _forms_of(job, ring)
    subset = job.get("subset")
    if subset is None:
        subset = list(range(1, forms.q + 1))
    locus = geometry.degeneracy_ideal(forms, [i - 1 for i in subset])
    report["results"] = {
        "subset": list(subset),
        "minors": [str(m) for m in locus.minors],
        "reduced_basis": [str(b) for b in locus.ideal.reduced_basis()],
        "is_unit": locus.ideal.is_unit()[0],
    }
    return EXIT_OK


def _cmd_rank_check(job, options, report, plot_dir):
    ring = ring_from_json(report["ring"])
    forms = _forms_of(job, ring)
    K = _grid_of(job, options, ring)
    ok, cert, locus = geometry.verify_full_rank(forms)
    min_sv = numeric.min_singular_over_grid(forms, K)
    report["results"] = {
        "full_rank": ok,
        "min_singular_over_grid": min_sv,
        "grid": _grid_json(K),
        "minors": [str(m) for m in locus.minors],
    }
    if ok:
        report["certificates"].append(cert_to_json(cert, "full-rank-unit"))
    else:
        report["results"]["reduced_basis"] = [
            str(b) for b in locus.ideal.reduced_basis()
        ]
    if plot_dir:
        csv_path = os.path.join(plot_dir, "singular_values.csv")
        numeric.write_singular_values_csv(forms, K, csv_path)
        fig_path = os.path.join(plot_dir, "singular_values.png")
        from formcert import plots

        plots.plot_min_singular(forms, K, fig_path)
        report["results"]["artifacts"] = {"csv": csv_path, "figure": fig_path}
    return EXIT_OK if ok else EXIT_MATH


def _cmd_tangency_order(job, options, report):
    ring = ring_from_json(report["ring"])
    sigma, L, chain = _tangency_data(job, options, ring)
    report["results"]["chain_length"] = len(chain.ideals)
    if chain.status == semitrans.REACHED_UNIT:
        report["results"]["order"] = chain.order
        return EXIT_OK
    if chain.status == semitrans.STABILIZED:
        report["results"]["order"] = None
        report["results"]["locus"] = [
            str(b) for b in chain.stabilized.reduced_basis()
        ]
        return EXIT_MATH
    report["results"]["order"] = None
    report["results"]["indeterminate"] = True
    return EXIT_RESOURCE


def _cmd_certificate(job, options, report):
    ring = ring_from_json(report["ring"])
    sigma, L, chain = _tangency_data(job, options, ring)
    if chain.status != semitrans.REACHED_UNIT:
        report["results"]["order"] = None
        return EXIT_MATH
    cert = semitrans.extract_certificate(chain, sigma, L)
    report["results"] = {
        "order": cert.order,
        "functions": [str(f) for f in cert.functions],
        "labels": [list(l) for l in cert.labels],
    }
    report["certificates"].append(
        cert_to_json(cert.unit_certificate, "tangency-unit")
    )
    for i, m in enumerate(cert.membership_certificates):
        report["certificates"].append(
            cert_to_json(m, "function-%d-in-sigma" % (i + 1))
        )
    return EXIT_OK


def _solve_common(job, options, report, parametric):
    ring = ring_from_json(report["ring"])
    sigma, L, chain = _tangency_data(job, options, ring)
    if chain.status != semitrans.REACHED_UNIT:
        report["results"]["failure"] = "not semi-transversal"
        if chain.status == semitrans.STABILIZED:
            report["results"]["locus"] = [
                str(b) for b in chain.stabilized.reduced_basis()
            ]
        return EXIT_MATH
    cert = semitrans.extract_certificate(chain, sigma, L)
    bez = solver.bezout_lift(cert, L, sigma)
    g = _parse_poly(ring, job.get("g", "1"), "right-hand side g")
    if parametric:
        solution = solver.solve_restricted_parametric(L, sigma, g, cert, bez)
    else:
        solution = solver.solve_restricted(L, sigma, g, cert, bez)
    report["results"] = {
        "f": str(solution.f),
        "order": cert.order,
        "functions": [str(fn) for fn in cert.functions],
    }
    res_cert = cert_to_json(solution.residual_certificate, "residual-in-sigma")
    if parametric:
        params = [v.name for v in ring.variables if v.kind == KIND_PARAMETER]
        samples = []
        rng_vals = [Fraction(i - 2, 3) for i in range(5)]
        for val in rng_vals:
            values = {p: val for p in params}
            f_s, c_s = solver.specialize_solution(solution, sigma, values)
            samples.append({p: frac_str(val) for p in params})
            report["certificates"].append(
                cert_to_json(c_s, "residual-specialized-%s" % frac_str(val))
            )
        res_cert["specializations"] = samples
        report["results"]["specialization_values"] = samples
    report["certificates"].append(res_cert)
    return EXIT_OK


def _cmd_stability(job, options, report):
    ring = ring_from_json(report["ring"])
    K = _grid_of(job, options, ring)

    def polys(key):
        vals = job.get(key)
        if vals is None:
            raise InputError("stability job needs '%s'" % key)
        return [_parse_poly(ring, s, key) for s in vals]

    f = polys("f")
    a = polys("a")
    f_tilde = polys("f_tilde")
    try:
        rep = solver.stability_report(f, a, f_tilde, K, options["degree_bound"])
    except ValueError as e:
        report["results"]["failure"] = str(e)
        return EXIT_MATH
    except solver.NoUnitDecompositionAtDegreeError as e:
        report["results"]["failure"] = str(e)
        return EXIT_MATH
    report["results"] = {
        "a_tilde": [str(p) for p in rep.perturbed_a],
        "a_norm": frac_str(rep.a_norm),
        "f_change": frac_str(rep.f_change),
        "a_change": frac_str(rep.a_change),
        "bound": frac_str(rep.bound),
        "bound_holds": rep.bound_holds,
        "delta": frac_str(rep.delta) if rep.delta is not None else None,
        "within_delta": rep.within_delta,
        "grid": _grid_json(K),
    }
    from formcert.groebner import MembershipCertificate

    identity = MembershipCertificate(
        ring.one,
        tuple((i, p) for i, p in enumerate(rep.perturbed_a) if not p.is_zero()),
        tuple(rep.perturbed_f),
    )
    report["certificates"].append(cert_to_json(identity, "unit-decomposition"))
    return EXIT_OK


def _append_step_certs(report, idx, step):
    if step.tangency_certificate is not None:
        report["certificates"].append(
            cert_to_json(
                step.tangency_certificate.unit_certificate,
                "step-%d-tangency-unit" % idx,
            )
        )
    if step.solution is not None:
        report["certificates"].append(
            cert_to_json(
                step.solution.residual_certificate,
                "step-%d-residual" % idx,
            )
        )
    if step.rank_report is not None:
        for j, cert in enumerate(step.rank_report.certificates):
            report["certificates"].append(
                cert_to_json(cert, "step-%d-rank-segment-%d" % (idx, j))
            )


def _step_summary(step):
    out = {
        "k": step.k + 1,
        "skipped_exact": step.skipped_exact,
        "rank_verdict": step.rank_report.verdict if step.rank_report else None,
        "contraction_ok": step.contraction_ok,
        "sigma_generators": [str(m) for m in step.sigma_generators],
        "perturbations": [
            {
                "seed": rec.seed,
                "retries": rec.retries,
                "verdict": rec.verdict,
                "target_row": rec.target_index + 1,
                "f": str(rec.perturbation),
            }
            for rec in step.perturbations
        ],
    }
    if step.approximation:
        out["approximation"] = {
            k: (frac_str(v) if isinstance(v, Fraction) else v)
            for k, v in step.approximation.items()
        }
    return out


def _cmd_homotopy_step(job, options, report):
    ring = ring_from_json(report["ring"])
    forms = _forms_of(job, ring)
    K = _grid_of(job, options, ring)
    k = _k_of(job, forms)
    sigma = geometry.full_degeneracy_ideal(forms, k)
    L, _ = geometry.construct_field_on_sigma(
        forms, k, sigma.ideal, semitrans._start_degree(forms)
    )
    chain = semitrans.tangency_chain(sigma.ideal, L)
    if chain.status != semitrans.REACHED_UNIT:
        report["results"]["failure"] = "not semi-transversal"
        return EXIT_MATH
    cert = semitrans.extract_certificate(chain, sigma.ideal, L)
    bez = solver.bezout_lift(cert, L, sigma.ideal)
    g_k = _parse_poly(ring, job.get("g_k", "0"), "primitive g_k")
    solution, approx = solver.solve_replacement_primitive(
        forms, k, sigma.ideal, L, g_k, cert, bez, K
    )
    seg = homotopy.replacement_segment(forms, k, solution.f)
    rank = homotopy.verify_rank(homotopy.Homotopy([seg]), K,
                                options["t_samples"])
    ok_c, c_cert = homotopy.verify_contraction_invariance(
        seg, L, sigma.ideal, k
    )
    report["results"] = {
        "f_k": str(solution.f),
        "rank_verdict": rank.verdict,
        "contraction_ok": ok_c,
        "approximation": {
            key: (frac_str(v) if isinstance(v, Fraction) else v)
            for key, v in approx.items()
        },
    }
    report["certificates"].append(
        cert_to_json(solution.residual_certificate, "step-residual")
    )
    for j, c in enumerate(rank.certificates):
        report["certificates"].append(
            cert_to_json(c, "rank-segment-%d" % j)
        )
    if c_cert is not None:
        report["certificates"].append(
            cert_to_json(c_cert, "contraction-invariance")
        )
    if rank.verdict == homotopy.FAILED:
        return EXIT_MATH
    return EXIT_OK


def _cmd_pipeline(job, options, report, plot_dir):
    ring = ring_from_json(report["ring"])
    forms = _forms_of(job, ring)
    K = _grid_of(job, options, ring)
    g_prims = None
    if "g" in job and isinstance(job["g"], list):
        g_prims = [
            _parse_poly(ring, s, "primitive") if s is not None else None
            for s in job["g"]
        ]
    result = homotopy.replace_all_forms(
        forms,
        K,
        Fraction(options["eps"]),
        options["seed"],
        max_rounds=options["max_rounds"],
        max_retries=options["max_retries"],
        g_primitives=g_prims,
    )
    report["results"] = {
        "success": result.success,
        "failed_stage": result.failed_stage,
        "failure": result.failure,
        "segments": len(result.homotopy.segments),
        "primitives": [
            str(p) if p is not None else None for p in result.primitives
        ],
        "final_rows": [[str(p) for p in r] for r in result.final_forms.rows],
        "steps": [_step_summary(s) for s in result.steps],
        "grid": _grid_json(K),
        "eps": options["eps"],
    }
    for i, step in enumerate(result.steps):
        _append_step_certs(report, i, step)
    if plot_dir:
        from formcert import plots

        csv_path = os.path.join(plot_dir, "final_singular_values.csv")
        numeric.write_singular_values_csv(result.final_forms, K, csv_path)
        fig_path = os.path.join(plot_dir, "rank_margin.png")
        plots.plot_homotopy_rank(result.homotopy, K, fig_path,
                                 options["t_samples"])
        report["results"]["artifacts"] = {"csv": csv_path, "figure": fig_path}
    return EXIT_OK if result.success else EXIT_MATH


def run_command(args):
    job, options = _load_job(args)
    command = args.command
    ring = _ring_of(job, options)
    timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    inputs = {k: v for k, v in job.items() if k != "options"}
    report = report_skeleton(command, ring, inputs, _options_json(options),
                             timestamp)
    plot_dir = getattr(args, "plot_dir", None)
    if plot_dir:
        os.makedirs(plot_dir, exist_ok=True)

    if command == "rank-locus":
        code = _cmd_rank_locus(job, options, report)
    elif command == "rank-check":
        code = _cmd_rank_check(job, options, report, plot_dir)
    elif command == "tangency-order":
        code = _cmd_tangency_order(job, options, report)
    elif command == "certificate":
        code = _cmd_certificate(job, options, report)
    elif command == "solve":
        code = _solve_common(job, options, report, parametric=False)
    elif command == "solve-parametric":
        code = _solve_common(job, options, report, parametric=True)
    elif command == "stability":
        code = _cmd_stability(job, options, report)
    elif command == "homotopy-step":
        code = _cmd_homotopy_step(job, options, report)
    elif command == "pipeline":
        code = _cmd_pipeline(job, options, report, plot_dir)
    else:  # pragma: no cover
        raise InputError("unknown command %r" % command)

    finish_report(report)
    if not report["reverification"]["all_ok"]:
        code = max(code, EXIT_MATH)
    text = dump_report(report, args.out)
    if args.out:
        print("report written to %s" % args.out)
    else:
        print(text)
    _print_summary(report, code)
    return code


def _options_json(options):
    out = {}
    for k, v in options.items():
        out[k] = v
    return out


def _print_summary(report, code):
    res = report["results"]
    bits = ["command=%s" % report["command"], "exit=%d" % code]
    for key in ("order", "full_rank", "success", "bound_holds", "f"):
        if key in res:
            bits.append("%s=%s" % (key, res[key]))
    rev = report["reverification"]
    bits.append("certificates=%d/%d ok"
                % (sum(1 for _, ok in rev["verdicts"] if ok), rev["checked"])
                if rev["verdicts"] else "certificates=none")
    print("; ".join(str(b) for b in bits), file=sys.stderr)


def run_verify(args):
    try:
        with open(args.report) as fh:
            report = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        print("cannot read report: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    ok, verdicts = verify_report(report)
    for name, v in verdicts:
        print("%s: %s" % (name, "ok" if v else "MISMATCH"))
    if not verdicts:
        print("no certificates present")
    return EXIT_OK if ok else EXIT_MATH


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return run_verify(args)
        return run_command(args)
    except InputError as e:
        print("input error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except PolyParseError as e:
        print("input error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as e:
        print("resource limit: %s" % e, file=sys.stderr)
        return EXIT_RESOURCE
    except (
        semitrans.RetriesExhaustedError,
        semitrans.MaxRoundsExceededError,
        geometry.NoSolutionAtDegreeError,
        solver.ResidualNotInIdealError,
    ) as e:
        print("failure: %s" % e, file=sys.stderr)
        return EXIT_MATH
    except ValueError as e:
        print("input error: %s" % e, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
