"""Report serialization and certificate re-verification.

Reports embed the full input and every certificate inline, so a report file
is self-contained: :func:`verify_report` re-expands each certificate using
the polynomial ring alone, with no Groebner computation.
"""

from __future__ import annotations

import json
from fractions import Fraction

from formcert.ring import Ring, Variable

SCHEMA = "formcert-report-v1"


def ring_to_json(ring):
    return {
        "variables": [[v.name, v.kind] for v in ring.variables],
        "order": ring.order,
    }


def ring_from_json(obj):
    return Ring([Variable(n, k) for n, k in obj["variables"]], obj["order"])


def frac_str(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def cert_to_json(cert, name):
    """Serialize a MembershipCertificate with its generator list."""
    ring = cert.target.ring
    return {
        "kind": "membership",
        "name": name,
        "ring": ring_to_json(ring),
        "target": str(cert.target),
        "generators": [str(g) for g in cert.generators],
        "cofactors": [[i, str(c)] for i, c in cert.cofactors],
    }


def verify_cert_json(obj):
    """Re-expand one serialized certificate; pure ring arithmetic."""
    ring = ring_from_json(obj["ring"])
    target = ring.parse(obj["target"])
    gens = [ring.parse(g) for g in obj["generators"]]
    acc = ring.zero
    for i, c in obj["cofactors"]:
        acc = acc + ring.parse(c) * gens[i]
    if acc != target:
        return False
    for spec in obj.get("specializations", []):
        values = {k: Fraction(v) for k, v in spec.items()}
        acc_s = ring.zero
        for i, c in obj["cofactors"]:
            acc_s = acc_s + ring.parse(c).subs(values) * gens[i].subs(values)
        if acc_s != target.subs(values):
            return False
    return True


def verify_report(report):
    """Check every inline certificate; returns (all_ok, per-cert verdicts)."""
    if isinstance(report, str):
        with open(report) as fh:
            report = json.load(fh)
    verdicts = []
    for cert in report.get("certificates", []):
        ok = verify_cert_json(cert)
        verdicts.append((cert.get("name", "?"), ok))
    return all(ok for _, ok in verdicts) or not verdicts, verdicts


def dump_report(report, path=None):
    """Deterministic JSON: sorted keys, stable formatting."""
    text = json.dumps(report, sort_keys=True, indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def report_skeleton(command, ring, inputs, options, timestamp):
    return {
        "schema": SCHEMA,
        "command": command,
        "timestamp": timestamp,
        "ring": ring_to_json(ring),
        "inputs": inputs,
        "options": options,
        "results": {},
        "certificates": [],
        "reverification": {},
    }


def finish_report(report):
    """Self-check all certificates and record the outcome inside the report."""
    ok, verdicts = verify_report(report)
    report["reverification"] = {
        "checked": len(verdicts),
        "all_ok": ok,
        "verdicts": [[name, v] for name, v in verdicts],
    }
    return report
