"""Deterministic markdown / TSV tables from certificate files."""

from __future__ import annotations

from typing import Sequence

from .certify import Certificate

FORMATS = ("markdown", "tsv")


def failure_reason(cert: Certificate) -> str:
    """One-line diagnostic taken from the witness of a failing certificate."""
    w = cert.witness
    for key in ("failure", "error"):
        if w.get(key):
            return str(w[key])
    if "binding" in w:
        return str(w["binding"])
    if w.get("violations"):
        return "shift fails for " + ", ".join(w["violations"])
    if w.get("mismatched"):
        return f"mismatched members {w['mismatched']}"
    if "expected" in cert.inputs:
        return f"expected {cert.inputs['expected']}, got {w.get('in_T')}"
    return "verdict fail"


def _ordered(certs: Sequence[Certificate]) -> list[Certificate]:
    """Failures first; otherwise keep file order (stable)."""
    return sorted(certs, key=lambda c: c.passed)


def _tables(certs: Sequence[Certificate], timing: dict[str, float]) -> list[tuple[str, list[str], list[list[str]]]]:
    certs = _ordered(certs)
    failures = [[c.id, c.check, failure_reason(c)] for c in certs if not c.passed]

    criterion = []
    for c in certs:
        if c.check != "criterion":
            continue
        const = c.witness.get("constant")
        case = f"{c.arrangement}, k={c.inputs['k']}, constant={const if const is not None else 'none'}"
        side = "forms" if c.inputs["side"] == "omega" else "derivations"
        criterion.append([case, side, c.multiplicity or "", "pass" if c.passed else "fail"])

    membership = [[c.arrangement, c.inputs.get("id", ""), c.inputs["side"], c.multiplicity or "",
                   "yes" if c.witness.get("member") else "no", str(c.witness.get("binding", ""))]
                  for c in certs if c.check == "membership"]

    shifts = [[c.arrangement, c.multiplicity or "", str(c.witness.get("members", "")),
               str(len(c.inputs.get("samples", []))), "pass" if c.passed else "fail"]
              for c in certs if c.check == "filtration-shift"]

    summary: dict[tuple[str, str], list[int]] = {}
    for c in certs:
        row = summary.setdefault((c.arrangement, c.check), [0, 0])
        row[0] += c.passed
        row[1] += 1
    checks = [[a, k, f"{p}/{n}"] for (a, k), (p, n) in sorted(summary.items())]

    times = [[a, f"{t:.3f}"] for a, t in sorted(timing.items())]
    return [
        ("Failures", ["id", "check", "reason"], failures),
        ("Basis criterion", ["case", "side", "multiplicity", "verdict"], criterion),
        ("Membership", ["arrangement", "object", "side", "multiplicity", "member", "binding"], membership),
        ("Filtration shift", ["arrangement", "multiplicity", "members", "samples", "verdict"], shifts),
        ("Checks", ["arrangement", "check", "passed"], checks),
        ("Timing", ["arrangement", "seconds"], times),
    ]


def _md_cell(s: str) -> str:
    return s.replace("|", "\\|")


def render(certs: Sequence[Certificate], timing: dict[str, float], fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    out: list[str] = []
    for title, header, rows in _tables(certs, timing):
        if fmt == "markdown":
            out.append(f"## {title}\n")
            out.append("| " + " | ".join(header) + " |")
            out.append("|" + "---|" * len(header))
            out.extend("| " + " | ".join(_md_cell(x) for x in r) + " |" for r in rows)
            out.append("")
        else:
            out.append(f"# {title}")
            out.append("\t".join(header))
            out.extend("\t".join(x.replace("\t", " ") for x in r) for r in rows)
            out.append("")
    return "\n".join(out)
