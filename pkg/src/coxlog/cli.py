"""Command line: generate families, verify certificates, render reports.

Exit codes: 0 all checks pass, 1 a check or generation failed, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .certify import (DEFAULT_K, ConfigError, SuiteConfig, certificate_document, generate_document,
                      load_certificates, plan_from_families, recheck, run_suite, run_tasks)
from .coxeter import build
from .primitive import TheoryViolation
from .report import FORMATS, failure_reason, render

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse already uses 2; keep it explicit
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coxlog", description="Exact bases of logarithmic modules of Coxeter arrangements.")
    p.add_argument("--version", action="version", version=f"coxlog {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write the datum, D and all families in a k range as JSON")
    g.add_argument("--type", required=True, help="e.g. A2, B3, I2(5), H3, A1xB2")
    g.add_argument("--k-min", type=int, default=DEFAULT_K[0])
    g.add_argument("--k-max", type=int, default=DEFAULT_K[1])
    g.add_argument("--out", help="output path (default: stdout)")

    v = sub.add_parser("verify", help="run checks and write certificates")
    src = v.add_mutually_exclusive_group()
    src.add_argument("--type", action="append", help="arrangement to certify (repeatable)")
    src.add_argument("--families", help="verify a family file written by 'generate'")
    src.add_argument("--recheck", help="re-run every check recorded in a certificate file")
    v.add_argument("--config", help="JSON file with SuiteConfig fields")
    v.add_argument("--k-min", type=int)
    v.add_argument("--k-max", type=int)
    v.add_argument("--multiplicity", action="append", default=None,
                   help="extra filtration multiplicity, 'const:-1' or 'orbit:long=1,short=-1' (repeatable)")
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--jobs", type=int)
    v.add_argument("--out", help="certificate file (default: stdout summary only)")

    r = sub.add_parser("report", help="tables from a certificate file")
    r.add_argument("--certs", required=True)
    r.add_argument("--format", choices=FORMATS, default="markdown")
    r.add_argument("--out", help="output path (default: stdout)")
    return p


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def cmd_generate(args) -> int:
    try:
        build(args.type)
    except ValueError as exc:
        print(f"coxlog generate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.k_min > args.k_max:
        print("coxlog generate: k-min exceeds k-max", file=sys.stderr)
        return EXIT_USAGE
    try:
        doc = generate_document(args.type, args.k_min, args.k_max)
    except (TheoryViolation, ArithmeticError, ValueError) as exc:
        print(f"coxlog generate: generation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _write(args.out, _dump(doc))
    return EXIT_OK


def _suite_config(args) -> SuiteConfig:
    cfg = SuiteConfig.from_file(args.config) if args.config else SuiteConfig(arrangements=[])
    if args.type:
        cfg.arrangements = list(args.type)
    for name in ("k_min", "k_max", "samples", "seed", "jobs", "out"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    if args.multiplicity:
        cfg.multiplicities = list(cfg.multiplicities) + list(args.multiplicity)
    cfg.validate()
    return cfg


def _summarize(certs, label: str) -> int:
    failed = [c for c in certs if not c.passed]
    for c in failed:
        print(f"FAIL {c.id}: {failure_reason(c)}", file=sys.stderr)
    print(f"{label}: {len(certs)} certificates, {len(failed)} failed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_verify(args) -> int:
    if args.recheck:
        try:
            certs, _ = load_certificates(args.recheck)
        except ConfigError as exc:
            print(f"coxlog verify: {exc}", file=sys.stderr)
            return EXIT_USAGE
        bad = [c.id for c in certs if not recheck(c)]
        for cid in bad:
            print(f"NOT REPRODUCED {cid}", file=sys.stderr)
        code = _summarize(certs, "recheck")
        return EXIT_FAIL if bad else code

    if args.families:
        try:
            with open(args.families) as fh:
                doc = json.load(fh)
            arrangement, tasks = plan_from_families(doc)
        except (OSError, json.JSONDecodeError, ConfigError, ValueError) as exc:
            print(f"coxlog verify: {exc}", file=sys.stderr)
            return EXIT_USAGE
        seed = args.seed if args.seed is not None else 42
        certs = run_tasks(arrangement, tasks, seed)
        cfg = SuiteConfig(arrangements=[arrangement], seed=seed)
        if args.out:
            _write(args.out, _dump(certificate_document(cfg, certs, {})))
        return _summarize(certs, arrangement)

    try:
        cfg = _suite_config(args)
    except ConfigError as exc:
        print(f"coxlog verify: {exc}", file=sys.stderr)
        return EXIT_USAGE
    certs, timing = run_suite(cfg)
    if cfg.out:
        _write(cfg.out, _dump(certificate_document(cfg, certs, timing)))
    return _summarize(certs, ", ".join(cfg.arrangements))


def cmd_report(args) -> int:
    try:
        certs, timing = load_certificates(args.certs)
    except ConfigError as exc:
        print(f"coxlog report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(args.out, render(certs, timing, args.format))
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "verify": cmd_verify, "report": cmd_report}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except Exception as exc:  # internal failure: report and keep the exit-code contract
        print(f"coxlog {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
