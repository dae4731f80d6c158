"""Command line front end: run suites, cross-checks, and the demo."""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from typing import Optional, Sequence

from .harness import (
    ConfigError,
    CrosscheckResult,
    SuiteResult,
    load_config,
    parse_config,
    run_crosscheck,
    run_suite,
)
from .sequences import builtin_catalog

EXIT_PASS = 0
EXIT_ASSERT = 1
EXIT_USAGE = 2


def _report_suite(result: SuiteResult) -> None:
    for o in result.outcomes:
        status = "PASS" if o.passed else "FAIL"
        print(f"{status} {o.assertion.name}: {o.detail}")
    for path in result.artifacts:
        print(f"wrote {path}")


def _report_crosscheck(result: CrosscheckResult) -> None:
    for r in result.rows:
        status = "PASS" if r.passed else "FAIL"
        print(
            f"{status} {r.label}: membership {float(r.membership.value):.4f}"
            f" vs extension {float(r.extension.value):.4f}"
            f" (diff {r.diff:.4f} <= {r.bound:.4f})"
        )
    for path in result.artifacts:
        print(f"wrote {path}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sentprob",
        description="Sentence-probability trend experiments over random machines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run a suite config and assert its trends")
    run_p.add_argument("config", help="path to an INI suite config")
    run_p.add_argument("--out", help="override the output directory")
    cc_p = sub.add_parser(
        "crosscheck", help="compare membership against extension probabilities"
    )
    cc_p.add_argument("config", help="path to an INI config with a [crosscheck] section")
    cc_p.add_argument("--out", help="override the output directory")
    sub.add_parser("list-sequences", help="list the builtin sentence families")
    demo_p = sub.add_parser("demo", help="run the small packaged demo suite")
    demo_p.add_argument("--out", help="override the output directory")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list-sequences":
        for seq in builtin_catalog():
            print(f"{seq.id:24} {seq.description}")
        return EXIT_PASS
    try:
        if args.command == "demo":
            text = (
                resources.files("sentprob")
                .joinpath("configs/demo.ini")
                .read_text(encoding="utf-8")
            )
            cfg = parse_config(text, source="demo.ini")
        else:
            cfg = load_config(args.config)
        if args.command == "crosscheck":
            cc = run_crosscheck(cfg, args.out)
            _report_crosscheck(cc)
            return EXIT_PASS if cc.passed else EXIT_ASSERT
        result = run_suite(cfg, args.out)
        _report_suite(result)
        return EXIT_PASS if result.passed else EXIT_ASSERT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
