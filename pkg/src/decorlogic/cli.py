"""Command line front end: run decor scripts and print reports.

Exit codes: 0 when every command in the script succeeded, 1 when a
command failed (an invalid proof, a law that does not hold), 2 when the
script itself is broken (lex, parse, or type errors, missing files).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import errors as E
from .dsl import ExecConfig, emit_report, execute, parse_script

_MODES = (
    ("check", "run proof checks and saturation goals"),
    ("verify", "run law suites and lemma derivations on finite models"),
    ("eval", "evaluate terms on finite models"),
    ("erase", "print theories with the decorations stripped"),
    ("expand", "print axioms as explicit state/exception transformers"),
    ("dualize", "print theories with the two effect readings swapped"),
)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="decor",
        description="proof checker and translator for decorated theories")
    sub = top.add_subparsers(dest="mode", required=True, metavar="command")
    for mode, help_text in _MODES:
        p = sub.add_parser(mode, help=help_text)
        p.add_argument("script", help="path to a script file")
        p.add_argument("--model", action="append", default=[],
                       metavar="IDX=N",
                       help="override the carrier size of one index")
        p.add_argument("--format", choices=("text", "json"), default="text",
                       help="report format (default: text)")
        p.add_argument("--budget", type=int, default=None, metavar="N",
                       help="saturation round budget for prove directives")
        p.add_argument("--fail-fast", action="store_true",
                       help="stop at the first failing command")
    return top


def _overrides(pairs: list[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for pair in pairs:
        key, sep, val = pair.partition("=")
        if not sep or not key or not val.isdigit():
            raise E.ExecError(f"--model wants IDX=N, got {pair!r}")
        out[key] = int(val)
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.script).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        config = ExecConfig(mode=args.mode,
                            model_overrides=_overrides(args.model),
                            budget=args.budget,
                            fail_fast=args.fail_fast)
        report = execute(parse_script(text), config)
    except E.ScriptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.buffer.write(emit_report(report, args.format))
    sys.stdout.buffer.flush()
    return 0 if report.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
