"""Command-line front end.

    mltt check [--trunc-beta] [--include DIR]... [--format text|json] [--report-postulates] FILE...
    mltt eval  [--trunc-beta] [--include DIR]... [--load FILE]... EXPR

Exit status: 0 when everything checks, 1 on parse or type errors, 2 on usage
or I/O errors.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional, Sequence, TextIO

from .errors import ParseError, TypeCheckError
from .parser import parse_expr, resolve_term
from .printer import Printer
from .program import Session, run_deep
from .syntax import DeclKind, Declaration


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mltt", description="Proof checker for MLTT with a weak propositional truncation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--trunc-beta", action="store_true", help="enable the judgmental truncation beta rule")
        sp.add_argument("--include", "-I", action="append", default=[], metavar="DIR", help="import search directory")

    c = sub.add_parser("check", help="check .tt files in order with a shared scope")
    common(c)
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--report-postulates", action="store_true", help="list the postulates each declaration uses")
    c.add_argument("files", nargs="+", metavar="FILE")

    e = sub.add_parser("eval", help="normalize an expression, optionally after loading files")
    common(e)
    e.add_argument("--load", action="append", default=[], metavar="FILE", help="file to load first")
    e.add_argument("expr", metavar="EXPR")
    return p


def include_path(args) -> List[str]:
    if args.include:
        return list(args.include)
    env = os.environ.get("MLTT_INCLUDE", "")
    return [d for d in env.split(os.pathsep) if d]


def _check(args, out: TextIO, err: TextIO) -> int:
    session = Session(include_path(args), args.trunc_beta)
    for path in args.files:
        if not os.path.isfile(path):
            print(f"mltt: error: cannot read {path}: no such file", file=err)
            return 2
    try:
        for path in args.files:
            session.check_file(path)
    except OSError as e:
        print(f"mltt: error: cannot read {e.filename}: {e.strerror}", file=err)
        return 2
    report = session.report
    if args.format == "json":
        out.write(report.to_json_lines())
        for f, d in report.diagnostics():
            err.write(report.format_diagnostic(f, d) + "\n")
    else:
        text_out, text_err = report.to_text(args.report_postulates)
        out.write(text_out)
        err.write(text_err)
    return 0 if report.ok else 1


def _eval(args, out: TextIO, err: TextIO) -> int:
    session = Session(include_path(args), args.trunc_beta)
    try:
        for path in args.load:
            session.check_file(path)
    except OSError as e:
        print(f"mltt: error: cannot read {e.filename}: {e.strerror}", file=err)
        return 2
    report = session.report
    if not report.ok:
        err.write(report.to_text()[1])
        return 1
    try:
        term = resolve_term(parse_expr(args.expr), session.checker.globals)
    except ParseError as e:
        print(f"<expr>:{e.span[0] + 1}: error[{e.kind}]: {e.diag.message}", file=err)
        return 1
    result = session.checker.check_declaration(Declaration(DeclKind.EVAL, "#eval", body=term))
    for d in result.errors:
        print(f"<expr>:{(d.span or (0,))[0] + 1}: error[{d.kind}]: {d.message}", file=err)
    if result.errors:
        return 1
    out.write(result.output + "\n")
    return 0


def run(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    handler = _check if args.command == "check" else _eval
    return run_deep(lambda: handler(args, out, err))


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
