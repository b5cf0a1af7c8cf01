import io
import json
import os
from pathlib import Path

import pytest

from mltt.cli import run
from mltt.parser import parse_expr, resolve_term
from mltt.program import Session, check_program, run_deep
from mltt.syntax import DeclKind
from mltt.typechecker import Checker
from mltt.evaluator import EvalMode

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"
MANIFEST = json.loads((CORPUS / "manifest.json").read_text())
ORDER = [f["file"] for f in MANIFEST["files"]]
WEAK_FILES = [f["file"] for f in MANIFEST["files"] if f["requiredMode"] == "either"]


def corpus_paths(names):
    return [str(CORPUS / n) for n in names]


def run_cli(*argv, env=None):
    out, err = io.StringIO(), io.StringIO()
    old = dict(os.environ)
    if env:
        os.environ.update(env)
    try:
        code = run(list(argv), out, err)
    finally:
        os.environ.clear()
        os.environ.update(old)
    return code, out.getvalue(), err.getvalue()


def checker_with(source: str = "", trunc_beta: bool = False) -> Checker:
    """A checker that has processed ``source`` (definitions only)."""
    from mltt.parser import parse_source, resolve_decl

    ch = Checker(mode=EvalMode(trunc_beta))
    for sd in parse_source(source):
        res = ch.check_declaration(resolve_decl(sd, ch.globals))
        assert res.status == "ok", [d.message for d in res.errors]
    return ch


def term(ch: Checker, src: str, scope=()):
    return resolve_term(parse_expr(src), ch.globals, tuple(scope))


@pytest.fixture(scope="session")
def weak_report():
    return check_program(corpus_paths(WEAK_FILES), trunc_beta=False)


@pytest.fixture(scope="session")
def beta_session():
    session = Session(trunc_beta=True)
    for path in corpus_paths(ORDER):
        run_deep(lambda: session.check_file(path))
    return session


@pytest.fixture(scope="session")
def beta_report(beta_session):
    return beta_session.report


@pytest.fixture(scope="session")
def corpus_decls(beta_report):
    """Every checked corpus definition, with its resolved syntax."""
    return [
        r.declaration
        for f in beta_report.files
        for r in f.results
        if r.kind is DeclKind.DEF and r.status == "ok"
    ]


# Negative fixtures: the first diagnostic each must produce.
NEGATIVE_FIXTURES = {
    "cannot_infer.tt": ("CannotInfer", 1, 8),
    "cycle.tt": ("ImportCycle", 1, 8),
    "duplicate.tt": ("DuplicateDefinition", 2, 5),
    "illegal_char.tt": ("IllegalCharacter", 1, 21),
    "level.tt": ("LevelError", 1, 16),
    "mismatch.tt": ("Mismatch", 2, 37),
    "missing_import.tt": ("FileNotFound", 1, 8),
    "motive.tt": ("MotiveIllTyped", 1, 38),
    "not_a_function.tt": ("NotAFunction", 1, 16),
    "not_a_sigma.tt": ("NotASigma", 1, 20),
    "not_a_sum.tt": ("NotASum", 1, 57),
    "not_a_truncation.tt": ("NotATruncation", 1, 58),
    "not_a_universe.tt": ("NotAUniverse", 1, 9),
    "not_an_identity.tt": ("NotAnIdentity", 1, 50),
    "not_empty.tt": ("NotEmpty", 1, 43),
    "prop_proof.tt": ("PropProofIllTyped", 1, 48),
    "unbalanced.tt": ("UnbalancedDelimiter", 1, 16),
    "unbound.tt": ("UnboundIdentifier", 1, 16),
    "unexpected_token.tt": ("UnexpectedToken", 1, 16),
    "weak_beta.tt": ("Mismatch", 3, 3),
}


def first_diagnostic(path):
    """``(exit code, kind, line, col)`` of checking ``path`` through the CLI."""
    code, out, err = run_cli("check", "--format", "json", str(path))
    for line in out.splitlines():
        rec = json.loads(line)
        if rec["errors"]:
            e = rec["errors"][0]
            return code, e["kind"], e["line"], e["col"]
    return code, None, None, None


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
