import json
import subprocess
import sys

import pytest

from conftest import CORPUS, FIXTURES, NEGATIVE_FIXTURES, ORDER, WEAK_FILES, corpus_paths, first_diagnostic, run_cli

NEG = FIXTURES / "neg"


def test_check_ok_exit_zero():
    code, out, err = run_cli("check", *corpus_paths(["axioms.tt", "prelude.tt"]))
    assert code == 0
    assert out == ""
    assert err.strip() == "checked 2 file(s), 62 declaration(s), 0 error(s)"


def test_check_error_exit_one():
    code, out, err = run_cli("check", str(NEG / "mismatch.tt"))
    assert code == 1
    first, *rest = err.splitlines()
    assert first.startswith(f"{NEG / 'mismatch.tt'}:2:37: error[Mismatch] in bad: expected type")
    assert rest[-1] == "checked 1 file(s), 1 declaration(s), 1 error(s)"


@pytest.mark.parametrize(
    "argv",
    [
        ("check",),
        ("frobnicate",),
        ("check", "--format", "xml", "a.tt"),
        ("check", "no/such/file.tt"),
        ("eval", "--load", "no/such/file.tt", "zero"),
    ],
)
def test_usage_and_io_errors_exit_two(argv):
    code, out, _ = run_cli(*argv)
    assert code == 2
    assert out == ""


def test_directory_argument_is_an_io_error(tmp_path):
    assert run_cli("check", str(tmp_path))[0] == 2


@pytest.mark.parametrize("name", sorted(NEGATIVE_FIXTURES))
def test_negative_fixture(name):
    assert first_diagnostic(NEG / name) == (1,) + NEGATIVE_FIXTURES[name]


def test_json_records():
    code, out, _ = run_cli("check", "--format", "json", *corpus_paths(["axioms.tt", "prelude.tt"]))
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert len(recs) == 62
    first = recs[0]
    assert set(first) == {"file", "name", "kind", "status", "type", "postulates", "span", "errors", "output"}
    assert (first["name"], first["kind"], first["status"], first["postulates"]) == ("funext", "postulate", "ok", ["funext"])
    assert all(r["status"] == "ok" for r in recs)


def test_report_postulates():
    code, out, _ = run_cli("check", "--report-postulates", *corpus_paths(["axioms.tt", "prelude.tt"]))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "postulates funext = {funext}"
    assert "postulates ua-beta = {ua, ua-beta}" in lines
    assert "postulates id = {}" in lines


def test_directive_output_goes_to_stdout():
    code, out, _ = run_cli("check", "--trunc-beta", *corpus_paths(ORDER))
    assert code == 0
    assert out.splitlines()[0] == "inr star"
    assert out.splitlines()[-1] == "suc (suc (suc zero))"


def test_runs_are_deterministic():
    runs = [run_cli("check", "--format", "json", "--trunc-beta", *corpus_paths(ORDER)) for _ in range(2)]
    assert runs[0] == runs[1]
    errs = [run_cli("check", *corpus_paths(ORDER)) for _ in range(2)]
    assert errs[0] == errs[1] and errs[0][0] == 1


def test_imports_resolve_next_to_the_importer():
    code, _, err = run_cli("check", str(CORPUS / "taboos.tt"))
    assert code == 0
    assert err.startswith("checked 6 file(s)")


def test_include_path_from_environment(tmp_path):
    (tmp_path / "main.tt").write_text("import prelude\n\ndef two : Nat := suc (suc zero)\n")
    assert run_cli("check", str(tmp_path / "main.tt"))[0] == 1
    assert run_cli("check", str(tmp_path / "main.tt"), env={"MLTT_INCLUDE": str(CORPUS)})[0] == 0
    assert run_cli("check", "-I", str(CORPUS), str(tmp_path / "main.tt"))[0] == 0


def test_files_share_one_scope():
    code, _, err = run_cli("check", *corpus_paths(WEAK_FILES))
    assert code == 0
    assert "217 declaration(s)" in err


def test_eval_inline():
    assert run_cli("eval", "suc (suc zero)") == (0, "suc (suc zero)\n", "")
    code, out, _ = run_cli("eval", "--load", str(CORPUS / "prelude.tt"), "id Bool zero2")
    assert (code, out) == (0, "inl star\n")


def test_eval_respects_mode():
    load = ("--load", str(CORPUS / "judgmental.tt"))
    assert run_cli("eval", "--trunc-beta", *load, "myst-nat (tr 2)")[1] == "suc (suc zero)\n"
    # the same file does not check without the beta rule
    assert run_cli("eval", *load, "zero")[0] == 1


def test_eval_errors():
    code, _, err = run_cli("eval", "\\x. x")
    assert code == 1 and "error[CannotInfer]" in err
    code, _, err = run_cli("eval", "zero )")
    assert code == 1 and "error[UnbalancedDelimiter]" in err


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "mltt.cli", "check", str(NEG / "unbound.tt")], capture_output=True, text=True
    )
    assert proc.returncode == 1
    assert "error[UnboundIdentifier]" in proc.stderr
