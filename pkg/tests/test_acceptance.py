"""The acceptance criteria, one test each; every test records a PASS/FAIL line
that the terminal summary prints (see ``conftest.pytest_terminal_summary``)."""
import json
import random
import subprocess
import sys
import time
from functools import lru_cache

from mltt import syntax as s
from mltt.program import run_deep
from conftest import (
    CORPUS, FIXTURES, MANIFEST, NEGATIVE_FIXTURES, ORDER, WEAK_FILES, checker_with, corpus_paths, first_diagnostic,
)
from strategies import BASE_TYPES, eta_expand
from test_evaluator import BETA, BETA_PAIRS, HEAVY, LIB, TRUNC_PAIRS, WEAK, _idempotent, nf

RESULTS = {}


def record(n: int, title: str, ok: bool, detail: str) -> None:
    RESULTS[n] = f"[{'PASS' if ok else 'FAIL'}] {n}. {title}: {detail}"
    assert ok, RESULTS[n]


@lru_cache(maxsize=None)
def mltt(*argv, run=0):
    """Run the command-line tool; returns (exit code, stdout, stderr, seconds)."""
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "mltt.cli", *argv], capture_output=True)
    return proc.returncode, proc.stdout, proc.stderr, time.perf_counter() - start


WEAK_ARGS = ("check", *corpus_paths(WEAK_FILES))
BETA_ARGS = ("check", "--trunc-beta", str(CORPUS / "judgmental.tt"))
LEDGER_ARGS = ("check", "--trunc-beta", "--format", "json", *corpus_paths(ORDER))
JUDGMENTAL = (CORPUS / "judgmental.tt").read_bytes()


def records(argv):
    return [json.loads(line) for line in mltt(*argv)[1].decode().splitlines()]


def directive_text(rec) -> str:
    a, b = rec["span"]
    return JUDGMENTAL[a:b].decode()


def test_1_weak_corpus():
    code, _, err, secs = mltt(*WEAK_ARGS)
    summary = err.decode().strip().splitlines()[-1]
    ok = code == 0 and summary.endswith(", 0 error(s)") and secs < 10
    record(1, "corpus checks without truncation beta", ok, f"exit {code}, {summary}, {secs:.2f}s")


def test_2_postulate_ledger():
    got = {r["name"]: r["postulates"] for r in records(LEDGER_ARGS) if r["kind"] in ("def", "postulate")}
    wrong = [n for f in MANIFEST["files"] for n, ps in f["postulates"].items() if got.get(n) != ps]
    none = ["hedberg", "fix-isProp", "constEndo-iff-splitSup", "factor-set", "coll-to-discrete",
            "trunc-large-small", "pop-large-small", "chain"]
    funext = ["separated-set", "factor-coprod", "pop-isProp", "negneg-pop-iff-lem"]
    wrong += [n for n in none if got.get(n) != []]
    wrong += [n for n in funext if got.get(n) != ["funext"]]
    total = sum(len(f["postulates"]) for f in MANIFEST["files"])
    record(2, "postulate ledger matches the manifest", not wrong, f"{total} declarations, mismatches: {wrong or 'none'}")


def test_3_judgmental_beta_positive():
    code, out, _, _ = mltt(*BETA_ARGS)
    lines = out.decode().splitlines()
    recs = {directive_text(r): r for r in records(("check", "--trunc-beta", "--format", "json", str(CORPUS / "judgmental.tt")))
            if r["kind"] in ("#check", "#eval") and r["file"].endswith("judgmental.tt")}
    myst_check = recs.get("#check ((\\n. refl n) : (n : Nat) -> Id Nat (myst-nat (tr n)) n)")
    myst_eval = recs.get("#eval myst-nat (tr 3)")
    ok = (
        code == 0
        and myst_check is not None and myst_check["status"] == "ok"
        and myst_eval is not None and myst_eval["output"] == "suc (suc (suc zero))"
        and lines[-1] == "suc (suc (suc zero))"
    )
    record(3, "judgmental.tt checks with truncation beta", ok, f"exit {code}, #eval printed {lines[-1] if lines else None!r}")


def test_4_judgmental_beta_negative():
    code, _, _, _ = mltt("check", str(CORPUS / "judgmental.tt"))
    recs = records(("check", "--format", "json", str(CORPUS / "judgmental.tt")))
    hits = [
        (r["errors"][0]["line"], r["errors"][0]["col"])
        for r in recs
        if r["file"].endswith("judgmental.tt") and r["kind"] == "#check" and r["errors"]
        and r["errors"][0]["kind"] == "Mismatch" and "refl" in directive_text(r)
    ]
    ok = code == 1 and bool(hits)
    record(4, "judgmental.tt fails without truncation beta", ok, f"exit {code}, Mismatch at refl directives {hits}")


def test_5_derived_funext():
    got = {r["name"]: r["postulates"] for r in records(LEDGER_ARGS)}
    ok = got.get("funext-derived") == [] and got.get("transitive-Nat") == ["ua", "ua-beta"]
    record(5, "funext derived without postulates", ok,
           f"funext-derived {got.get('funext-derived')}, transitive-Nat {got.get('transitive-Nat')}")


def test_6_interval_equations():
    recs = [r for r in records(("check", "--trunc-beta", "--format", "json", str(CORPUS / "judgmental.tt")))
            if r["file"].endswith("judgmental.tt") and r["kind"] == "#check"]
    interval = [(directive_text(r), r["status"]) for r in recs if "interval-rec" in directive_text(r)]
    texts = [t for t, _ in interval]
    ok = (
        all(st == "ok" for _, st in interval)
        and "#check (refl zero : Id Nat (interval-rec Nat zero zero (refl zero) (tr zero2)) zero)" in texts
        and any("(tr one2)" in t for t in texts)
        and any("(tr zero2)) y0)" in t for t in texts)
        and any("(tr one2)) y1)" in t for t in texts)
    )
    record(6, "interval point equations hold judgmentally", ok, f"{len(interval)} interval directives, all ok: {ok}")


def _eta_instances(rng: random.Random, former: str, count: int):
    def simple(size):
        if size == 0 or rng.random() < 0.4:
            return rng.choice(BASE_TYPES)
        op = rng.choice([" -> ", " * "])
        return f"({simple(size - 1)}{op}{simple(size - 1)})"

    for _ in range(count):
        if former == "unit":
            yield "Unit"
        else:
            op = " -> " if former == "pi" else " * "
            yield f"({simple(1)}{op}{simple(1)})"


def test_7_evaluator_properties(beta_session, corpus_decls):
    ch = beta_session.checker

    def idempotence():
        folded = [d.name for d in corpus_decls if not _idempotent(ch, d.body, ch.globals[d.name].type, False)]
        full = [d.name for d in corpus_decls
                if d.name not in HEAVY and not _idempotent(ch, d.body, ch.globals[d.name].type, True)]
        return folded, full

    folded, full = run_deep(idempotence)
    rng = random.Random(20)
    eta_bad = []
    for former in ("pi", "sigma", "unit"):
        for ty in _eta_instances(rng, former, 20):
            expanded = eta_expand("f", ty)
            same = all(nf(c, expanded, ty, [("f", ty)]) == nf(c, "f", ty, [("f", ty)]) for c in (WEAK, BETA))
            try:
                checker_with(LIB + f"def eta (f : {ty}) : Id ({ty}) f {expanded} := refl f\n")
            except AssertionError:
                same = False
            if not same:
                eta_bad.append(ty)
    beta_bad = [r for r, c, ty, ctx in BETA_PAIRS for ch2 in (WEAK, BETA) if nf(ch2, r, ty, ctx) != nf(ch2, c, ty, ctx)]
    beta_bad += [r for r, c, ty, ctx in TRUNC_PAIRS if nf(BETA, r, ty, ctx) != nf(BETA, c, ty, ctx)]
    beta_bad += [r for r, c, ty, ctx in TRUNC_PAIRS if not isinstance(nf(WEAK, r, ty, ctx), (s.TrRec, s.TrInd))]
    ok = not (folded or full or eta_bad or beta_bad)
    record(
        7, "evaluator properties", ok,
        f"idempotent on {len(corpus_decls)} bodies (globals folded; fully unfolded on {len(corpus_decls) - len(HEAVY)}), "
        f"eta 60 instances, {len(BETA_PAIRS) + len(TRUNC_PAIRS)} beta pairs; failures: "
        f"{(folded + full + eta_bad + beta_bad) or 'none'}",
    )


def test_8_negative_fixtures():
    bad = []
    for name, expected in sorted(NEGATIVE_FIXTURES.items()):
        path = FIXTURES / "neg" / name
        got = first_diagnostic(path)
        lines = path.read_bytes().count(b"\n") + 1
        if got != (1,) + expected or not (1 <= got[2] <= lines):
            bad.append(name)
    ok = len(NEGATIVE_FIXTURES) >= 10 and not bad
    record(8, "negative fixtures rejected", ok, f"{len(NEGATIVE_FIXTURES)} fixtures, wrong: {bad or 'none'}")


def test_9_determinism():
    same = [mltt(*argv)[:3] == mltt(*argv, run=1)[:3] for argv in (WEAK_ARGS, BETA_ARGS)]
    record(9, "reports are byte-identical across runs", all(same), f"criterion 1: {same[0]}, criterion 3: {same[1]}")
