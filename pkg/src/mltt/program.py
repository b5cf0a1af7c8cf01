"""Multi-file checking: import resolution, shared global scope, reports."""
from __future__ import annotations

import json
import os
import sys
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

from .errors import Diagnostic, ParseError
from .evaluator import EvalMode
from .parser import parse_source, resolve_decl
from .syntax import DeclKind
from .typechecker import Checker, DeclResult

T = TypeVar("T")


@dataclass
class FileReport:
    path: str
    source: bytes = b""
    results: List[DeclResult] = field(default_factory=list)
    errors: List[Diagnostic] = field(default_factory=list)  # file-level: parse and import failures

    def position(self, offset: int) -> Tuple[int, int]:
        """1-based line and byte column of a byte offset."""
        line = self.source.count(b"\n", 0, offset) + 1
        col = offset - (self.source.rfind(b"\n", 0, offset) + 1) + 1
        return line, col


@dataclass
class CheckReport:
    trunc_beta: bool
    files: List[FileReport] = field(default_factory=list)

    def diagnostics(self):
        for f in self.files:
            for d in f.errors:
                yield f, d
            for r in f.results:
                for d in r.errors:
                    yield f, d

    @property
    def error_count(self) -> int:
        return sum(1 for _ in self.diagnostics())

    @property
    def ok(self) -> bool:
        return self.error_count == 0

    def results(self) -> Dict[str, DeclResult]:
        """Named declarations (defs and postulates) across all files."""
        return {
            r.name: r
            for f in self.files
            for r in f.results
            if r.kind in (DeclKind.DEF, DeclKind.POSTULATE)
        }

    def directives(self) -> List[Tuple[FileReport, DeclResult]]:
        return [(f, r) for f in self.files for r in f.results if r.kind in (DeclKind.CHECK, DeclKind.EVAL)]

    # rendering

    def format_diagnostic(self, f: FileReport, d: Diagnostic) -> str:
        line, col = f.position(d.span[0]) if d.span else (1, 1)
        where = f" in {d.decl}" if d.decl else ""
        head, *rest = d.message.split("\n")
        lines = [f"{f.path}:{line}:{col}: error[{d.kind}]{where}: {head}"]
        lines.extend("  " + r for r in rest)
        if d.context:
            lines.append("  in context:")
            lines.extend("    " + c for c in d.context)
        return "\n".join(lines)

    def to_text(self, report_postulates: bool = False) -> Tuple[str, str]:
        out: List[str] = []
        err: List[str] = []
        for f in self.files:
            for d in f.errors:
                err.append(self.format_diagnostic(f, d))
            for r in f.results:
                if r.output is not None:
                    out.append(r.output)
                for d in r.errors:
                    err.append(self.format_diagnostic(f, d))
                if report_postulates and r.kind in (DeclKind.DEF, DeclKind.POSTULATE):
                    out.append(f"postulates {r.name} = {{{', '.join(r.postulates)}}}")
        n = sum(len(f.results) for f in self.files)
        err.append(f"checked {len(self.files)} file(s), {n} declaration(s), {self.error_count} error(s)")
        return "".join(x + "\n" for x in out), "".join(x + "\n" for x in err)

    def to_json_lines(self) -> str:
        lines = []
        for f, d in self.diagnostics():
            if d.span:
                d.line, d.col = f.position(d.span[0])
        for f in self.files:
            for d in f.errors:
                rec = {
                    "file": f.path,
                    "name": None,
                    "kind": "file",
                    "status": "error",
                    "type": None,
                    "postulates": [],
                    "span": list(d.span) if d.span else None,
                    "errors": [d.to_json()],
                    "output": None,
                }
                lines.append(json.dumps(rec, sort_keys=True, ensure_ascii=False))
            for r in f.results:
                rec = {
                    "file": f.path,
                    "name": r.name,
                    "kind": r.kind.value,
                    "status": r.status,
                    "type": r.type,
                    "postulates": list(r.postulates),
                    "span": list(r.span) if r.span else None,
                    "errors": [d.to_json() for d in r.errors],
                    "output": r.output,
                }
                if r.blocked_by:
                    rec["blocked_by"] = list(r.blocked_by)
                lines.append(json.dumps(rec, sort_keys=True, ensure_ascii=False))
        return "".join(x + "\n" for x in lines)


class Session:
    """One checking session: a mode, an include path, and a shared scope."""

    def __init__(self, include_path: Sequence[str] = (), trunc_beta: bool = False):
        self.include_path = list(include_path)
        self.checker = Checker(mode=EvalMode(trunc_beta))
        self.report = CheckReport(trunc_beta)
        self._done: Dict[str, FileReport] = {}
        self._stack: List[str] = []

    def locate(self, name: str, importer: str) -> Optional[str]:
        dirs = self.include_path + [os.path.dirname(importer) or "."]
        for d in dirs:
            cand = os.path.join(d, name + ".tt")
            if os.path.isfile(cand):
                return cand
        return None

    def check_file(self, path: str) -> FileReport:
        """Check ``path`` (and its imports). Raises OSError if unreadable."""
        key = os.path.realpath(path)
        if key in self._done:
            return self._done[key]
        with open(path, "rb") as fh:
            data = fh.read()
        fr = FileReport(path, data)
        self._stack.append(key)
        try:
            self._check_source(fr, data)
        finally:
            self._stack.pop()
        self._done[key] = fr
        self.report.files.append(fr)
        return fr

    def _check_source(self, fr: FileReport, data: bytes) -> None:
        try:
            decls = parse_source(data.decode("utf-8"))
        except UnicodeDecodeError as e:
            fr.errors.append(Diagnostic("IllegalCharacter", f"invalid UTF-8: {e.reason}", (e.start, e.end)))
            return
        except ParseError as e:
            fr.errors.append(e.diag)
            return
        for sd in decls:
            if sd.kind is DeclKind.IMPORT:
                self._import(fr, sd)
                continue
            try:
                d = resolve_decl(sd, self.checker.globals)
            except ParseError as e:
                e.diag.decl = sd.name
                fr.results.append(DeclResult(sd.name, sd.kind, "error", span=sd.span, errors=[e.diag]))
                continue
            fr.results.append(self.checker.check_declaration(d))

    def _import(self, fr: FileReport, sd) -> None:
        found = self.locate(sd.name, fr.path)
        if found is None:
            fr.errors.append(Diagnostic("FileNotFound", f"cannot find {sd.name}.tt on the include path", sd.name_span))
            return
        key = os.path.realpath(found)
        if key in self._stack:
            fr.errors.append(Diagnostic("ImportCycle", f"import cycle through {sd.name}", sd.name_span))
            return
        if key in self._done:
            return
        try:
            self.check_file(found)
        except OSError as e:
            fr.errors.append(Diagnostic("FileNotFound", f"cannot read {found}: {e.strerror}", sd.name_span))


def check_program(files: Sequence[str], include_path: Sequence[str] = (), trunc_beta: bool = False) -> CheckReport:
    """Check ``files`` in order with one shared scope; raises OSError for an unreadable root."""
    session = Session(include_path, trunc_beta)
    for path in files:
        session.check_file(path)
    return session.report


def run_deep(fn: Callable[[], T], stack_mb: int = 512, recursion: int = 200_000) -> T:
    """Run ``fn`` on a thread with a large stack, so deep terms do not overflow."""
    box: Dict[str, object] = {}

    def target():
        try:
            box["value"] = fn()
        except BaseException as e:  # re-raised on the calling thread
            box["error"] = e

    old_limit = sys.getrecursionlimit()
    old_size = threading.stack_size()
    sys.setrecursionlimit(max(old_limit, recursion))
    threading.stack_size(stack_mb * 1024 * 1024)
    try:
        th = threading.Thread(target=target)
        th.start()
        th.join()
    finally:
        threading.stack_size(old_size)
        sys.setrecursionlimit(old_limit)
    if "error" in box:
        raise box["error"]
    return box["value"]
