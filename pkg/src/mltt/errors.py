"""Diagnostics shared by the parser, checker and driver."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

Span = Tuple[int, int]

PARSE_KINDS = frozenset(
    {"IllegalCharacter", "UnexpectedToken", "UnbalancedDelimiter", "UnboundIdentifier", "DuplicateDefinition"}
)
TYPE_KINDS = frozenset(
    {
        "Mismatch",
        "NotAFunction",
        "NotASigma",
        "NotAUniverse",
        "NotAnIdentity",
        "MotiveIllTyped",
        "PropProofIllTyped",
        "UnboundGlobal",
        "LevelError",
        "CannotInfer",
        "NotASum",
        "NotATruncation",
        "NotEmpty",
        "Blocked",
    }
)
PROGRAM_KINDS = frozenset({"ImportCycle", "FileNotFound"})


@dataclass
class Diagnostic:
    kind: str
    message: str
    span: Optional[Span] = None
    file: Optional[str] = None
    decl: Optional[str] = None
    context: Tuple[str, ...] = ()
    expected: Optional[str] = None
    actual: Optional[str] = None
    line: Optional[int] = field(default=None, compare=False)
    col: Optional[int] = field(default=None, compare=False)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "message": self.message, "span": list(self.span) if self.span else None}
        if self.line is not None:
            out["line"], out["col"] = self.line, self.col
        if self.expected is not None:
            out["expected"] = self.expected
            out["actual"] = self.actual
        if self.context:
            out["context"] = list(self.context)
        return out


class MlttError(Exception):
    def __init__(self, kind: str, message: str, span: Optional[Span] = None, **extra):
        super().__init__(message)
        self.diag = Diagnostic(kind, message, span, **extra)

    @property
    def kind(self) -> str:
        return self.diag.kind

    @property
    def span(self) -> Optional[Span]:
        return self.diag.span

    def __str__(self) -> str:
        return f"{self.diag.kind}: {self.diag.message}"


class ParseError(MlttError):
    pass


class TypeCheckError(MlttError):
    pass


class ProgramError(MlttError):
    pass
