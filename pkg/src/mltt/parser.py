"""Lexer, recursive-descent parser and name resolution for ``.tt`` files.

Parsing produces surface declarations whose variables are still names;
``resolve_decl`` turns them into nameless core terms against a table of
known globals.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Container, Iterable, List, Optional, Sequence, Tuple

from . import syntax as s
from .errors import ParseError
from .syntax import DeclKind, Span, Term

KEYWORDS = frozenset(
    """def postulate import U fst snd inl inr case absurd natrec Id refl J Trunc tr trec tind htr
    Nat zero suc Unit star Empty""".split()
)
DIRECTIVES = frozenset({"#check", "#eval"})
IDENT = r"[A-Za-z_][A-Za-z0-9_']*(?:-[A-Za-z0-9_']+)*"

_TOKEN_RE = re.compile(
    rf"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<directive>\#check|\#eval)
  | (?P<num>[0-9]+)
  | (?P<ident>{IDENT})
  | (?P<sym>:=|->|[()\\.,:*+])
    """,
    re.VERBOSE,
)

# Keyword-headed forms and how many atomic arguments each takes.
ARITY = {
    "fst": 1, "snd": 1, "inl": 1, "inr": 1, "suc": 1, "refl": 1, "Trunc": 1, "tr": 1,
    "case": 4, "absurd": 2, "natrec": 4, "Id": 3, "J": 3, "trec": 4, "tind": 4, "htr": 2,
}
CONSTANTS = {"Nat": s.NatT, "zero": s.Zero, "Unit": s.UnitT, "star": s.Star, "Empty": s.EmptyT}


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | ident | numeral | symbol | eof
    lexeme: str
    span: Span


def _byte_offsets(source: str):
    if source.isascii():
        return None
    table, pos = [], 0
    for ch in source:
        table.append(pos)
        pos += len(ch.encode("utf-8"))
    table.append(pos)
    return table


def tokenize(source: str) -> List[Token]:
    """Split ``source`` into tokens with half-open byte-offset spans."""
    table = _byte_offsets(source)

    def span(a: int, b: int) -> Span:
        return (a, b) if table is None else (table[a], table[b])

    tokens: List[Token] = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError("IllegalCharacter", f"illegal character {source[pos]!r}", span(pos, pos + 1))
        kind = m.lastgroup
        text = m.group()
        if kind == "ident":
            kind = "keyword" if text in KEYWORDS else "ident"
        elif kind == "directive":
            kind = "keyword"
        elif kind == "num":
            kind = "numeral"
        elif kind == "sym":
            kind = "symbol"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, span(m.start(), m.end())))
        pos = m.end()
    end = len(source) if table is None else table[-1]
    tokens.append(Token("eof", "", (end, end)))
    return tokens


# ----------------------------------------------------------------------
# surface syntax: core terms whose variables are still names


@dataclass(frozen=True, slots=True)
class SVar(Term):
    name: str
    span: Optional[Span] = None


@dataclass(frozen=True, slots=True)
class SShift(Term):
    """A binder-group domain repeated under ``k`` earlier binders of the group."""

    t: Term
    k: int
    span: Optional[Span] = None


@dataclass(frozen=True, slots=True)
class SElim(Term):
    keyword: str
    args: Tuple[Term, ...]
    span: Optional[Span] = None


@dataclass(frozen=True)
class SurfaceDecl:
    kind: DeclKind
    name: str
    type: Optional[Term] = None
    body: Optional[Term] = None
    span: Optional[Span] = None
    name_span: Optional[Span] = None


class Parser:
    def __init__(self, tokens: Sequence[Token]):
        self.tokens = tokens
        self.pos = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, lexeme: str) -> bool:
        t = self.tok
        return t.lexeme == lexeme and t.kind in ("symbol", "keyword")

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, expected: Iterable[str]):
        t = self.tok
        exp = ", ".join(sorted(set(expected)))
        if t.kind == "eof":
            opener = self._unclosed_paren()
            if opener is not None:
                raise ParseError("UnbalancedDelimiter", "unclosed '('", opener.span)
            raise ParseError("UnexpectedToken", f"unexpected end of input, expected {exp}", t.span)
        if t.lexeme == ")" and self._unclosed_paren() is None:
            raise ParseError("UnbalancedDelimiter", "unmatched ')'", t.span)
        raise ParseError("UnexpectedToken", f"unexpected {t.lexeme!r}, expected {exp}", t.span)

    def _unclosed_paren(self) -> Optional[Token]:
        stack = []
        for t in self.tokens[: self.pos]:
            if t.kind == "symbol" and t.lexeme == "(":
                stack.append(t)
            elif t.kind == "symbol" and t.lexeme == ")" and stack:
                stack.pop()
        return stack[-1] if stack else None

    def expect(self, lexeme: str) -> Token:
        if not self.at(lexeme):
            self.fail([repr(lexeme)])
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail(["identifier"])
        return self.advance()

    def span_from(self, start: int) -> Span:
        last = self.tokens[self.pos - 1] if self.pos > 0 else self.tok
        return (start, max(start, last.span[1]))

    # declarations

    def program(self) -> List[SurfaceDecl]:
        decls = []
        while self.tok.kind != "eof":
            decls.append(self.declaration())
        return decls

    def declaration(self) -> SurfaceDecl:
        start = self.tok.span[0]
        if self.at("def") or self.at("postulate"):
            is_def = self.advance().lexeme == "def"
            name = self.ident()
            groups = self.binder_groups()
            self.expect(":")
            ty = self.wrap_pi(groups, self.expr())
            body = None
            if is_def:
                self.expect(":=")
                body = self.wrap_lam(groups, self.expr())
            kind = DeclKind.DEF if is_def else DeclKind.POSTULATE
            return SurfaceDecl(kind, name.lexeme, ty, body, self.span_from(start), name.span)
        if self.at("import"):
            self.advance()
            name = self.ident()
            return SurfaceDecl(DeclKind.IMPORT, name.lexeme, span=self.span_from(start), name_span=name.span)
        if self.at("#check") or self.at("#eval"):
            kw = self.advance().lexeme
            body = self.expr()
            kind = DeclKind.CHECK if kw == "#check" else DeclKind.EVAL
            return SurfaceDecl(kind, kw, body=body, span=self.span_from(start))
        self.fail(["'def'", "'postulate'", "'import'", "'#check'", "'#eval'"])

    def binder_groups(self) -> List[Tuple[List[Token], Term]]:
        groups = []
        while self.at("("):
            self.advance()
            names = [self.binder_name()]
            while self.tok.kind == "ident":
                names.append(self.advance())
            self.expect(":")
            ty = self.expr()
            self.expect(")")
            groups.append((names, ty))
        return groups

    def binder_name(self) -> Token:
        return self.ident()

    def try_binder_groups(self) -> Optional[List[Tuple[List[Token], Term]]]:
        """Parse ``(x y : A) (z : B)`` if it is followed by ``->`` or ``*``."""
        if not (self.at("(") and self.tokens[self.pos + 1].kind == "ident"):
            return None
        saved = self.pos
        try:
            groups = self.binder_groups()
        except ParseError:
            self.pos = saved
            return None
        if self.at("->") or self.at("*"):
            return groups
        self.pos = saved
        return None

    @staticmethod
    def _flatten(groups):
        for names, ty in groups:
            for i, name in enumerate(names):
                yield name, (ty if i == 0 else SShift(ty, i, span=ty.span))

    def wrap_pi(self, groups, body: Term, former=s.Pi) -> Term:
        for name, ty in reversed(list(self._flatten(groups))):
            body = former(name.lexeme, ty, body, span=(name.span[0], _end(body)))
        return body

    def wrap_lam(self, groups, body: Term) -> Term:
        for name, ty in reversed(list(self._flatten(groups))):
            body = s.Lam(name.lexeme, body, span=(name.span[0], _end(body)))
        return body

    # expressions

    def expr(self) -> Term:
        if self.at("\\"):
            return self.lam()
        return self.arrow()

    def lam(self) -> Term:
        start = self.advance().span[0]
        binders: List[Tuple[Token, Optional[Term]]] = []
        while True:
            if self.tok.kind == "ident":
                binders.append((self.advance(), None))
            elif self.at("("):
                for name, ty in self._flatten(self.binder_groups()):
                    binders.append((name, ty))
            else:
                break
        if not binders:
            self.fail(["identifier", "'('"])
        self.expect(".")
        body = self.expr()
        for name, ty in reversed(binders):
            body = s.Lam(name.lexeme, body, ty, span=(start, _end(body)))
        return body

    def arrow(self) -> Term:
        start = self.tok.span[0]
        groups = self.try_binder_groups()
        if groups is not None and self.at("->"):
            self.advance()
            return self.wrap_pi(groups, self.arrow_rhs())
        if groups is not None:  # followed by '*'
            self.advance()
            lhs = self.wrap_pi(groups, self.prod(), former=s.Sigma)
        else:
            lhs = self.prod()
        if self.at("->"):
            self.advance()
            rhs = self.arrow_rhs()
            return s.Pi("_", lhs, rhs, span=(start, _end(rhs)))
        return lhs

    def arrow_rhs(self) -> Term:
        return self.lam() if self.at("\\") else self.arrow()

    def prod(self) -> Term:
        start = self.tok.span[0]
        groups = self.try_binder_groups()
        if groups is not None and self.at("*"):
            self.advance()
            return self.wrap_pi(groups, self.prod(), former=s.Sigma)
        if groups is not None:
            # binder groups followed by '->' inside a product operand
            self.advance()
            return self.wrap_pi(groups, self.arrow_rhs())
        lhs = self.sum()
        if self.at("*"):
            self.advance()
            rhs = self.prod()
            return s.Sigma("_", lhs, rhs, span=(start, _end(rhs)))
        return lhs

    def sum(self) -> Term:
        start = self.tok.span[0]
        lhs = self.app()
        if self.at("+"):
            self.advance()
            rhs = self.sum()
            return s.Sum(lhs, rhs, span=(start, _end(rhs)))
        return lhs

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("ident", "numeral"):
            return True
        if t.kind == "keyword":
            return t.lexeme == "U" or t.lexeme in ARITY or t.lexeme in CONSTANTS
        return t.kind == "symbol" and t.lexeme == "("

    def app(self) -> Term:
        start = self.tok.span[0]
        if self.tok.kind == "keyword" and self.tok.lexeme in ARITY:
            head = self.keyword_form()
        else:
            head = self.atom()
        while self.starts_atom() or self.at("\\"):
            if self.at("\\"):
                arg = self.lam()
                return s.App(head, arg, span=(start, _end(arg)))
            arg = self.atom()
            head = s.App(head, arg, span=(start, _end(arg)))
        return head

    def keyword_form(self) -> Term:
        kw = self.advance()
        args = tuple(self.atom() for _ in range(ARITY[kw.lexeme]))
        return SElim(kw.lexeme, args, span=(kw.span[0], _end(args[-1])))

    def atom(self) -> Term:
        t = self.tok
        if t.kind == "ident":
            self.advance()
            return SVar(t.lexeme, span=t.span)
        if t.kind == "numeral":
            self.advance()
            return s.numeral(int(t.lexeme), span=t.span)
        if t.kind == "keyword":
            if t.lexeme == "U":
                self.advance()
                if self.tok.kind != "numeral":
                    self.fail(["universe level"])
                n = self.advance()
                return s.Univ(int(n.lexeme), span=(t.span[0], n.span[1]))
            if t.lexeme in CONSTANTS:
                self.advance()
                return CONSTANTS[t.lexeme](span=t.span)
            if t.lexeme in ARITY:
                self.fail(["atom (parenthesize keyword applications)"])
        if self.at("("):
            open_tok = self.advance()
            inner = self.expr()
            if self.at(")"):
                self.advance()
                return inner
            if self.at(":"):
                self.advance()
                ty = self.expr()
                close = self.expect(")")
                return s.Ann(inner, ty, span=(open_tok.span[0], close.span[1]))
            if self.at(","):
                items = [inner]
                while self.at(","):
                    self.advance()
                    items.append(self.expr())
                close = self.expect(")")
                out = items[-1]
                for item in reversed(items[:-1]):
                    out = s.Pair(item, out, span=(_start(item), _end(out)))
                return s.replace_span(out, (open_tok.span[0], close.span[1]))
            self.fail(["')'", "':'", "','"])
        self.fail(["expression"])


def _end(t: Term) -> int:
    return t.span[1] if t.span else 0


def _start(t: Term) -> int:
    return t.span[0] if t.span else 0


def parse_program(tokens: Sequence[Token]) -> List[SurfaceDecl]:
    return Parser(tokens).program()


def parse_source(source: str) -> List[SurfaceDecl]:
    return parse_program(tokenize(source))


def parse_expr(source: str) -> Term:
    p = Parser(tokenize(source))
    t = p.expr()
    if p.tok.kind != "eof":
        p.fail(["end of input"])
    return t


# ----------------------------------------------------------------------
# name resolution


class Resolver:
    def __init__(self, globals: Container[str]):
        self.globals = globals

    def resolve(self, t: Term, scope: Tuple[str, ...]) -> Term:
        match t:
            case SVar(name, span):
                if name != "_":
                    for i in range(len(scope) - 1, -1, -1):
                        if scope[i] == name:
                            return s.Var(len(scope) - 1 - i, span=span)
                    if name in self.globals:
                        return s.Global(name, span=span)
                raise ParseError("UnboundIdentifier", f"unbound identifier {name}", span)
            case SShift(inner, k):
                return s.shift_term(self.resolve(inner, scope[: len(scope) - k]), 0, k)
            case SElim():
                return self.elim(t, scope)
            case s.Pi(hint, dom, cod, span) | s.Sigma(hint, dom, cod, span):
                return type(t)(hint, self.resolve(dom, scope), self.resolve(cod, scope + (hint,)), span=span)
            case s.Lam(hint, body, dom, span):
                dom = None if dom is None else self.resolve(dom, scope)
                return s.Lam(hint, self.resolve(body, scope + (hint,)), dom, span=span)
        return s.map_children(t, lambda child, bound: self.resolve(child, scope))

    def binder(self, t: Term, scope: Tuple[str, ...], n: int, default: Sequence[str]):
        """Resolve ``t`` as the body of ``n`` binders, peeling leading lambdas.

        Arguments that are not syntactic lambdas are eta-expanded.
        """
        names: List[str] = []
        while len(names) < n and isinstance(t, s.Lam):
            names.append(t.hint)
            t = t.body
        body = self.resolve(t, scope + tuple(names))
        k = n - len(names)
        if k:
            body = s.shift_term(body, 0, k)
            for i in range(k - 1, -1, -1):
                body = s.App(body, s.Var(i), span=body.span)
            names.extend(default[len(names):n])
        return body, tuple(names)

    def elim(self, t: SElim, scope: Tuple[str, ...]) -> Term:
        kw, args, span = t.keyword, t.args, t.span
        r = lambda a: self.resolve(a, scope)
        match kw:
            case "fst":
                return s.Fst(r(args[0]), span=span)
            case "snd":
                return s.Snd(r(args[0]), span=span)
            case "inl":
                return s.Inl(r(args[0]), span=span)
            case "inr":
                return s.Inr(r(args[0]), span=span)
            case "suc":
                return s.Suc(r(args[0]), span=span)
            case "refl":
                return s.Refl(r(args[0]), span=span)
            case "Trunc":
                return s.TruncT(r(args[0]), span=span)
            case "tr":
                return s.TrIntro(r(args[0]), span=span)
            case "Id":
                return s.IdT(r(args[0]), r(args[1]), r(args[2]), span=span)
            case "htr":
                return s.TruncEq(r(args[0]), r(args[1]), span=span)
            case "trec":
                return s.TrRec(r(args[0]), r(args[1]), r(args[2]), r(args[3]), span=span)
            case "case":
                m, (hz,) = self.binder(args[0], scope, 1, ("z",))
                f, (hx,) = self.binder(args[1], scope, 1, ("x",))
                g, (hy,) = self.binder(args[2], scope, 1, ("y",))
                return s.SumCase(m, f, g, r(args[3]), (hz, hx, hy), span=span)
            case "absurd":
                m, (hz,) = self.binder(args[0], scope, 1, ("z",))
                return s.Absurd(m, r(args[1]), hz, span=span)
            case "natrec":
                m, (hn,) = self.binder(args[0], scope, 1, ("n",))
                step, (hm, hih) = self.binder(args[2], scope, 2, ("m", "ih"))
                return s.NatRec(m, r(args[1]), step, r(args[3]), (hn, hm, hih), span=span)
            case "J":
                m, (hx, hy, hp) = self.binder(args[0], scope, 3, ("x", "y", "p"))
                d, (hd,) = self.binder(args[1], scope, 1, ("x",))
                return s.J(m, d, r(args[2]), (hx, hy, hp, hd), span=span)
            case "tind":
                m, (hz,) = self.binder(args[0], scope, 1, ("z",))
                return s.TrInd(m, r(args[1]), r(args[2]), r(args[3]), hz, span=span)
        raise AssertionError(kw)


def resolve_term(t: Term, globals: Container[str], scope: Tuple[str, ...] = ()) -> Term:
    return Resolver(globals).resolve(t, scope)


def resolve_decl(d: SurfaceDecl, globals: Container[str]) -> s.Declaration:
    if d.kind in (DeclKind.DEF, DeclKind.POSTULATE) and d.name in globals:
        raise ParseError("DuplicateDefinition", f"{d.name} is already defined", d.name_span)
    res = Resolver(globals)
    ty = None if d.type is None else res.resolve(d.type, ())
    body = None if d.body is None else res.resolve(d.body, ())
    return s.Declaration(d.kind, d.name, ty, body, d.span)


def resolve(decls: Iterable[SurfaceDecl], scope: Iterable[str] = ()) -> List[s.Declaration]:
    """Resolve a sequence of declarations, each seeing the globals before it."""
    known = set(scope)
    out = []
    for d in decls:
        out.append(resolve_decl(d, known))
        if d.kind in (DeclKind.DEF, DeclKind.POSTULATE):
            known.add(d.name)
    return out
