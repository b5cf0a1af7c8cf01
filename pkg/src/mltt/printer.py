"""Canonical printer: emits surface syntax with only the parentheses the
grammar requires, choosing binder names that neither capture nor shadow."""
from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Set

from . import syntax as s
from .parser import KEYWORDS
from .syntax import Term

# precedence levels, loosest first
EXPR, PROD, SUM, APP, ATOM = range(5)


def _occurs(t: Term, ix: int) -> bool:
    """Does ``Var ix`` occur free in ``t``?"""
    stack = [(t, ix)]
    while stack:
        t, i = stack.pop()
        if isinstance(t, s.Var):
            if t.ix == i:
                return True
        else:
            stack.extend((child, i + bound) for name, child, bound in s.children(t) if name != "carrier")
    return False


class Printer:
    def __init__(self, avoid: Iterable[str] = ()):
        self.avoid: Set[str] = set(avoid)

    def fresh(self, hint: str, names: Sequence[str]) -> str:
        cand = hint if hint and hint != "_" else "x"
        base = cand.rstrip("0123456789") or "x"
        n = 0
        while cand in names or cand in self.avoid or cand in KEYWORDS:
            n += 1
            cand = f"{base}{n}"
        return cand

    def binder_name(self, hint: str, body: Term, names: List[str], nbound: int = 1, pos: int = 0) -> str:
        """Name for a binder; ``_`` when the variable is unused in ``body``."""
        if not _occurs(body, nbound - 1 - pos) and hint in ("_", ""):
            return "_"
        return self.fresh(hint, names)

    def show(self, t: Term, names: List[str], prec: int = EXPR) -> str:
        text, level = self.go(t, names)
        return f"({text})" if level < prec else text

    def go(self, t: Term, names: List[str]):
        show = self.show
        match t:
            case s.Var(ix):
                if ix < len(names):
                    return names[len(names) - 1 - ix], ATOM
                return f"#{ix}", ATOM
            case s.Global(name):
                return name, ATOM
            case s.Univ(level):
                return f"U {level}", ATOM
            case s.Pi(hint, dom, cod):
                if not _occurs(cod, 0):
                    return f"{show(dom, names, PROD)} -> {show(cod, names + ['_'], EXPR)}", EXPR
                x = self.fresh(hint, names)
                return f"({x} : {show(dom, names)}) -> {show(cod, names + [x], EXPR)}", EXPR
            case s.Sigma(hint, dom, cod):
                if not _occurs(cod, 0):
                    return f"{show(dom, names, SUM)} * {show(cod, names + ['_'], PROD)}", PROD
                x = self.fresh(hint, names)
                return f"({x} : {show(dom, names)}) * {show(cod, names + [x], PROD)}", PROD
            case s.Lam():
                return self.lam(t, names), EXPR
            case s.App(fn, arg):
                return f"{show(fn, names, APP)} {show(arg, names, ATOM)}", APP
            case s.Pair():
                items = []
                while isinstance(t, s.Pair):
                    items.append(show(t.fst, names))
                    t = t.snd
                items.append(show(t, names))
                return "(" + " , ".join(items) + ")", ATOM
            case s.Fst(p):
                return f"fst {show(p, names, ATOM)}", APP
            case s.Snd(p):
                return f"snd {show(p, names, ATOM)}", APP
            case s.Sum(left, right):
                return f"{show(left, names, APP)} + {show(right, names, SUM)}", SUM
            case s.Inl(a):
                return f"inl {show(a, names, ATOM)}", APP
            case s.Inr(a):
                return f"inr {show(a, names, ATOM)}", APP
            case s.SumCase(m, f, g, scrut, hints):
                parts = [
                    self.binder_arg(m, names, (hints[0],)),
                    self.binder_arg(f, names, (hints[1],)),
                    self.binder_arg(g, names, (hints[2],)),
                    show(scrut, names, ATOM),
                ]
                return "case " + " ".join(parts), APP
            case s.UnitT():
                return "Unit", ATOM
            case s.Star():
                return "star", ATOM
            case s.EmptyT():
                return "Empty", ATOM
            case s.Absurd(m, scrut, hint):
                return f"absurd {self.binder_arg(m, names, (hint,))} {show(scrut, names, ATOM)}", APP
            case s.NatT():
                return "Nat", ATOM
            case s.Zero():
                return "zero", ATOM
            case s.Suc(n):
                return f"suc {show(n, names, ATOM)}", APP
            case s.NatRec(m, z, step, scrut, hints):
                parts = [
                    self.binder_arg(m, names, (hints[0],)),
                    show(z, names, ATOM),
                    self.binder_arg(step, names, (hints[1], hints[2])),
                    show(scrut, names, ATOM),
                ]
                return "natrec " + " ".join(parts), APP
            case s.IdT(ty, lhs, rhs):
                return f"Id {show(ty, names, ATOM)} {show(lhs, names, ATOM)} {show(rhs, names, ATOM)}", APP
            case s.Refl(a):
                return f"refl {show(a, names, ATOM)}", APP
            case s.J(m, d, p, hints):
                parts = [
                    self.binder_arg(m, names, hints[:3]),
                    self.binder_arg(d, names, hints[3:]),
                    show(p, names, ATOM),
                ]
                return "J " + " ".join(parts), APP
            case s.TruncT(ty):
                return f"Trunc {show(ty, names, ATOM)}", APP
            case s.TrIntro(a):
                return f"tr {show(a, names, ATOM)}", APP
            case s.TrRec(p, h, f, z):
                return "trec " + " ".join(show(x, names, ATOM) for x in (p, h, f, z)), APP
            case s.TrInd(m, h, f, z, hint):
                parts = [self.binder_arg(m, names, (hint,))] + [show(x, names, ATOM) for x in (h, f, z)]
                return "tind " + " ".join(parts), APP
            case s.TruncEq(lhs, rhs):
                return f"htr {show(lhs, names, ATOM)} {show(rhs, names, ATOM)}", APP
            case s.Ann(a, ty):
                return f"({show(a, names)} : {show(ty, names)})", ATOM
        raise TypeError(f"cannot print {t!r}")

    def binder_arg(self, body: Term, names: List[str], hints: Sequence[str]) -> str:
        n = len(hints)
        bound: List[str] = []
        for i, hint in enumerate(hints):
            if _occurs(body, n - 1 - i):
                bound.append(self.fresh(hint, names + bound))
            else:
                bound.append("_")
        return f"(\\{' '.join(bound)}. {self.show(body, names + bound)})"

    def lam(self, t: Term, names: List[str]) -> str:
        binders = []
        inner = list(names)
        while isinstance(t, s.Lam):
            used = _occurs(t.body, 0)
            x = self.fresh(t.hint, inner) if used or t.hint not in ("_", "") else "_"
            if t.dom is not None:
                binders.append(f"({x} : {self.show(t.dom, inner)})")
            else:
                binders.append(x)
            inner.append(x)
            t = t.body
        return f"\\{' '.join(binders)}. {self.show(t, inner)}"


def print_term(t: Term, names: Optional[Sequence[str]] = None) -> str:
    return Printer(s.free_globals(t)).show(t, list(names or []))


def print_decl(d: s.Declaration) -> str:
    match d.kind:
        case s.DeclKind.DEF:
            return f"def {d.name} : {print_term(d.type)} := {print_term(d.body)}"
        case s.DeclKind.POSTULATE:
            return f"postulate {d.name} : {print_term(d.type)}"
        case s.DeclKind.IMPORT:
            return f"import {d.name}"
    return f"{d.kind.value} {print_term(d.body)}"
