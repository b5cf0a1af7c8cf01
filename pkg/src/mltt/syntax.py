"""Core term language.

Terms are nameless: bound variables are de Bruijn indices, and every binder
keeps a name hint for printing only. Hints and source spans are excluded from
equality, so ``==`` on terms is alpha-equivalence.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Optional, Tuple

Span = Tuple[int, int]


def _span():
    return field(default=None, compare=False, repr=False)


def _hint():
    return field(compare=False)


def _carrier():
    # The A of the Trunc A being eliminated or equated. Not surface syntax:
    # the checker fills it in once known, and readback emits it, so that the
    # evaluator can type truncation heads and normal forms stay checkable.
    return field(default=None, compare=False, repr=False)


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    ix: int
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Global(Term):
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Univ(Term):
    level: int
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Pi(Term):
    hint: str = _hint()
    dom: Term
    cod: Term  # binds 1
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Lam(Term):
    hint: str = _hint()
    body: Term  # binds 1
    dom: Optional[Term] = None  # optional annotation, makes the lambda inferable
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: Term
    arg: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Sigma(Term):
    hint: str = _hint()
    dom: Term
    cod: Term  # binds 1
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Pair(Term):
    fst: Term
    snd: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Fst(Term):
    t: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Snd(Term):
    t: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Sum(Term):
    left: Term
    right: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Inl(Term):
    t: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Inr(Term):
    t: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class SumCase(Term):
    motive: Term  # binds 1
    on_left: Term  # binds 1
    on_right: Term  # binds 1
    scrut: Term
    hints: Tuple[str, str, str] = field(default=("z", "x", "y"), compare=False)
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class UnitT(Term):
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Star(Term):
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class EmptyT(Term):
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Absurd(Term):
    motive: Term  # binds 1
    scrut: Term
    hint: str = field(default="z", compare=False)
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class NatT(Term):
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Zero(Term):
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Suc(Term):
    t: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class NatRec(Term):
    motive: Term  # binds 1
    zero_case: Term
    suc_case: Term  # binds 2: predecessor, then induction hypothesis
    scrut: Term
    hints: Tuple[str, str, str] = field(default=("n", "m", "ih"), compare=False)
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class IdT(Term):
    ty: Term
    lhs: Term
    rhs: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class Refl(Term):
    t: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class J(Term):
    motive: Term  # binds 3: x, y, p
    base: Term  # binds 1: x
    path: Term
    hints: Tuple[str, str, str, str] = field(default=("x", "y", "p", "x"), compare=False)
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class TruncT(Term):
    ty: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class TrIntro(Term):
    t: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True, slots=True)
class TrRec(Term):
    motive_type: Term
    prop_proof: Term
    fn: Term
    scrut: Term
    span: Optional[Span] = _span()
    carrier: Optional[Term] = _carrier()


@dataclass(frozen=True, slots=True)
class TrInd(Term):
    motive: Term  # binds 1
    prop_proof: Term
    fn: Term
    scrut: Term
    hint: str = field(default="z", compare=False)
    span: Optional[Span] = _span()
    carrier: Optional[Term] = _carrier()


@dataclass(frozen=True, slots=True)
class TruncEq(Term):
    lhs: Term
    rhs: Term
    span: Optional[Span] = _span()
    carrier: Optional[Term] = _carrier()


@dataclass(frozen=True, slots=True)
class Ann(Term):
    t: Term
    ty: Term
    span: Optional[Span] = _span()


# Number of variables each child of a node binds, for the binder-aware
# traversals below. Children not listed bind nothing.
BINDERS = {
    Pi: {"cod": 1},
    Lam: {"body": 1},
    Sigma: {"cod": 1},
    SumCase: {"motive": 1, "on_left": 1, "on_right": 1},
    Absurd: {"motive": 1},
    NatRec: {"motive": 1, "suc_case": 2},
    J: {"motive": 3, "base": 1},
    TrInd: {"motive": 1},
}

_NON_TERM_FIELDS = {"span", "hint", "hints", "ix", "name", "level"}


def children(t: Term):
    """Yield ``(field_name, child, bound)`` for every subterm of ``t``."""
    binds = BINDERS.get(type(t), {})
    for f in fields(t):
        if f.name in _NON_TERM_FIELDS:
            continue
        child = getattr(t, f.name)
        if child is not None:
            yield f.name, child, binds.get(f.name, 0)


def map_children(t: Term, fn) -> Term:
    """Rebuild ``t`` with ``fn(child, bound)`` applied to each subterm."""
    changes = {name: fn(child, bound) for name, child, bound in children(t)}
    if not changes:
        return t
    return replace(t, **changes)


class ScopeError(Exception):
    """A de Bruijn index fell out of range: an internal invariant violation."""


def shift_term(t: Term, cutoff: int, amount: int) -> Term:
    """Add ``amount`` to every free index ``>= cutoff``."""
    if amount == 0:
        return t

    def go(t: Term, c: int) -> Term:
        if isinstance(t, Var):
            if t.ix < c:
                return t
            if t.ix + amount < 0:
                raise ScopeError(f"index {t.ix} shifted by {amount} underflows")
            return Var(t.ix + amount, span=t.span)
        return map_children(t, lambda child, bound: go(child, c + bound))

    return go(t, cutoff)


def alpha_equal(t1: Term, t2: Term) -> bool:
    return t1 == t2


def free_globals(t: Term, acc: Optional[set] = None) -> set:
    acc = set() if acc is None else acc
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Global):
            acc.add(t.name)
        else:
            stack.extend(child for _, child, _ in children(t))
    return acc


def max_free_index(t: Term) -> int:
    """Largest free de Bruijn index in ``t``, or -1 when closed."""
    best = -1
    stack = [(t, 0)]
    while stack:
        t, depth = stack.pop()
        if isinstance(t, Var):
            if t.ix >= depth:
                best = max(best, t.ix - depth)
        else:
            stack.extend((child, depth + bound) for _, child, bound in children(t))
    return best


def numeral(n: int, span: Optional[Span] = None) -> Term:
    t: Term = Zero(span=span)
    for _ in range(n):
        t = Suc(t, span=span)
    return t


class DeclKind(Enum):
    DEF = "def"
    POSTULATE = "postulate"
    CHECK = "#check"
    EVAL = "#eval"
    IMPORT = "import"


@dataclass(frozen=True)
class Declaration:
    kind: DeclKind
    name: str
    type: Optional[Term] = None
    body: Optional[Term] = None
    span: Optional[Span] = field(default=None, compare=False)
    postulates: frozenset = frozenset()

    def __post_init__(self):
        if self.kind is DeclKind.DEF and (self.body is None or self.type is None):
            raise ValueError(f"definition {self.name} needs a type and a body")
        if self.kind is DeclKind.POSTULATE and self.body is not None:
            raise ValueError(f"postulate {self.name} cannot have a body")


def replace_span(t: Term, span: Optional[Span]) -> Term:
    return replace(t, span=span)
