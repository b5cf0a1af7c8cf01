"""Semantic domain for normalization by evaluation.

A value is canonical (a constructor or type former), neutral (a stuck
eliminator spine on a variable, postulate or ``htr`` head), or a glued global:
a defined constant applied to arguments whose unfolding is computed on demand.
Values are never mutated after construction; the only state is the memoised
unfolding of a glued global, which behaves as a pure cache.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Tuple

from .syntax import Term

Env = Tuple["Value", ...]


class Value:
    __slots__ = ()


@dataclass(slots=True, eq=False)
class Closure:
    env: Env
    body: Term


@dataclass(slots=True, eq=False)
class VUniv(Value):
    level: int


@dataclass(slots=True, eq=False)
class VPi(Value):
    hint: str
    dom: Value
    cod: Closure


@dataclass(slots=True, eq=False)
class VLam(Value):
    hint: str
    body: Closure


@dataclass(slots=True, eq=False)
class VSigma(Value):
    hint: str
    dom: Value
    cod: Closure


@dataclass(slots=True, eq=False)
class VPair(Value):
    fst: Value
    snd: Value


@dataclass(slots=True, eq=False)
class VSum(Value):
    left: Value
    right: Value


@dataclass(slots=True, eq=False)
class VInl(Value):
    v: Value


@dataclass(slots=True, eq=False)
class VInr(Value):
    v: Value


@dataclass(slots=True, eq=False)
class VUnit(Value):
    pass


@dataclass(slots=True, eq=False)
class VStar(Value):
    pass


@dataclass(slots=True, eq=False)
class VEmpty(Value):
    pass


@dataclass(slots=True, eq=False)
class VNat(Value):
    pass


@dataclass(slots=True, eq=False)
class VZero(Value):
    pass


@dataclass(slots=True, eq=False)
class VSuc(Value):
    v: Value


@dataclass(slots=True, eq=False)
class VId(Value):
    ty: Value
    lhs: Value
    rhs: Value


@dataclass(slots=True, eq=False)
class VRefl(Value):
    v: Value


@dataclass(slots=True, eq=False)
class VTrunc(Value):
    ty: Value


@dataclass(slots=True, eq=False)
class VTrIntro(Value):
    v: Value


# Neutral heads carry their own type so that readback and conversion can walk
# a spine without consulting a typing context.


@dataclass(slots=True, eq=False)
class HVar:
    level: int
    type: Value
    hint: str = "x"


@dataclass(slots=True, eq=False)
class HPostulate:
    name: str
    type: Value


@dataclass(slots=True, eq=False)
class HTruncEq:
    ty: Value  # the truncated type A; the head lives in Id (Trunc A) lhs rhs
    lhs: Value
    rhs: Value


Head = Any


@dataclass(slots=True, eq=False)
class FApp:
    arg: Value


@dataclass(slots=True, eq=False)
class FFst:
    pass


@dataclass(slots=True, eq=False)
class FSnd:
    pass


@dataclass(slots=True, eq=False)
class FSumCase:
    motive: Closure
    on_left: Closure
    on_right: Closure
    hints: Tuple[str, str, str]


@dataclass(slots=True, eq=False)
class FAbsurd:
    motive: Closure
    hint: str


@dataclass(slots=True, eq=False)
class FNatRec:
    motive: Closure
    zero_case: Value
    suc_case: Closure
    hints: Tuple[str, str, str]


@dataclass(slots=True, eq=False)
class FJ:
    motive: Closure
    base: Closure
    hints: Tuple[str, str, str, str]


@dataclass(slots=True, eq=False)
class FTrRec:
    motive_type: Value
    prop_proof: Value
    fn: Value
    carrier: Optional[Value] = None


@dataclass(slots=True, eq=False)
class FTrInd:
    motive: Closure
    prop_proof: Value
    fn: Value
    hint: str
    carrier: Optional[Value] = None


Frame = Any


@dataclass(slots=True, eq=False)
class VNeutral(Value):
    head: Head
    spine: Tuple[Frame, ...] = ()


@dataclass(slots=True, eq=False)
class VGlobal(Value):
    """A defined constant applied to ``args``, unfolded lazily."""

    name: str
    args: Tuple[Value, ...]
    type: Value
    unfold: Callable[[], Value]
    _forced: Optional[Value] = field(default=None)

    def force(self) -> Value:
        if self._forced is None:
            self._forced = self.unfold()
        return self._forced


UNIT = VUnit()
STAR = VStar()
EMPTY = VEmpty()
NAT = VNat()
ZERO = VZero()


def force(v: Value) -> Value:
    """Unfold glued globals until the value is canonical or neutral."""
    while isinstance(v, VGlobal):
        v = v.force()
    return v


def fresh_var(level: int, ty: Value, hint: str = "x") -> VNeutral:
    return VNeutral(HVar(level, ty, hint))


@dataclass
class Context:
    """Typing telescope paired with the matching evaluation environment."""

    names: Tuple[str, ...] = ()
    types: Tuple[Value, ...] = ()
    env: Env = ()

    @property
    def depth(self) -> int:
        return len(self.env)

    def bind(self, name: str, ty: Value) -> "Context":
        var = fresh_var(len(self.env), ty, name)
        return Context(self.names + (name,), self.types + (ty,), self.env + (var,))

    def define(self, name: str, ty: Value, value: Value) -> "Context":
        return Context(self.names + (name,), self.types + (ty,), self.env + (value,))

    def lookup(self, ix: int) -> Value:
        return self.types[len(self.types) - 1 - ix]
