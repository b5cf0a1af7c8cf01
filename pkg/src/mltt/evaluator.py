"""Normalization by evaluation.

``Evaluator.evaluate`` maps terms to values, ``readback`` maps values back to
beta-normal, eta-long terms (eta at Pi, Sigma and Unit), and ``convertible``
decides definitional equality by a type-directed comparison that never
materialises normal forms.

Heads whose type is unknown (a blocked ``tr a`` in weak mode, ``htr``) are
compared and read back structurally, without eta, until a frame's result
type is known again.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Sequence, Tuple

from . import syntax as s
from .syntax import Term
from .values import (
    EMPTY,
    NAT,
    STAR,
    UNIT,
    ZERO,
    Closure,
    Env,
    FAbsurd,
    FApp,
    FFst,
    FJ,
    FNatRec,
    FSnd,
    FSumCase,
    FTrInd,
    FTrRec,
    HPostulate,
    HTruncEq,
    HVar,
    Value,
    VEmpty,
    VGlobal,
    VId,
    VInl,
    VInr,
    VLam,
    VNat,
    VNeutral,
    VPair,
    VPi,
    VRefl,
    VSigma,
    VStar,
    VSuc,
    VSum,
    VTrIntro,
    VTrunc,
    VUnit,
    VUniv,
    VZero,
    force,
    fresh_var,
)


class EvalError(Exception):
    """Ill-scoped or ill-typed input reached the evaluator (a kernel bug)."""


@dataclass(frozen=True)
class EvalMode:
    trunc_beta: bool = False


@dataclass(slots=True, eq=False)
class HBlockedTr:
    """``tr a`` under an eliminator that may not compute (weak mode)."""

    arg: Value
    ty: Optional[Value] = None  # the type of ``arg``, when known


@dataclass(eq=False)
class GlobalEntry:
    name: str
    kind: str  # "def", "postulate", or "opaque" (a definition that failed to check)
    type: Value
    body: Optional[Term] = None
    type_term: Optional[Term] = None
    postulates: frozenset = frozenset()
    blocked_by: frozenset = frozenset()
    _value: Optional[Value] = field(default=None, repr=False)


# Fixed open terms used to build value types on the fly. Each is evaluated in
# an environment whose last entries are listed in the comment.
_ARROW_COD = s.Var(1)  # env (B, x): B
_IS_PROP = s.Pi("y", s.Var(1), s.IdT(s.Var(2), s.Var(1), s.Var(0)))  # env (P, x)


def arrow(dom: Value, cod: Value, hint: str = "_") -> VPi:
    return VPi(hint, dom, Closure((cod,), _ARROW_COD))


def is_prop(p: Value) -> VPi:
    """``(x y : P) -> Id P x y``."""
    return VPi("x", p, Closure((p,), _IS_PROP))


class Evaluator:
    def __init__(self, globals: Mapping[str, GlobalEntry], mode: EvalMode = EvalMode()):
        self.globals = globals
        self.mode = mode

    # ------------------------------------------------------------------
    # evaluation

    def evaluate(self, env: Env, t: Term) -> Value:
        match t:
            case s.Var(ix):
                if ix >= len(env):
                    raise EvalError(f"unbound index {ix} in environment of size {len(env)}")
                return env[len(env) - 1 - ix]
            case s.Global(name):
                return self.global_value(name)
            case s.Univ(level):
                return VUniv(level)
            case s.Pi(hint, dom, cod):
                return VPi(hint, self.evaluate(env, dom), Closure(env, cod))
            case s.Lam(hint, body):
                return VLam(hint, Closure(env, body))
            case s.App(fn, arg):
                return self.apply(self.evaluate(env, fn), self.evaluate(env, arg))
            case s.Sigma(hint, dom, cod):
                return VSigma(hint, self.evaluate(env, dom), Closure(env, cod))
            case s.Pair(a, b):
                return VPair(self.evaluate(env, a), self.evaluate(env, b))
            case s.Fst(p):
                return self.fst(self.evaluate(env, p))
            case s.Snd(p):
                return self.snd(self.evaluate(env, p))
            case s.Sum(left, right):
                return VSum(self.evaluate(env, left), self.evaluate(env, right))
            case s.Inl(a):
                return VInl(self.evaluate(env, a))
            case s.Inr(a):
                return VInr(self.evaluate(env, a))
            case s.SumCase(motive, on_left, on_right, scrut, hints):
                frame = FSumCase(Closure(env, motive), Closure(env, on_left), Closure(env, on_right), hints)
                return self.sum_case(frame, self.evaluate(env, scrut))
            case s.UnitT():
                return UNIT
            case s.Star():
                return STAR
            case s.EmptyT():
                return EMPTY
            case s.Absurd(motive, scrut, hint):
                return self.eliminate(self.evaluate(env, scrut), FAbsurd(Closure(env, motive), hint))
            case s.NatT():
                return NAT
            case s.Zero():
                return ZERO
            case s.Suc(n):
                return VSuc(self.evaluate(env, n))
            case s.NatRec(motive, zero_case, suc_case, scrut, hints):
                frame = FNatRec(Closure(env, motive), self.evaluate(env, zero_case), Closure(env, suc_case), hints)
                return self.nat_rec(frame, self.evaluate(env, scrut))
            case s.IdT(ty, lhs, rhs):
                return VId(self.evaluate(env, ty), self.evaluate(env, lhs), self.evaluate(env, rhs))
            case s.Refl(a):
                return VRefl(self.evaluate(env, a))
            case s.J(motive, base, path, hints):
                return self.j(FJ(Closure(env, motive), Closure(env, base), hints), self.evaluate(env, path))
            case s.TruncT(ty):
                return VTrunc(self.evaluate(env, ty))
            case s.TrIntro(a):
                return VTrIntro(self.evaluate(env, a))
            case s.TrRec(motive_type, prop_proof, fn, scrut):
                frame = FTrRec(
                    self.evaluate(env, motive_type),
                    self.evaluate(env, prop_proof),
                    self.evaluate(env, fn),
                    self._carrier(env, t),
                )
                return self.trunc_elim(frame, self.evaluate(env, scrut))
            case s.TrInd(motive, prop_proof, fn, scrut, hint):
                frame = FTrInd(
                    Closure(env, motive), self.evaluate(env, prop_proof), self.evaluate(env, fn), hint, self._carrier(env, t)
                )
                return self.trunc_elim(frame, self.evaluate(env, scrut))
            case s.TruncEq(lhs, rhs):
                return VNeutral(HTruncEq(self._carrier(env, t), self.evaluate(env, lhs), self.evaluate(env, rhs)))
            case s.Ann(a, _):
                return self.evaluate(env, a)
        raise EvalError(f"cannot evaluate {t!r}")

    def _carrier(self, env: Env, t) -> Optional[Value]:
        return None if t.carrier is None else self.evaluate(env, t.carrier)

    def global_value(self, name: str) -> Value:
        entry = self.globals.get(name)
        if entry is None:
            raise EvalError(f"unknown global {name}")
        if entry.kind != "def":
            return VNeutral(HPostulate(name, entry.type))
        return VGlobal(name, (), entry.type, lambda: self.unfold(entry))

    def unfold(self, entry: GlobalEntry) -> Value:
        if entry._value is None:
            entry._value = self.evaluate((), entry.body)
        return entry._value

    def apply_closure(self, cl: Closure, *args: Value) -> Value:
        if isinstance(cl, _MetaClosure):
            return cl.fn(*args)
        return self.evaluate(cl.env + args, cl.body)

    def apply(self, fn: Value, arg: Value) -> Value:
        if isinstance(fn, VLam):
            return self.evaluate(fn.body.env + (arg,), fn.body.body)
        if isinstance(fn, VGlobal):
            return VGlobal(fn.name, fn.args + (arg,), fn.type, lambda: self.apply(fn.force(), arg))
        if isinstance(fn, VNeutral):
            return VNeutral(fn.head, fn.spine + (FApp(arg),))
        raise EvalError(f"applying a non-function {type(fn).__name__}")

    def eliminate(self, v: Value, frame) -> Value:
        """Push ``frame`` onto a stuck value."""
        if isinstance(v, VNeutral):
            return VNeutral(v.head, v.spine + (frame,))
        raise EvalError(f"eliminator {type(frame).__name__} stuck on {type(v).__name__}")

    def fst(self, v: Value) -> Value:
        v = force(v)
        if isinstance(v, VPair):
            return v.fst
        return self.eliminate(v, FFst())

    def snd(self, v: Value) -> Value:
        v = force(v)
        if isinstance(v, VPair):
            return v.snd
        return self.eliminate(v, FSnd())

    def sum_case(self, frame: FSumCase, v: Value) -> Value:
        v = force(v)
        if isinstance(v, VInl):
            return self.apply_closure(frame.on_left, v.v)
        if isinstance(v, VInr):
            return self.apply_closure(frame.on_right, v.v)
        return self.eliminate(v, frame)

    def nat_rec(self, frame: FNatRec, v: Value) -> Value:
        v = force(v)
        # Peel successors iteratively, then rebuild bottom-up.
        preds = []
        while isinstance(v, VSuc):
            preds.append(v.v)
            v = force(v.v)
        if isinstance(v, VZero):
            acc = frame.zero_case
        else:
            acc = self.eliminate(v, frame)
        for pred in reversed(preds):
            acc = self.apply_closure(frame.suc_case, pred, acc)
        return acc

    def j(self, frame: FJ, v: Value) -> Value:
        v = force(v)
        if isinstance(v, VRefl):
            return self.apply_closure(frame.base, v.v)
        return self.eliminate(v, frame)

    def trunc_elim(self, frame, v: Value) -> Value:
        v = force(v)
        if isinstance(v, VTrIntro):
            if self.mode.trunc_beta:
                return self.apply(frame.fn, v.v)
            return VNeutral(HBlockedTr(v.v, frame.carrier), (frame,))
        return self.eliminate(v, frame)

    def elim_frame(self, v: Value, frame) -> Value:
        """Re-apply a spine frame to a value (used to rebuild prefixes)."""
        if isinstance(frame, FApp):
            return self.apply(v, frame.arg)
        if isinstance(frame, FFst):
            return self.fst(v)
        if isinstance(frame, FSnd):
            return self.snd(v)
        if isinstance(frame, FSumCase):
            return self.sum_case(frame, v)
        if isinstance(frame, FNatRec):
            return self.nat_rec(frame, v)
        if isinstance(frame, FJ):
            return self.j(frame, v)
        if isinstance(frame, (FTrRec, FTrInd)):
            return self.trunc_elim(frame, v)
        return self.eliminate(force(v), frame)

    # ------------------------------------------------------------------
    # spine typing shared by readback and conversion

    def head_type(self, head) -> Optional[Value]:
        if isinstance(head, (HVar, HPostulate)):
            return head.type
        if isinstance(head, HTruncEq):
            return VId(None if head.ty is None else VTrunc(head.ty), head.lhs, head.rhs)
        if isinstance(head, HBlockedTr) and head.ty is not None:
            return VTrunc(head.ty)
        return None

    def frame_parts(self, frame, ty: Optional[Value], prefix: Value):
        """Describe the components of ``frame`` eliminating ``prefix : ty``.

        Returns ``(parts, result_type)``; each part is ``(field, binders,
        expected)`` where ``binders`` is a sequence of ``(hint, type_fn)``
        building the types of the bound variables from the previously bound
        ones, and ``expected(vars)`` gives the component's type, ``"type"``
        for a type position, or ``None`` when unknown.
        """
        ty = force(ty) if ty is not None else None
        ap = self.apply_closure
        if isinstance(frame, FApp):
            if isinstance(ty, VPi):
                return [("arg", (), lambda vs: ty.dom)], ap(ty.cod, frame.arg)
            return [("arg", (), lambda vs: None)], None
        if isinstance(frame, FFst):
            return [], ty.dom if isinstance(ty, VSigma) else None
        if isinstance(frame, FSnd):
            if isinstance(ty, VSigma):
                return [], ap(ty.cod, self.fst(prefix))
            return [], None
        if isinstance(frame, FSumCase):
            m = frame.motive
            h = frame.hints
            left = ty.left if isinstance(ty, VSum) else None
            right = ty.right if isinstance(ty, VSum) else None
            parts = [
                ("motive", ((h[0], lambda vs: ty),), "type"),
                ("on_left", ((h[1], lambda vs: left),), lambda vs: ap(m, VInl(vs[0]))),
                ("on_right", ((h[2], lambda vs: right),), lambda vs: ap(m, VInr(vs[0]))),
            ]
            return parts, ap(m, prefix)
        if isinstance(frame, FAbsurd):
            return [("motive", ((frame.hint, lambda vs: EMPTY),), "type")], ap(frame.motive, prefix)
        if isinstance(frame, FNatRec):
            m = frame.motive
            h = frame.hints
            parts = [
                ("motive", ((h[0], lambda vs: NAT),), "type"),
                ("zero_case", (), lambda vs: ap(m, ZERO)),
                ("suc_case", ((h[1], lambda vs: NAT), (h[2], lambda vs: ap(m, vs[0]))), lambda vs: ap(m, VSuc(vs[0]))),
            ]
            return parts, ap(m, prefix)
        if isinstance(frame, FJ):
            m = frame.motive
            h = frame.hints
            a = ty.ty if isinstance(ty, VId) else None
            idty = (lambda vs: VId(a, vs[0], vs[1])) if a is not None else (lambda vs: None)
            parts = [
                ("motive", ((h[0], lambda vs: a), (h[1], lambda vs: a), (h[2], idty)), "type"),
                ("base", ((h[3], lambda vs: a),), lambda vs: ap(m, vs[0], vs[0], VRefl(vs[0]))),
            ]
            if isinstance(ty, VId):
                return parts, ap(m, ty.lhs, ty.rhs, prefix)
            return parts, None
        if isinstance(frame, (FTrRec, FTrInd)) and ty is None and frame.carrier is not None:
            ty = VTrunc(frame.carrier)
        if isinstance(frame, FTrRec):
            p = frame.motive_type
            a = ty.ty if isinstance(ty, VTrunc) else None
            parts = [
                ("motive_type", (), "type"),
                ("prop_proof", (), lambda vs: is_prop(p)),
                ("fn", (), lambda vs: arrow(a, p) if a is not None else None),
            ]
            return parts, p
        if isinstance(frame, FTrInd):
            m = frame.motive
            a = ty.ty if isinstance(ty, VTrunc) else None
            parts = [
                ("motive", ((frame.hint, lambda vs: ty),), "type"),
                ("prop_proof", (), lambda vs: self._ind_prop_type(ty, m) if ty is not None else None),
                ("fn", (), lambda vs: self._ind_fn_type(a, m) if a is not None else None),
            ]
            return parts, ap(m, prefix)
        raise EvalError(f"unknown frame {frame!r}")

    def _ind_prop_type(self, trunc_ty: Value, motive: Closure) -> Value:
        # (z : Trunc A) -> isProp (P z)
        return VPi("z", trunc_ty, _MetaClosure(lambda z: is_prop(self.apply_closure(motive, z))))

    def _ind_fn_type(self, a: Value, motive: Closure) -> Value:
        # (x : A) -> P (tr x)
        return VPi("x", a, _MetaClosure(lambda x: self.apply_closure(motive, VTrIntro(x))))

    def bind_vars(self, depth: int, binders) -> Tuple[Value, ...]:
        vs: Tuple[Value, ...] = ()
        for i, (hint, type_fn) in enumerate(binders):
            vs = vs + (fresh_var(depth + i, type_fn(vs), hint),)
        return vs

    def component(self, frame, name: str, vs: Tuple[Value, ...]) -> Value:
        comp = getattr(frame, name)
        if isinstance(comp, Closure):
            return self.apply_closure(comp, *vs)
        return comp

    # ------------------------------------------------------------------
    # readback

    def readback(self, depth: int, v: Value, ty: Optional[Value], unfold: bool = True) -> Term:
        if not unfold and isinstance(v, VGlobal):
            return self._readback_glued(depth, v)
        if ty is not None:
            ty = force(ty)
            if isinstance(ty, VPi):
                hint = v.hint if isinstance(v, VLam) else ty.hint
                x = fresh_var(depth, ty.dom, hint)
                body = self.readback(depth + 1, self.apply(v, x), self.apply_closure(ty.cod, x), unfold)
                return s.Lam(hint, body)
            if isinstance(ty, VSigma):
                a = self.fst(v)
                return s.Pair(
                    self.readback(depth, a, ty.dom, unfold),
                    self.readback(depth, self.snd(v), self.apply_closure(ty.cod, a), unfold),
                )
            if isinstance(ty, VUnit):
                return s.Star()
            if isinstance(ty, VUniv):
                return self.readback_type(depth, v, unfold)
        v = force(v)
        match v:
            case VZero() | VSuc():
                n = 0
                while isinstance(v, VSuc):
                    n += 1
                    v = force(v.v)
                t = s.Zero() if isinstance(v, VZero) else self.readback(depth, v, NAT, unfold)
                for _ in range(n):
                    t = s.Suc(t)
                return t
            case VInl(a):
                return s.Inl(self.readback(depth, a, ty.left if isinstance(ty, VSum) else None, unfold))
            case VInr(a):
                return s.Inr(self.readback(depth, a, ty.right if isinstance(ty, VSum) else None, unfold))
            case VRefl(a):
                return s.Refl(self.readback(depth, a, ty.ty if isinstance(ty, VId) else None, unfold))
            case VTrIntro(a):
                return s.TrIntro(self.readback(depth, a, ty.ty if isinstance(ty, VTrunc) else None, unfold))
            case VStar():
                return s.Star()
            case VLam(hint, _):
                x = fresh_var(depth, None, hint)
                return s.Lam(hint, self.readback(depth + 1, self.apply(v, x), None, unfold))
            case VPair(a, b):
                return s.Pair(self.readback(depth, a, None, unfold), self.readback(depth, b, None, unfold))
            case VNeutral():
                return self.readback_neutral(depth, v, unfold)[0]
        return self.readback_type(depth, v, unfold)

    def readback_type(self, depth: int, v: Value, unfold: bool = True) -> Term:
        if not unfold and isinstance(v, VGlobal):
            return self._readback_glued(depth, v)
        v = force(v)
        match v:
            case VUniv(level):
                return s.Univ(level)
            case VPi(hint, dom, cod) | VSigma(hint, dom, cod):
                x = fresh_var(depth, dom, hint)
                former = s.Pi if isinstance(v, VPi) else s.Sigma
                return former(
                    hint,
                    self.readback_type(depth, dom, unfold),
                    self.readback_type(depth + 1, self.apply_closure(cod, x), unfold),
                )
            case VSum(left, right):
                return s.Sum(self.readback_type(depth, left, unfold), self.readback_type(depth, right, unfold))
            case VUnit():
                return s.UnitT()
            case VEmpty():
                return s.EmptyT()
            case VNat():
                return s.NatT()
            case VId(ty, lhs, rhs):
                return s.IdT(
                    self.readback_type(depth, ty, unfold),
                    self.readback(depth, lhs, ty, unfold),
                    self.readback(depth, rhs, ty, unfold),
                )
            case VTrunc(ty):
                return s.TruncT(self.readback_type(depth, ty, unfold))
            case VNeutral():
                return self.readback_neutral(depth, v, unfold)[0]
        # Only reachable for ill-typed input; read back structurally.
        return self.readback(depth, v, None, unfold)

    def _readback_glued(self, depth: int, v: VGlobal) -> Term:
        t: Term = s.Global(v.name)
        ty = v.type
        for arg in v.args:
            ty = force(ty)
            if isinstance(ty, VPi):
                t = s.App(t, self.readback(depth, arg, ty.dom, unfold=False))
                ty = self.apply_closure(ty.cod, arg)
            else:
                t = s.App(t, self.readback(depth, arg, None, unfold=False))
                ty = None
        return t

    def _readback_carrier(self, depth: int, a: Optional[Value], unfold: bool) -> Optional[Term]:
        return None if a is None else self.readback_type(depth, a, unfold)

    def readback_head(self, depth: int, head, unfold: bool) -> Term:
        if isinstance(head, HVar):
            return s.Var(depth - 1 - head.level)
        if isinstance(head, HPostulate):
            return s.Global(head.name)
        if isinstance(head, HTruncEq):
            ty = None if head.ty is None else VTrunc(head.ty)
            return s.TruncEq(
                self.readback(depth, head.lhs, ty, unfold),
                self.readback(depth, head.rhs, ty, unfold),
                carrier=self._readback_carrier(depth, head.ty, unfold),
            )
        if isinstance(head, HBlockedTr):
            return s.TrIntro(self.readback(depth, head.arg, head.ty, unfold))
        raise EvalError(f"unknown head {head!r}")

    def readback_neutral(self, depth: int, n: VNeutral, unfold: bool = True):
        """Read back a neutral; returns ``(term, type)`` with type possibly None."""
        t = self.readback_head(depth, n.head, unfold)
        ty = self.head_type(n.head)
        prefix: Value = VNeutral(n.head, ())
        for frame in n.spine:
            parts, next_ty = self.frame_parts(frame, ty, prefix)
            comps = {}
            for name, binders, expected in parts:
                vs = self.bind_vars(depth, binders)
                val = self.component(frame, name, vs)
                inner = depth + len(vs)
                if expected == "type":
                    comps[name] = self.readback_type(inner, val, unfold)
                else:
                    comps[name] = self.readback(inner, val, expected(vs), unfold)
            t = _rebuild(frame, t, comps)
            if isinstance(frame, (FTrRec, FTrInd)):
                fty = force(ty) if ty is not None else None
                a = fty.ty if isinstance(fty, VTrunc) else frame.carrier
                t = replace(t, carrier=self._readback_carrier(depth, a, unfold))
            prefix = VNeutral(n.head, prefix.spine + (frame,))
            ty = next_ty
        return t, ty

    # ------------------------------------------------------------------
    # conversion

    def convertible(self, depth: int, a: Value, b: Value, ty: Optional[Value]) -> bool:
        if a is b:
            return True
        if isinstance(a, VGlobal) and isinstance(b, VGlobal) and self._glued_equal(depth, a, b):
            return True
        if ty is not None:
            ty = force(ty)
            if isinstance(ty, VPi):
                x = fresh_var(depth, ty.dom, ty.hint)
                return self.convertible(depth + 1, self.apply(a, x), self.apply(b, x), self.apply_closure(ty.cod, x))
            if isinstance(ty, VSigma):
                a1, b1 = self.fst(a), self.fst(b)
                return self.convertible(depth, a1, b1, ty.dom) and self.convertible(
                    depth, self.snd(a), self.snd(b), self.apply_closure(ty.cod, a1)
                )
            if isinstance(ty, VUnit):
                return True
            if isinstance(ty, VUniv):
                return self.convertible_type(depth, a, b)
        a, b = force(a), force(b)
        if a is b:
            return True
        match a, b:
            case VZero(), VZero():
                return True
            case VSuc(), VSuc():
                while isinstance(a, VSuc) and isinstance(b, VSuc):
                    a, b = force(a.v), force(b.v)
                return self.convertible(depth, a, b, NAT)
            case VInl(x), VInl(y):
                return self.convertible(depth, x, y, ty.left if isinstance(ty, VSum) else None)
            case VInr(x), VInr(y):
                return self.convertible(depth, x, y, ty.right if isinstance(ty, VSum) else None)
            case VRefl(x), VRefl(y):
                return self.convertible(depth, x, y, ty.ty if isinstance(ty, VId) else None)
            case VTrIntro(x), VTrIntro(y):
                return self.convertible(depth, x, y, ty.ty if isinstance(ty, VTrunc) else None)
            case VStar(), VStar():
                return True
            case VNeutral(), VNeutral():
                return self.convertible_neutral(depth, a, b)
        if ty is None:
            return self._convertible_untyped(depth, a, b)
        return False

    def _convertible_untyped(self, depth: int, a: Value, b: Value) -> bool:
        if isinstance(a, VLam) or isinstance(b, VLam):
            hint = a.hint if isinstance(a, VLam) else b.hint
            x = fresh_var(depth, None, hint)
            return self.convertible(depth + 1, self.apply(a, x), self.apply(b, x), None)
        if isinstance(a, VPair) or isinstance(b, VPair):
            return self.convertible(depth, self.fst(a), self.fst(b), None) and self.convertible(
                depth, self.snd(a), self.snd(b), None
            )
        if _is_type_value(a) and _is_type_value(b):
            return self.convertible_type(depth, a, b)
        return False

    def convertible_type(self, depth: int, a: Value, b: Value) -> bool:
        if a is b:
            return True
        if isinstance(a, VGlobal) and isinstance(b, VGlobal) and self._glued_equal(depth, a, b):
            return True
        a, b = force(a), force(b)
        match a, b:
            case VUniv(i), VUniv(j):
                return i == j
            case (VPi(), VPi()) | (VSigma(), VSigma()):
                if type(a) is not type(b) or not self.convertible_type(depth, a.dom, b.dom):
                    return False
                x = fresh_var(depth, a.dom, a.hint)
                return self.convertible_type(depth + 1, self.apply_closure(a.cod, x), self.apply_closure(b.cod, x))
            case VSum(l1, r1), VSum(l2, r2):
                return self.convertible_type(depth, l1, l2) and self.convertible_type(depth, r1, r2)
            case (VUnit(), VUnit()) | (VEmpty(), VEmpty()) | (VNat(), VNat()):
                return True
            case VId(t1, x1, y1), VId(t2, x2, y2):
                return (
                    self.convertible_type(depth, t1, t2)
                    and self.convertible(depth, x1, x2, t1)
                    and self.convertible(depth, y1, y2, t1)
                )
            case VTrunc(t1), VTrunc(t2):
                return self.convertible_type(depth, t1, t2)
            case VNeutral(), VNeutral():
                return self.convertible_neutral(depth, a, b)
        return False

    def _glued_equal(self, depth: int, a: VGlobal, b: VGlobal) -> bool:
        if a.name != b.name or len(a.args) != len(b.args):
            return False
        ty: Optional[Value] = a.type
        for x, y in zip(a.args, b.args):
            ty = force(ty) if ty is not None else None
            dom = ty.dom if isinstance(ty, VPi) else None
            if not self.convertible(depth, x, y, dom):
                return False
            ty = self.apply_closure(ty.cod, x) if isinstance(ty, VPi) else None
        return True

    def heads_equal(self, depth: int, h1, h2) -> bool:
        if type(h1) is not type(h2):
            return False
        if isinstance(h1, HVar):
            return h1.level == h2.level
        if isinstance(h1, HPostulate):
            return h1.name == h2.name
        if isinstance(h1, HTruncEq):
            a = h1.ty if h1.ty is not None else h2.ty
            ty = None if a is None else VTrunc(a)
            return self.convertible(depth, h1.lhs, h2.lhs, ty) and self.convertible(depth, h1.rhs, h2.rhs, ty)
        if isinstance(h1, HBlockedTr):
            return self.convertible(depth, h1.arg, h2.arg, h1.ty if h1.ty is not None else h2.ty)
        return False

    def convertible_neutral(self, depth: int, a: VNeutral, b: VNeutral) -> bool:
        if len(a.spine) != len(b.spine) or not self.heads_equal(depth, a.head, b.head):
            return False
        ty = self.head_type(a.head)
        prefix: Value = VNeutral(a.head, ())
        for f1, f2 in zip(a.spine, b.spine):
            if type(f1) is not type(f2):
                return False
            parts, next_ty = self.frame_parts(f1, ty, prefix)
            for name, binders, expected in parts:
                vs = self.bind_vars(depth, binders)
                v1 = self.component(f1, name, vs)
                v2 = self.component(f2, name, vs)
                inner = depth + len(vs)
                if expected == "type":
                    ok = self.convertible_type(inner, v1, v2)
                else:
                    ok = self.convertible(inner, v1, v2, expected(vs))
                if not ok:
                    return False
            prefix = VNeutral(a.head, prefix.spine + (f1,))
            ty = next_ty
        return True

    # ------------------------------------------------------------------

    def normalize(self, env_types: Sequence[Value], t: Term, ty: Value) -> Term:
        """Normal form of ``t : ty`` in a context of the given variable types."""
        env: Env = ()
        for i, vt in enumerate(env_types):
            env = env + (fresh_var(i, vt),)
        return self.readback(len(env), self.evaluate(env, t), ty)


class _MetaClosure(Closure):
    """A closure given by a host function rather than an open term."""

    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn
        self.env = ()
        self.body = None


def _is_type_value(v: Value) -> bool:
    return isinstance(v, (VUniv, VPi, VSigma, VSum, VUnit, VEmpty, VNat, VId, VTrunc))


def _rebuild(frame, t: Term, comps: Dict[str, Term]) -> Term:
    if isinstance(frame, FApp):
        return s.App(t, comps["arg"])
    if isinstance(frame, FFst):
        return s.Fst(t)
    if isinstance(frame, FSnd):
        return s.Snd(t)
    if isinstance(frame, FSumCase):
        return s.SumCase(comps["motive"], comps["on_left"], comps["on_right"], t, frame.hints)
    if isinstance(frame, FAbsurd):
        return s.Absurd(comps["motive"], t, frame.hint)
    if isinstance(frame, FNatRec):
        return s.NatRec(comps["motive"], comps["zero_case"], comps["suc_case"], t, frame.hints)
    if isinstance(frame, FJ):
        return s.J(comps["motive"], comps["base"], t, frame.hints)
    if isinstance(frame, FTrRec):
        return s.TrRec(comps["motive_type"], comps["prop_proof"], comps["fn"], t)
    if isinstance(frame, FTrInd):
        return s.TrInd(comps["motive"], comps["prop_proof"], comps["fn"], t, frame.hint)
    raise EvalError(f"unknown frame {frame!r}")
