"""Bidirectional type checking against the evaluator's definitional equality."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import syntax as s
from .errors import Diagnostic, TypeCheckError
from .evaluator import EvalMode, Evaluator, GlobalEntry, arrow, is_prop
from .printer import Printer
from .syntax import DeclKind, Declaration, Term
from .values import (
    EMPTY,
    NAT,
    STAR,
    UNIT,
    Closure,
    Context,
    Value,
    VEmpty,
    VId,
    VPi,
    VRefl,
    VSigma,
    VSum,
    VInl,
    VInr,
    VSuc,
    VTrIntro,
    VTrunc,
    VUniv,
    ZERO,
    force,
)


@dataclass
class DeclResult:
    """Outcome of checking one declaration or directive."""

    name: str
    kind: DeclKind
    status: str  # ok | error | blocked
    type: Optional[str] = None
    postulates: Tuple[str, ...] = ()
    span: Optional[Tuple[int, int]] = None
    errors: List[Diagnostic] = field(default_factory=list)
    output: Optional[str] = None
    blocked_by: Tuple[str, ...] = ()
    declaration: Optional[Declaration] = None


class Checker:
    def __init__(self, globals: Optional[Dict[str, GlobalEntry]] = None, mode: EvalMode = EvalMode()):
        self.globals: Dict[str, GlobalEntry] = {} if globals is None else globals
        self.mode = mode
        self.ev = Evaluator(self.globals, mode)

    # ------------------------------------------------------------------
    # printing helpers for diagnostics

    def _names(self, ctx: Context) -> List[str]:
        printer = Printer(self.globals.keys())
        names: List[str] = []
        for hint in ctx.names:
            names.append(printer.fresh(hint, names))
        return names

    def show_type(self, ctx: Context, ty: Value) -> str:
        term = self.ev.readback_type(ctx.depth, ty, unfold=False)
        return Printer().show(term, self._names(ctx))

    def show_value(self, ctx: Context, v: Value, ty: Optional[Value]) -> str:
        term = self.ev.readback(ctx.depth, v, ty, unfold=False)
        return Printer().show(term, self._names(ctx))

    def telescope(self, ctx: Context) -> Tuple[str, ...]:
        names = self._names(ctx)
        lines = []
        for i, ty in enumerate(ctx.types):
            term = self.ev.readback_type(i, ty, unfold=False)
            lines.append(f"{names[i]} : {Printer().show(term, names[:i])}")
        return tuple(lines)

    def error(self, kind: str, ctx: Context, t: Term, message: str, **extra) -> TypeCheckError:
        return TypeCheckError(kind, message, t.span, context=self.telescope(ctx), **extra)

    def mismatch(self, ctx: Context, t: Term, expected: Value, actual: Value) -> TypeCheckError:
        exp, act = self.show_type(ctx, expected), self.show_type(ctx, actual)
        e, a = force(expected), force(actual)
        kind = "LevelError" if isinstance(e, VUniv) and isinstance(a, VUniv) else "Mismatch"
        return self.error(kind, ctx, t, f"expected type\n  {exp}\nbut got\n  {act}", expected=exp, actual=act)

    # ------------------------------------------------------------------

    def eval(self, ctx: Context, t: Term) -> Value:
        return self.ev.evaluate(ctx.env, t)

    def conv_type(self, ctx: Context, a: Value, b: Value) -> bool:
        return self.ev.convertible_type(ctx.depth, a, b)

    def check_type(self, ctx: Context, t: Term) -> int:
        """Check that ``t`` is a type; return its universe level."""
        ty = force(self.infer(ctx, t))
        if not isinstance(ty, VUniv):
            raise self.error("NotAUniverse", ctx, t, f"expected a type, but got a term of type {self.show_type(ctx, ty)}")
        return ty.level

    def infer(self, ctx: Context, t: Term) -> Value:
        try:
            return self._infer(ctx, t)
        except TypeCheckError as e:
            if e.diag.span is None:
                e.diag.span = t.span
            raise

    def check(self, ctx: Context, t: Term, ty: Value) -> None:
        try:
            self._check(ctx, t, ty)
        except TypeCheckError as e:
            if e.diag.span is None:
                e.diag.span = t.span
            raise

    def check_motive(self, ctx: Context, t: Term) -> int:
        try:
            return self.check_type(ctx, t)
        except TypeCheckError as e:
            if e.kind == "MotiveIllTyped":
                raise
            raise TypeCheckError(
                "MotiveIllTyped", f"ill-typed motive: {e.diag.message}", e.span or t.span, context=e.diag.context
            ) from e

    def check_prop_proof(self, ctx: Context, t: Term, ty: Value) -> None:
        try:
            self.check(ctx, t, ty)
        except TypeCheckError as e:
            raise TypeCheckError(
                "PropProofIllTyped",
                f"ill-typed propositionality proof: {e.diag.message}",
                e.span or t.span,
                context=e.diag.context,
                expected=e.diag.expected,
                actual=e.diag.actual,
            ) from e

    def _infer(self, ctx: Context, t: Term) -> Value:
        ev = self.ev
        match t:
            case s.Var(ix):
                return ctx.lookup(ix)
            case s.Global(name):
                entry = self.globals.get(name)
                if entry is None:
                    raise self.error("UnboundGlobal", ctx, t, f"unknown global {name}")
                if entry.type is None:
                    raise self.error("Blocked", ctx, t, f"{name} has no valid type")
                return entry.type
            case s.Univ(level):
                return VUniv(level + 1)
            case s.Pi(hint, dom, cod) | s.Sigma(hint, dom, cod):
                l1 = self.check_type(ctx, dom)
                l2 = self.check_type(ctx.bind(hint, self.eval(ctx, dom)), cod)
                return VUniv(max(l1, l2))
            case s.Sum(left, right):
                return VUniv(max(self.check_type(ctx, left), self.check_type(ctx, right)))
            case s.Lam(hint, body, dom) if dom is not None:
                self.check_type(ctx, dom)
                dv = self.eval(ctx, dom)
                inner = ctx.bind(hint, dv)
                bty = self.infer(inner, body)
                cod = ev.readback_type(inner.depth, bty)
                return VPi(hint, dv, Closure(ctx.env, cod))
            case s.App(fn, arg):
                fty = force(self.infer(ctx, fn))
                if not isinstance(fty, VPi):
                    raise self.error("NotAFunction", ctx, fn, f"expected a function, but got type {self.show_type(ctx, fty)}")
                self.check(ctx, arg, fty.dom)
                return ev.apply_closure(fty.cod, self.eval(ctx, arg))
            case s.Fst(p) | s.Snd(p):
                pty = force(self.infer(ctx, p))
                if not isinstance(pty, VSigma):
                    raise self.error("NotASigma", ctx, p, f"expected a pair, but got type {self.show_type(ctx, pty)}")
                if isinstance(t, s.Fst):
                    return pty.dom
                return ev.apply_closure(pty.cod, ev.fst(self.eval(ctx, p)))
            case s.SumCase(motive, on_left, on_right, scrut, hints):
                sty = force(self.infer(ctx, scrut))
                if not isinstance(sty, VSum):
                    raise self.error("NotASum", ctx, scrut, f"expected a sum, but got type {self.show_type(ctx, sty)}")
                self.check_motive(ctx.bind(hints[0], sty), motive)
                m = Closure(ctx.env, motive)
                left = ctx.bind(hints[1], sty.left)
                self.check(left, on_left, ev.apply_closure(m, VInl(left.env[-1])))
                right = ctx.bind(hints[2], sty.right)
                self.check(right, on_right, ev.apply_closure(m, VInr(right.env[-1])))
                return ev.apply_closure(m, self.eval(ctx, scrut))
            case s.UnitT() | s.EmptyT() | s.NatT():
                return VUniv(0)
            case s.Star():
                return UNIT
            case s.Zero():
                return NAT
            case s.Suc(n):
                self.check(ctx, n, NAT)
                return NAT
            case s.Absurd(motive, scrut, hint):
                sty = force(self.infer(ctx, scrut))
                if not isinstance(sty, VEmpty):
                    raise self.error("NotEmpty", ctx, scrut, f"expected a proof of Empty, but got type {self.show_type(ctx, sty)}")
                self.check_motive(ctx.bind(hint, EMPTY), motive)
                return ev.apply_closure(Closure(ctx.env, motive), self.eval(ctx, scrut))
            case s.NatRec(motive, zero_case, suc_case, scrut, hints):
                self.check(ctx, scrut, NAT)
                self.check_motive(ctx.bind(hints[0], NAT), motive)
                m = Closure(ctx.env, motive)
                self.check(ctx, zero_case, ev.apply_closure(m, ZERO))
                inner = ctx.bind(hints[1], NAT)
                n = inner.env[-1]
                inner = inner.bind(hints[2], ev.apply_closure(m, n))
                self.check(inner, suc_case, ev.apply_closure(m, VSuc(n)))
                return ev.apply_closure(m, self.eval(ctx, scrut))
            case s.IdT(ty, lhs, rhs):
                level = self.check_type(ctx, ty)
                tv = self.eval(ctx, ty)
                self.check(ctx, lhs, tv)
                self.check(ctx, rhs, tv)
                return VUniv(level)
            case s.Refl(a):
                aty = self.infer(ctx, a)
                av = self.eval(ctx, a)
                return VId(aty, av, av)
            case s.J(motive, base, path, hints):
                pty = force(self.infer(ctx, path))
                if not isinstance(pty, VId):
                    raise self.error("NotAnIdentity", ctx, path, f"expected a path, but got type {self.show_type(ctx, pty)}")
                a = pty.ty
                mctx = ctx.bind(hints[0], a)
                mctx = mctx.bind(hints[1], a)
                mctx = mctx.bind(hints[2], VId(a, mctx.env[-2], mctx.env[-1]))
                self.check_motive(mctx, motive)
                m = Closure(ctx.env, motive)
                bctx = ctx.bind(hints[3], a)
                x = bctx.env[-1]
                self.check(bctx, base, ev.apply_closure(m, x, x, VRefl(x)))
                return ev.apply_closure(m, pty.lhs, pty.rhs, self.eval(ctx, path))
            case s.TruncT(ty):
                return VUniv(self.check_type(ctx, ty))
            case s.TrIntro(a):
                return VTrunc(self.infer(ctx, a))
            case s.TrRec(motive_type, prop_proof, fn, scrut):
                zty = self._trunc_of(ctx, t, scrut)
                self.check_motive(ctx, motive_type)
                p = self.eval(ctx, motive_type)
                self.check_prop_proof(ctx, prop_proof, is_prop(p))
                self.check(ctx, fn, arrow(zty.ty, p))
                return p
            case s.TrInd(motive, prop_proof, fn, scrut, hint):
                zty = self._trunc_of(ctx, t, scrut)
                self.check_motive(ctx.bind(hint, zty), motive)
                m = Closure(ctx.env, motive)
                self.check_prop_proof(ctx, prop_proof, ev._ind_prop_type(zty, m))
                self.check(ctx, fn, ev._ind_fn_type(zty.ty, m))
                return ev.apply_closure(m, self.eval(ctx, scrut))
            case s.TruncEq(lhs, rhs):
                ty = self._trunc_of(ctx, t, lhs)
                self.check(ctx, rhs, ty)
                return VId(ty, self.eval(ctx, lhs), self.eval(ctx, rhs))
            case s.Ann(a, ty):
                self.check_type(ctx, ty)
                tv = self.eval(ctx, ty)
                self.check(ctx, a, tv)
                return tv
            case s.Lam() | s.Pair() | s.Inl() | s.Inr():
                raise self.error("CannotInfer", ctx, t, "cannot infer the type of this term; add an ascription (t : T)")
        raise self.error("CannotInfer", ctx, t, f"cannot infer the type of {type(t).__name__}")

    def _trunc_of(self, ctx: Context, node: Term, t: Term) -> VTrunc:
        """Type of ``t``, the truncated subterm of ``node``; records the carrier on ``node``."""
        if node.carrier is not None:
            self.check_type(ctx, node.carrier)
            ty = VTrunc(self.eval(ctx, node.carrier))
            self.check(ctx, t, ty)
            return ty
        ty = self._infer_trunc(ctx, t)
        self._record_carrier(ctx, node, ty.ty)
        return ty

    def _record_carrier(self, ctx: Context, node: Term, a: Value) -> None:
        if node.carrier is None:
            object.__setattr__(node, "carrier", self.ev.readback_type(ctx.depth, a, unfold=False))

    def _infer_trunc(self, ctx: Context, t: Term) -> VTrunc:
        ty = force(self.infer(ctx, t))
        if not isinstance(ty, VTrunc):
            raise self.error("NotATruncation", ctx, t, f"expected a truncation, but got type {self.show_type(ctx, ty)}")
        return ty

    def _check(self, ctx: Context, t: Term, ty: Value) -> None:
        ev = self.ev
        fty = force(ty)
        match t:
            case s.Lam(hint, body, dom):
                if not isinstance(fty, VPi):
                    raise self.error("NotAFunction", ctx, t, f"a lambda cannot have type {self.show_type(ctx, ty)}")
                if dom is not None:
                    self.check_type(ctx, dom)
                    dv = self.eval(ctx, dom)
                    if not self.conv_type(ctx, dv, fty.dom):
                        raise self.mismatch(ctx, dom, fty.dom, dv)
                inner = ctx.bind(hint, fty.dom)
                self.check(inner, body, ev.apply_closure(fty.cod, inner.env[-1]))
                return
            case s.Pair(a, b):
                if not isinstance(fty, VSigma):
                    raise self.error("NotASigma", ctx, t, f"a pair cannot have type {self.show_type(ctx, ty)}")
                self.check(ctx, a, fty.dom)
                self.check(ctx, b, ev.apply_closure(fty.cod, self.eval(ctx, a)))
                return
            case s.Inl(a) | s.Inr(a):
                if not isinstance(fty, VSum):
                    raise self.error("NotASum", ctx, t, f"an injection cannot have type {self.show_type(ctx, ty)}")
                self.check(ctx, a, fty.left if isinstance(t, s.Inl) else fty.right)
                return
            case s.Refl(a) if isinstance(fty, VId):
                self.check(ctx, a, fty.ty)
                av = self.eval(ctx, a)
                if not (
                    ev.convertible(ctx.depth, av, fty.lhs, fty.ty) and ev.convertible(ctx.depth, av, fty.rhs, fty.ty)
                ):
                    raise self.mismatch(ctx, t, ty, VId(fty.ty, av, av))
                return
            case s.TrIntro(a) if isinstance(fty, VTrunc):
                self.check(ctx, a, fty.ty)
                return
            case s.TruncEq(lhs, rhs) if isinstance(fty, VId) and isinstance(force(fty.ty), VTrunc):
                # endpoints need only be checkable, as in normal forms
                self._record_carrier(ctx, t, force(fty.ty).ty)
                self.check(ctx, lhs, fty.ty)
                self.check(ctx, rhs, fty.ty)
                lv, rv = self.eval(ctx, lhs), self.eval(ctx, rhs)
                if not (
                    ev.convertible(ctx.depth, lv, fty.lhs, fty.ty) and ev.convertible(ctx.depth, rv, fty.rhs, fty.ty)
                ):
                    raise self.mismatch(ctx, t, ty, VId(fty.ty, lv, rv))
                return
        actual = self.infer(ctx, t)
        if not self.conv_type(ctx, actual, ty):
            raise self.mismatch(ctx, t, ty, actual)

    # ------------------------------------------------------------------
    # declarations

    def dependencies(self, d: Declaration) -> Tuple[frozenset, frozenset]:
        """Transitive postulates and failed definitions a declaration relies on."""
        refs = set()
        for t in (d.type, d.body):
            if t is not None:
                s.free_globals(t, refs)
        posts, blocked = set(), set()
        for name in refs:
            entry = self.globals.get(name)
            if entry is None:
                continue
            posts |= entry.postulates
            blocked |= entry.blocked_by
            if entry.kind in ("opaque", "broken"):
                blocked.add(name)
        if d.kind is DeclKind.POSTULATE:
            posts.add(d.name)
        return frozenset(posts), frozenset(blocked)

    def check_declaration(self, d: Declaration) -> DeclResult:
        posts, blocked = self.dependencies(d)
        result = DeclResult(d.name, d.kind, "ok", postulates=tuple(sorted(posts)), span=d.span)
        result.blocked_by = tuple(sorted(blocked))
        result.declaration = Declaration(d.kind, d.name, d.type, d.body, d.span, posts)
        ctx = Context()
        if d.kind in (DeclKind.DEF, DeclKind.POSTULATE):
            tv: Optional[Value] = None
            try:
                self.check_type(ctx, d.type)
                tv = self.eval(ctx, d.type)
                result.type = self.show_type(ctx, tv)
                if d.kind is DeclKind.DEF:
                    self.check(ctx, d.body, tv)
            except TypeCheckError as e:
                result.status = "error"
                result.errors.append(self._diag(e, d))
            if result.status == "ok":
                kind = "def" if d.kind is DeclKind.DEF else "postulate"
            else:
                kind = "opaque" if tv is not None else "broken"
            self.globals[d.name] = GlobalEntry(d.name, kind, tv, d.body, d.type, posts, blocked)
        elif d.kind in (DeclKind.CHECK, DeclKind.EVAL):
            try:
                ty = self.infer(ctx, d.body)
                result.type = self.show_type(ctx, ty)
                if d.kind is DeclKind.CHECK:
                    result.output = result.type
                else:
                    nf = self.ev.readback(0, self.eval(ctx, d.body), ty)
                    result.output = Printer(self.globals.keys()).show(nf, [])
            except TypeCheckError as e:
                result.status = "error"
                result.errors.append(self._diag(e, d))
        if result.status == "ok" and blocked:
            result.status = "blocked"
        return result

    def _diag(self, e: TypeCheckError, d: Declaration) -> Diagnostic:
        diag = e.diag
        if diag.span is None:
            diag.span = d.span
        diag.decl = d.name
        return diag
