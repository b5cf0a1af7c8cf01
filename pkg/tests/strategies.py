"""Hypothesis generators for terms and simple types."""
from functools import lru_cache

from hypothesis import strategies as st

from mltt import syntax as s

NAMES = ["x", "y", "z", "f", "p"]


@lru_cache(maxsize=None)
def _leaf(depth: int):
    options = [st.just(s.Zero()), st.just(s.Star()), st.just(s.NatT()), st.just(s.UnitT()), st.builds(s.Univ, st.integers(0, 2))]
    if depth:
        options.append(st.builds(s.Var, st.integers(0, depth - 1)))
    return st.one_of(options)


@lru_cache(maxsize=None)
def terms(depth: int = 0, size: int = 3):
    """Well-scoped (not necessarily well-typed) terms over ``depth`` free variables."""
    if size == 0:
        return _leaf(depth)
    sub = lambda d=0: terms(depth + d, size - 1)
    hint = st.sampled_from(NAMES)
    return st.one_of(
        _leaf(depth),
        st.builds(s.App, sub(), sub()),
        st.builds(lambda h, b: s.Lam(h, b), hint, sub(1)),
        st.builds(lambda h, a, b: s.Pi(h, a, b), hint, sub(), sub(1)),
        st.builds(lambda h, a, b: s.Sigma(h, a, b), hint, sub(), sub(1)),
        st.builds(s.Pair, sub(), sub()),
        st.builds(s.Fst, sub()),
        st.builds(s.Snd, sub()),
        st.builds(s.Sum, sub(), sub()),
        st.builds(s.Inl, sub()),
        st.builds(s.Suc, sub()),
        st.builds(s.IdT, sub(), sub(), sub()),
        st.builds(s.Refl, sub()),
        st.builds(s.TruncT, sub()),
        st.builds(s.TrIntro, sub()),
        st.builds(lambda m, z, c, n: s.NatRec(m, z, c, n, ("n", "m", "ih")), sub(1), sub(), sub(2), sub()),
        st.builds(lambda m, d, p: s.J(m, d, p, ("x", "y", "p", "x")), sub(3), sub(1), sub()),
    )


# Simple closed types, as surface text.
BASE_TYPES = ["Nat", "Unit", "Empty", "Bool", "Nat + Unit", "Trunc Nat"]


def simple_types(size: int = 2):
    base = st.sampled_from(BASE_TYPES)
    if size == 0:
        return base
    sub = simple_types(size - 1)
    return st.one_of(
        base,
        st.builds(lambda a, b: f"({a} -> {b})", sub, sub),
        st.builds(lambda a, b: f"({a} * {b})", sub, sub),
    )


def types_rooted_at(former: str):
    """Simple types whose outermost former is ``former`` (pi, sigma or unit)."""
    sub = simple_types(1)
    if former == "pi":
        return st.builds(lambda a, b: f"({a} -> {b})", sub, sub)
    if former == "sigma":
        return st.builds(lambda a, b: f"({a} * {b})", sub, sub)
    return st.just("Unit")


def split_type(ty: str):
    """Split a generated type into (former, left, right) at its top level."""
    if ty == "Unit":
        return "unit", None, None
    if not ty.startswith("("):
        return "base", None, None
    inner = ty[1:-1]
    level = 0
    for i, ch in enumerate(inner):
        if ch == "(":
            level += 1
        elif ch == ")":
            level -= 1
        elif level == 0 and inner.startswith(" -> ", i):
            return "pi", inner[:i], inner[i + 4:]
        elif level == 0 and inner.startswith(" * ", i):
            return "sigma", inner[:i], inner[i + 3:]
    return "base", None, None


def eta_expand(v: str, ty: str, fresh=None) -> str:
    """Full eta expansion of the variable expression ``v`` at simple type ``ty``."""
    fresh = fresh if fresh is not None else iter(range(1000))
    former, a, b = split_type(ty)
    if former == "pi":
        x = f"a{next(fresh)}"
        return f"(\\{x}. {eta_expand(f'({v} {x})', b, fresh)})"
    if former == "sigma":
        return f"({eta_expand(f'(fst {v})', a, fresh)} , {eta_expand(f'(snd {v})', b, fresh)})"
    if former == "unit":
        return "star"
    return v
