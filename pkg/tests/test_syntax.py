import pytest
from hypothesis import given, settings

from mltt import syntax as s
from strategies import terms


def test_equality_ignores_hints_and_spans():
    a = s.Lam("x", s.Var(0), span=(0, 3))
    b = s.Lam("y", s.Var(0), span=(5, 9))
    assert a == b
    assert s.alpha_equal(a, b)
    assert s.Lam("x", s.Var(0)) != s.Lam("x", s.Zero())


def test_shift_only_touches_free_indices():
    t = s.Lam("x", s.App(s.Var(0), s.Var(1)))
    assert s.shift_term(t, 0, 2) == s.Lam("x", s.App(s.Var(0), s.Var(3)))


def test_shift_underflow_is_an_error():
    with pytest.raises(s.ScopeError):
        s.shift_term(s.Var(0), 0, -1)


def test_free_globals_and_max_free_index():
    t = s.Pi("x", s.Global("A"), s.App(s.Global("B"), s.Var(1)))
    assert s.free_globals(t) == {"A", "B"}
    assert s.max_free_index(t) == 0
    assert s.max_free_index(s.Lam("x", s.Var(0))) == -1


def test_numeral():
    assert s.numeral(0) == s.Zero()
    assert s.numeral(2) == s.Suc(s.Suc(s.Zero()))


def test_children_report_binder_counts():
    j = s.J(s.Zero(), s.Zero(), s.Var(0), ("x", "y", "p", "x"))
    assert {name: bound for name, _, bound in s.children(j)} == {"motive": 3, "base": 1, "path": 0}


def test_declaration_shape_is_validated():
    with pytest.raises(ValueError):
        s.Declaration(s.DeclKind.DEF, "f", type=s.NatT())
    with pytest.raises(ValueError):
        s.Declaration(s.DeclKind.POSTULATE, "p", type=s.NatT(), body=s.Zero())


@settings(max_examples=200, deadline=None)
@given(terms(depth=2))
def test_shift_round_trip(t):
    assert s.shift_term(s.shift_term(t, 0, 3), 0, -3) == t


@settings(max_examples=200, deadline=None)
@given(terms(depth=2))
def test_max_free_index_within_scope(t):
    assert s.max_free_index(t) < 2
    assert s.max_free_index(s.shift_term(t, 0, 1)) < 3
