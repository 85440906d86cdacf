from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from groupoidvn.groupoid import OperatorExpression, adjoint
from groupoidvn.pontryagin import (GroupRingExpr, ParseError, UnsupportedAtom, element_inverse,
                                   element_product, formal_trace, gz_element, lamp_space, parse_expr,
                                   to_sexpr, translate)
from groupoidvn.space import measure

P = 2


def op_trace(T: OperatorExpression) -> Fraction:
    """Trace on the lamp space: only identity-word terms have fixed points."""
    return sum((c * measure(e.domain) for c, e in T.terms if not e.word), Fraction(0))


atoms = st.one_of(
    st.tuples(st.just("shift"), st.integers(-2, 2), st.just(0)),
    st.tuples(st.just("lamp"), st.integers(-2, 2), st.integers(0, 1), st.just(0)),
    st.tuples(st.just("proj"), st.integers(-2, 2), st.just(0)),
    st.just(("id",)),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.just("sum"), st.lists(children, min_size=1, max_size=3).map(tuple)),
        st.tuples(st.just("prod"), st.lists(children, min_size=1, max_size=3).map(tuple)),
        st.tuples(st.just("scale"), st.fractions(-2, 2, max_denominator=3).filter(bool), children),
    )


trees = st.recursive(atoms, _extend, max_leaves=6)
exprs = trees.map(lambda t: GroupRingExpr(t, P, 1))

lamp_elems = st.builds(
    lambda lamps, n: ((tuple(sorted({(0, i): 1 for i in lamps}.items()))), (n,)),
    st.sets(st.integers(-3, 3), max_size=3), st.integers(-3, 3))


@given(lamp_elems, lamp_elems, lamp_elems)
def test_group_axioms(a, b, c):
    ab_c = element_product(element_product(a, b, P), c, P)
    a_bc = element_product(a, element_product(b, c, P), P)
    assert ab_c == a_bc
    e = ((), (0,))
    assert element_product(a, element_inverse(a, P), P) == e
    assert element_product(element_inverse(a, P), a, P) == e


def test_conjugation_convention():
    t, ti = GroupRingExpr.shift(1), GroupRingExpr.shift(-1)
    g0, gm1 = GroupRingExpr.lamp(0, 1), GroupRingExpr.lamp(-1, 1)
    assert t * g0 * ti == gm1


def test_gz_traces_frozen():
    g = gz_element()
    got = [formal_trace(g ** n) for n in range(9)]
    assert got == [1, 0, 1, 0, 2, 0, Fraction(19, 4), 0, Fraction(25, 2)]


def test_projection_translates_to_indicator():
    e = GroupRingExpr.identity()
    g = GroupRingExpr.lamp(0, 1)
    T = translate((e + g).scale(Fraction(1, 2)))
    assert len(T.terms) == 1
    c, edge = T.terms[0]
    assert c == 1 and not edge.word and edge.domain.text() == "tape0[0]=0"
    assert T.structurally_equal(translate(GroupRingExpr.proj(0)))


def test_lamp_squares_to_identity():
    g = GroupRingExpr.lamp(2, 1)
    assert translate(g * g).structurally_equal(translate(GroupRingExpr.identity()))


def test_gz_translation():
    T = translate(gz_element())
    labels = sorted((e.label(), e.domain.text()) for _, e in T.terms)
    assert labels == [("t0+", "tape0[0]=0"), ("t0-", "tape0[-1]=0")]


def test_p3_lamp_unsupported_but_projection_fine():
    with pytest.raises(UnsupportedAtom):
        translate(GroupRingExpr.lamp(0, 1, p=3))
    T = translate(GroupRingExpr.proj(0, p=3))
    assert op_trace(T) == Fraction(1, 3) == formal_trace(GroupRingExpr.proj(0, p=3))


@given(exprs)
def test_translation_preserves_trace(e):
    assert op_trace(translate(e)) == formal_trace(e)


@given(exprs, exprs)
def test_translation_is_multiplicative_on_traces(a, b):
    assert op_trace(translate(a) * translate(b)) == formal_trace(a * b)


@given(exprs)
def test_star_matches_adjoint(e):
    assert translate(e.star()).structurally_equal(adjoint(translate(e)))
    assert formal_trace(e.star() * e) >= 0


@given(trees)
def test_sexpr_roundtrip(t):
    e = GroupRingExpr(t, P, 1)
    assert parse_expr(to_sexpr(t), P, 1) == e


def test_parser():
    e = parse_expr("; comment\n(scale 1/2 (sum (shift 1) (shift -1) (prod (shift 1) (lamp 0 1)) (prod (lamp 0 1) (shift -1))))")
    assert e == gz_element()
    assert parse_expr("(sum e (lamp 0 1))") == GroupRingExpr.identity() + GroupRingExpr.lamp(0, 1)
    for bad in ["", "(shift)", "(shift 1", "(sum (shift 1)))", "(scale 0.5 (id))", "x"]:
        with pytest.raises(ParseError):
            parse_expr(bad)
    with pytest.raises(UnsupportedAtom):
        parse_expr("(frob 1)")


def test_two_tapes():
    e = parse_expr("(prod (shift 1 0) (shift 1 1))")
    assert e.n_tapes == 2
    assert lamp_space(2, 2).n_tapes == 2
    assert op_trace(translate(e * e.star())) == 1
