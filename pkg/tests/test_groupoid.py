from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from groupoidvn.groupoid import (Edge, OperatorExpression, StabilizerDetected, TooLarge, adjoint,
                                 compose_edges, convolution_matrix, enumerate_orbit_classes,
                                 iter_rooted_classes, orbit_diagram, reduce_word)
from groupoidvn.pontryagin import GroupRingExpr, gz_element, translate
from groupoidvn.space import (Alphabet, Cylinder, LocalAutomorphism, Shift, SpaceDescriptor,
                              SymbolicConfig, measure, parse_cylinder)
from groupoidvn.vndim import gz_class_weight

T_GZ = translate(gz_element())
SP = T_GZ.terms[0][1].domain.space


def test_reduce_word():
    a, b = Shift(0, 1), Shift(0, -1)
    assert reduce_word([a, b]) == ()
    assert reduce_word([a, a]) == (Shift(0, 2),)
    loc = LocalAutomorphism(0, (1, 0))
    assert reduce_word([loc, loc.inverse()]) == ()


def test_edge_inverse_and_compose():
    e = Edge((Shift(0, 1),), parse_cylinder(SP, "tape0[0]=0"))
    inv = e.inverse()
    assert inv.domain == parse_cylinder(SP, "tape0[-1]=0")
    back = compose_edges(e, inv)
    assert back.word == () and back.domain == e.domain
    f = Edge((Shift(0, 1),), parse_cylinder(SP, "tape0[0]=1"))
    assert compose_edges(e, f) is not None
    g = Edge((), parse_cylinder(SP, "tape0[-1]=1"))
    assert compose_edges(e, g) is None  # image has tape0[-1]=0


def test_product_order():
    # (t chi) applies chi first; (chi t^-1) ends in chi evaluated after t^-1
    t = GroupRingExpr.shift(1)
    pr = GroupRingExpr.proj(0)
    tc = translate(t * pr)
    assert [(e.label(), e.domain.text()) for _, e in tc.terms] == [("t0+", "tape0[0]=0")]
    ct = translate(pr * t.star())
    assert [(e.label(), e.domain.text()) for _, e in ct.terms] == [("t0-", "tape0[-1]=0")]


def test_gz_classes_frozen():
    classes, residual = enumerate_orbit_classes(T_GZ.edges(), window=10)
    assert residual == Fraction(11, 1024)
    assert len(classes) == 9
    masses = sorted((len(c.diagram), c.mass) for c in classes)
    assert masses == [(k + 1, gz_class_weight(k)) for k in range(9)]
    assert sum(c.mass for c in classes) + residual == 1


def test_diagram_and_dot():
    seed = parse_cylinder(SP, "tape0[-1]=1; tape0[0]=0; tape0[1]=0; tape0[2]=1")
    d = orbit_diagram(SymbolicConfig(seed), T_GZ.edges())
    assert len(d) == 3
    dot = d.to_dot()
    assert dot.startswith("digraph") and dot.count("->") == 4
    assert d.canonical_form() == min(d.rooted_signature(r) for r in range(3))
    M = convolution_matrix(d, T_GZ)
    assert M.is_symmetric()


def test_cap_and_stabilizer():
    seed = parse_cylinder(SP, "tape0[-1]=1; " + "; ".join(f"tape0[{i}]=0" for i in range(30)))
    with pytest.raises(TooLarge):
        orbit_diagram(SymbolicConfig(seed), T_GZ.edges(), cap=5)
    sp3 = SpaceDescriptor((Alphabet(("a", "b", "c")),))
    fix = Edge((LocalAutomorphism(0, (1, 0, 2)),), Cylinder(sp3, [{0: {2}}]))
    with pytest.raises(StabilizerDetected):
        orbit_diagram(SymbolicConfig(Cylinder(sp3, [{0: {2}}])), [fix])


def test_window_residual_and_floor():
    residual = [Fraction(0)]
    got = list(iter_rooted_classes(T_GZ.edges(), window=6, residual=residual))
    assert sum(rc.mass for rc in got) + residual[0] == 1
    r2 = [Fraction(0)]
    got2 = list(iter_rooted_classes(T_GZ.edges(), window=6, mass_floor=Fraction(1, 64), residual=r2))
    assert sum(rc.mass for rc in got2) + r2[0] == 1
    assert r2[0] >= residual[0]


_CLASSES = [rc.diagram for rc in iter_rooted_classes(T_GZ.edges(), window=6)]

atoms = st.one_of(
    st.tuples(st.just("shift"), st.integers(-2, 2), st.just(0)),
    st.tuples(st.just("proj"), st.integers(-1, 1), st.just(0)),
    st.tuples(st.just("lamp"), st.integers(-1, 1), st.just(1), st.just(0)),
)
small_exprs = st.lists(st.tuples(st.fractions(-2, 2, max_denominator=3), atoms, atoms),
                       min_size=1, max_size=3)


def _build(spec):
    out = None
    for c, a, b in spec:
        term = (GroupRingExpr(a) * GroupRingExpr(b)).scale(c)
        out = term if out is None else out + term
    return translate(out)


@given(small_exprs)
def test_adjoint_is_transpose(spec):
    T = _build(spec)
    Ta = adjoint(T)
    n = 0
    for rc in iter_rooted_classes(T.edges(), window=4, seeds=[SP.whole()],
                                  tags={f"d{i}": [e.domain] for i, (_, e) in enumerate(T.terms)}):
        d = rc.diagram
        assert convolution_matrix(d, Ta) == convolution_matrix(d, T).transpose()
        n += 1
        if n >= 8:
            break


@given(st.sampled_from(range(len(_CLASSES))))
def test_adjoint_is_transpose_gz_powers(k):
    d = _CLASSES[k]
    for T in (T_GZ, T_GZ * T_GZ, T_GZ * T_GZ * T_GZ):
        assert convolution_matrix(d, adjoint(T)) == convolution_matrix(d, T).transpose()
