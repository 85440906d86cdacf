from fractions import Fraction

import pytest

from groupoidvn.exactnum import Interval
from groupoidvn.groupoid import Edge, OperatorExpression, iter_rooted_classes
from groupoidvn.pontryagin import formal_trace, gz_element, lamp_space, translate
from groupoidvn.space import Cylinder, parse_sigma
from groupoidvn.tds import build_system_x, build_system_y, omega_x_exact, system_from_dict
from groupoidvn.vndim import (PreconditionFailed, build_S, counting_formula, gz_class_weight,
                              gz_closed_form, kernel_dim_report, pipeline_gz, s_counting_check,
                              tds_edges, tds_kernel_classes, tds_tags, tds_vn_report, vn_kernel_dim,
                              vn_moment, vn_moments)
from test_tds import tiny

T = translate(gz_element())
SP = lamp_space()


def test_closed_form_and_weights():
    assert gz_closed_form() == Fraction(1, 3)
    assert sum(gz_class_weight(k) for k in range(200)) + Fraction(201 + 1, 2 ** 201) == 1


def test_pipeline_small_window():
    rep = pipeline_gz(window=12)
    assert rep.passed
    assert Fraction(1, 3) in rep.value
    assert rep.value.width == rep.residual_mass == Fraction(13, 2 ** 12)


def test_simple_kernels():
    chi = OperatorExpression([(1, Edge((), Cylinder(SP, [{0: {0}}])))])
    assert vn_kernel_dim(chi, space=SP, window=4) == Interval(Fraction(1, 2), Fraction(1, 2))
    ident = OperatorExpression.identity(SP)
    assert vn_kernel_dim(ident, space=SP, window=4) == Interval(0, 0)
    zero = OperatorExpression()
    assert vn_kernel_dim(zero, space=SP, window=4) == Interval(1, 1)


def test_moments():
    ms = vn_moments(T, 6, window=16)
    g = gz_element()
    for n in range(7):
        assert formal_trace(g ** n) in ms[n]
    assert ms[0] == Interval(1, 1)
    assert ms[4] == vn_moment(T, window=16, n=4)
    with pytest.raises(ValueError):
        vn_moment(T, n=-1)


def test_S_operator_structure():
    for s in (build_system_y(), build_system_x(parse_sigma("evens"))):
        U = build_S(s)
        ident = [(c, e.domain) for c, e in U.terms if not e.word]
        # halting blocks cancel against -chi_A - chi_R; what is left is chi_X - chi_I
        assert sorted(c for c, _ in ident) == [-1, 1]
        assert len(tds_edges(s)) == len(s.blocks) - len(s.blocks_of("A")) - len(s.blocks_of("R"))


def test_counting_formula_x_and_y():
    for s, w in ((build_system_x(parse_sigma("evens")), 12), (build_system_y(), 6)):
        summ = tds_kernel_classes(s, w)
        assert summ.classes > 20
        assert summ.mismatches == []
        assert summ.diagrams_checked <= summ.classes


def test_counting_on_a_diagram():
    s = build_system_x(parse_sigma("list:1"))
    U = build_S(s)
    seeds = s.set_cylinders("A") + s.set_cylinders("R")
    seen = set()
    for rc in iter_rooted_classes(tds_edges(s), 8, 1000, tds_tags(s), seeds, True):
        ok, dk, f = s_counting_check(rc.diagram, U)
        assert ok
        seen.add((len(rc.diagram.tagged("I")), len(rc.diagram.tagged("A")), f))
    # accepting chain: one I and one A vertex; plain rejections: formula 0 or 1
    assert (1, 1, 0) in seen and (1, 0, 1) in seen and (0, 0, 0) in seen


def test_tds_report_small():
    s = build_system_x(parse_sigma("list:1,2"))
    rep = tds_vn_report(s, depth=12, window=10)
    assert rep.passed
    target = Fraction(1, 64) - omega_x_exact([1, 2])
    assert target in rep.extra["interval_a"] and target in rep.extra["interval_b"]
    assert rep.extra["omega1"].lo == omega_x_exact([1, 2])
    assert rep.extra["accepted_chains"] == 2


def test_precondition():
    with pytest.raises(PreconditionFailed):
        tds_vn_report(system_from_dict(tiny(True)), 5, 5)
