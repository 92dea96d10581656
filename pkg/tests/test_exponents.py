from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from usol.exponents import (FAILS, RESTRICTED_WEAK, STRONG, ExponentPair, classify,
                            dual, predicted_slopes, sobolev_admissible, vertex,
                            vertex_table)

F = Fraction


def test_vertex_values():
    assert vertex(3, "B") == ExponentPair(F(3, 4), F(1, 12))
    assert vertex(3, "F") == ExponentPair(F(5, 6), F(1, 6))
    assert vertex(4, "C") == ExponentPair(F(5, 8), F(9, 40))
    with pytest.raises(ValueError):
        vertex(3, "Z")


def test_dual_examples():
    assert dual(ExponentPair(F(3, 4), F(1, 12))) == vertex(3, "B'")
    f = vertex(3, "F")
    assert dual(f) == f  # self-dual: ip + iq = 1


rationals = st.fractions(min_value=0, max_value=1, max_denominator=60)


@given(rationals, rationals)
@settings(max_examples=60, deadline=None)
def test_dual_involution(ip, iq):
    p = ExponentPair(ip, iq)
    assert dual(dual(p)) == p


@given(st.integers(min_value=3, max_value=8), rationals, rationals)
@settings(max_examples=80, deadline=None)
def test_classify_self_dual(d, ip, iq):
    p = ExponentPair(ip, iq)
    assert classify(d, p).status == classify(d, dual(p)).status


def test_classify_examples():
    assert classify(3, ExponentPair(F(5, 6), F(1, 6))).status == STRONG
    assert classify(3, ExponentPair(F(3, 4), F(1, 12))).status == RESTRICTED_WEAK
    v = classify(3, ExponentPair(F(1, 2), F(1, 2)))
    assert v.status == FAILS
    assert "scaling-gap" in v.violated_conditions


def test_classify_edges_closed_vertices_excluded():
    d = 3
    B, Bp = vertex(d, "B"), vertex(d, "B'")
    mid = ExponentPair((B.ip + Bp.ip) / 2, (B.iq + Bp.iq) / 2)
    assert classify(d, mid).status == STRONG  # open edge interior included
    for name in ("B", "B'", "C", "C'"):
        assert classify(d, vertex(d, name)).status == RESTRICTED_WEAK


def test_sobolev_admissible_examples():
    assert sobolev_admissible(3, ExponentPair(F(5, 6), F(1, 6))).status == STRONG
    assert sobolev_admissible(3, ExponentPair(F(3, 4), F(1, 12))).status == RESTRICTED_WEAK
    assert sobolev_admissible(3, ExponentPair(F(11, 12), F(1, 4))).status == RESTRICTED_WEAK
    assert sobolev_admissible(3, ExponentPair(F(2, 3), F(1, 6))).status == FAILS


def test_admissible_segment_inside_region():
    for d in (3, 4, 5, 7):
        B, Bp = vertex(d, "B"), dual(vertex(d, "B"))
        for t_num in range(1, 8):
            t = F(t_num, 8)
            p = ExponentPair(B.ip + t * (Bp.ip - B.ip), B.iq + t * (Bp.iq - B.iq))
            assert sobolev_admissible(d, p).status == STRONG
            assert classify(d, p).status == STRONG


def test_predicted_slopes_examples():
    s = predicted_slopes(3, ExponentPair(F(5, 6), F(1, 6)))
    assert s.glambda_slope == 0
    assert s.knapp_slope == F(2, 3)
    assert s.stationary_decay == 1
    assert s.cone_decay == F(1, 2)
    assert predicted_slopes(3, ExponentPair(F(1, 2), F(1, 2))).knapp_slope == -2
    assert predicted_slopes(3, ExponentPair(1, F(1, 4))).glambda_slope == -F(1, 4)


def test_slopes_nonnegative_on_admissible_segment():
    for d in (3, 4, 6):
        B, Bp = vertex(d, "B"), dual(vertex(d, "B"))
        for t_num in range(1, 4):
            t = F(t_num, 4)
            p = ExponentPair(B.ip + t * (Bp.ip - B.ip), B.iq + t * (Bp.iq - B.iq))
            if sobolev_admissible(d, p).status != STRONG:
                continue
            s = predicted_slopes(d, p)
            assert s.glambda_slope >= 0
            assert s.knapp_slope >= 0


def test_vertex_line_membership_exact():
    for d in (3, 4, 5, 9):
        for name, gap in (("B", F(2, d)), ("B'", F(2, d)),
                          ("C", F(2, d + 1)), ("C'", F(2, d + 1))):
            pt = vertex(d, name)
            assert pt.ip - pt.iq == gap


def test_vertex_table_has_twelve_rows():
    table = vertex_table(3)
    assert len(table) == 12
    names = [n for n, _ in table]
    assert names.count("B'") == 1 and names.count("A'") == 1
