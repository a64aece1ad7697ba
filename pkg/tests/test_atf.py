from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from staircase.atf import (
    AREA_POLY,
    QuadInvariantError,
    RayMissesSideError,
    association_base_run,
    association_step_run,
    associate,
    b_size,
    check_invariants,
    embedded_ellipsoid,
    limit_run,
    mutate,
    mutate_step,
    q0,
    v_matrix,
    verify_association_base,
    vmut_table,
    vy_decomposition,
    x_matrix,
    y_matrix,
)
from staircase.classes import volume_at_acc
from staircase.scalars import IMat2, IVec2, LinFormB, QuadExt, to_float
from staircase.triples import base_triple, mutate_x, staircase_limits, triple_at

b = LinFormB.b()


def shoelace(Q, at):
    """Independent area oracle: shoelace on the vertices specialized at ``at``."""
    pts = [Q.vertices()[k] for k in "OXVY"]
    pts = [tuple(c.evaluate(at) if isinstance(c, LinFormB) else c for c in p) for p in pts]
    s = 0
    for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
        s += x1 * y2 - x2 * y1
    return s / 2


def test_q0():
    Q = q0()
    assert Q.lengths() == {"OX": 1, "OY": 1 - b, "XV": 1 - b, "VY": b}
    assert Q.closure() == (0, 0)
    assert Q.area() == AREA_POLY
    check_invariants(Q)
    half = Q.specialize(Fraction(1, 2))
    assert [half.len_OX, half.len_OY, half.len_XV, half.len_VY] == [1] + [Fraction(1, 2)] * 3
    assert embedded_ellipsoid(half)[:2] == (1, Fraction(1, 2))


@pytest.mark.parametrize("at", [Fraction(1, 5), Fraction(1, 2), Fraction(7, 9)])
def test_q0_area_oracle(at):
    assert shoelace(q0(), at) == (1 - at * at) / 2


def test_first_v_mutation():
    Q, M = mutate_step(q0(), "V")
    assert Q.lengths() == {"OX": b, "OY": 1 - b, "XV": 1 - b, "VY": 1}
    assert (Q.ray_V, Q.ray_X, Q.dir_XV) == (IVec2(-2, -1), IVec2(0, 1), IVec2(1, 1))
    assert M.mat == v_matrix(0) == IMat2(1, 0, 1, 1)


def test_v_squared_then_y():
    Q = mutate(mutate(q0().with_range((Fraction(1, 2), Fraction(2, 3))), "V"), "V")
    assert Q == vmut_table(2)
    Q = mutate(Q, "Y")
    assert Q.len_OY == 3 - 2 * b
    assert Q.len_XV == (2 - 3 * b) / 4
    assert Q.len_VY == (2 - b) / 4
    assert Q.dir_VY == IVec2(-1, 5)


def test_ray_misses_side():
    # a steeper ray at Y leaves through OX at x = 1/4 and never reaches XV
    Q = replace(q0().specialize(Fraction(1, 2)), ray_Y=IVec2(1, -2))
    with pytest.raises(RayMissesSideError, match="OX"):
        mutate(Q, "Y")


def test_unknown_vertex():
    with pytest.raises(ValueError):
        mutate(q0(), "O")


def test_associate_base_zero():
    T = base_triple(0)
    Q = associate(T)
    assert Q.len_OX == 2 * b - 1
    assert Q.len_OY == 3 - 2 * b
    assert Q.len_XV == (2 - 3 * b) / 4
    assert Q.len_VY == (2 - b) / 4
    assert Q.ray_Y == IVec2(1, -6)
    assert Q.ray_V == IVec2(-1, 1)
    assert Q.ray_X == IVec2(2, 1)
    assert (Q.dir_XV, Q.dir_VY) == (IVec2(3, 1), IVec2(-1, 5))
    assert b_size(T) == (Fraction(1, 2), Fraction(2, 3))


@pytest.mark.parametrize("n", range(6))
def test_association_base(n):
    assert verify_association_base(n)
    run = association_base_run(n)
    assert all(run.table_ok) and all(run.matrix_ok), run
    assert run.final_ok, run.mismatches
    for Q in run.quads:
        assert Q.area() == AREA_POLY and Q.closure() == (0, 0)


def test_association_step_example():
    run = association_step_run(base_triple(0), "x")
    assert run.ok
    assert run.after.len_OX == (5 * b - 2) / 4
    assert run.after.len_OX == run.before.len_OX + run.before.len_XV
    assert run.after.len_OY == run.before.len_OY


@given(st.integers(0, 2), st.text(alphabet="xy", max_size=5), st.sampled_from("xy"))
@settings(max_examples=40, deadline=None)
def test_association_steps(n, word, letter):
    T = triple_at(n, word)
    run = association_step_run(T, letter)
    assert run.ok, run.after.mismatches(run.expected)
    M = run.matrix.mat
    assert M.det() == 1
    n_ray = run.before.rays()[letter.upper()]
    assert M.apply(n_ray) == n_ray
    if letter == "x":
        assert M == x_matrix(T.right)
        assert run.after.len_OY == run.before.len_OY and run.after.ray_Y == run.before.ray_Y
    else:
        assert M == y_matrix(T.left)
        assert run.after.len_OX == run.before.len_OX and run.after.ray_X == run.before.ray_X


@given(st.integers(0, 2), st.text(alphabet="xy", max_size=5))
@settings(max_examples=30, deadline=None)
def test_associate_structure(n, word):
    T = triple_at(n, word)
    Q = associate(T)
    L, R = T.left, T.right
    # shared numerators: (d_L, m_L) in OY and XV, (d'_R, m'_R) in OX and VY
    assert Q.len_OY * L.q == L.d - L.m * b
    assert Q.len_XV * R.q * T.mid.q == L.m - L.d * b
    assert Q.len_OX * R.q == R.m_prime * b - R.d_prime
    assert Q.len_VY * L.q * T.mid.q == R.m_prime - R.d_prime * b
    lo, hi = Q.b_range
    for at in (lo + (hi - lo) / 3, (lo + hi) / 2):
        assert shoelace(Q, at) == (1 - at * at) / 2


def test_vy_decomposition():
    assert vy_decomposition(base_triple(0)) == (Fraction(11, 3), Fraction(4, 3))
    T = base_triple(1)
    c1, c2 = vy_decomposition(T)
    assert c1 * T.left.t == mutate_x(T).mid.q
    assert c2 * T.left.t == T.mid.q


def test_limit_run_base_zero():
    trace = limit_run(base_triple(0), 10)
    b_E = trace.b
    OX = trace.steps[0].quad.len_OX
    assert OX == 2 * b_E - 1 == 1 / trace.volume
    assert trace.volume == volume_at_acc(b_E, trace.z)
    xv = [s.quad.len_XV for s in trace.steps]
    assert all(a > c for a, c in zip(xv, xv[1:]))
    assert to_float(xv[10]) < 1e-6
    assert [s.slope for s in trace.steps[:4]] == [6, Fraction(29, 4), Fraction(139, 19), Fraction(666, 91)]
    for s in trace.steps:
        assert s.quad.len_OX == OX
        assert s.ox_after_x - OX == s.quad.len_XV
        assert s.quad.area() == (1 - b_E * b_E) / 2
    a, c = trace.steps[0].ellipsoid
    assert (a, c) == (2 * b_E - 1, 3 - 2 * b_E)


def test_limit_slopes_follow_recursion():
    trace = limit_run(base_triple(0), 6)
    t = 5
    ps = [s.quad.ray_Y for s in trace.steps]
    for prev, cur, nxt in zip(ps, ps[1:], ps[2:]):
        assert nxt == IVec2(t * cur.x - prev.x, t * cur.y - prev.y)


def test_limit_run_positivity_guard():
    with pytest.raises(QuadInvariantError):
        limit_run(base_triple(0), 2, Fraction(1, 2))


def test_limit_ox_equals_inverse_volume_other_triples():
    for n, word in ((1, ""), (0, "x"), (0, "y"), (0, "xy")):
        T = triple_at(n, word)
        trace = limit_run(T, 4)
        lim = staircase_limits(T)
        R = T.right
        OX = trace.steps[0].quad.len_OX
        assert OX == (R.m_prime * lim.b_inf - R.d_prime) / R.q
        assert OX * volume_at_acc(lim.b_inf, lim.z_inf) == 1


def test_specialized_quads_stay_in_field():
    trace = limit_run(base_triple(0), 2)
    for s in trace.steps:
        for v in s.quad.lengths().values():
            assert isinstance(v, QuadExt) and v.disc == 21
