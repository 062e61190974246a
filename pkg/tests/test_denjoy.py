import itertools
import math

import pytest
from hypothesis import given, strategies as st

from denjoykit.denjoy import (
    GOLDEN_ANGLE,
    ClopenVector,
    CutPoint,
    DenjoySystem,
    denjoy_distance,
    disjoint_orbit_neighborhoods,
    evaluation_matrix,
    independence_certificate,
    induced_action,
    measure_functional,
    parse_angle,
    rotation_coding,
)
from denjoykit.exceptions import PreconditionError, WindowError
from denjoykit.symdyn import language, two_sided_fibonacci
from denjoykit.zlattice import rank


def test_system_validation():
    with pytest.raises(PreconditionError):
        DenjoySystem(math.pi / 2)
    with pytest.raises(PreconditionError):
        DenjoySystem(4.0)
    with pytest.raises(PreconditionError):
        DenjoySystem(0.0)
    s = DenjoySystem(1.0, 0.3, 4)
    assert s.orbit_point(1) == pytest.approx(1.3)
    assert s.tail_bound == pytest.approx(2 * 2**-4)


def test_distance_examples():
    s = DenjoySystem(1.0, 0.0, 6)
    d, bound = denjoy_distance(CutPoint.left(0), CutPoint.right(0), s)
    assert d == 1.0 and bound == pytest.approx(2 * 2**-6)
    assert denjoy_distance(CutPoint.right(3), CutPoint.right(3), s)[0] == 0.0
    d, _ = denjoy_distance(CutPoint.right(1), CutPoint.left(2), s)
    inside = [j for j in s.window() if 1.0 < s.orbit_point(j) < 2.0]
    assert d == pytest.approx(1.0 + sum(2.0 ** -abs(j) for j in inside))
    with pytest.raises(WindowError):
        denjoy_distance(CutPoint.left(7), CutPoint.left(0), s)


def _sample_points(s):
    pts = [CutPoint(angle=t) for t in (0.05, 1.7, 3.3, 5.9)]
    for j in (-2, 0, 1, 3):
        pts += [CutPoint.left(j), CutPoint.right(j)]
    return pts


def test_distance_metric_axioms():
    s = DenjoySystem(GOLDEN_ANGLE, 0.2, 8)
    pts = _sample_points(s)
    slack = 2 * s.tail_bound
    for x, y in itertools.product(pts, pts):
        dxy = denjoy_distance(x, y, s)[0]
        assert dxy == pytest.approx(denjoy_distance(y, x, s)[0])
        assert (dxy == 0) == (x == y)
    for x, y, z in itertools.product(pts, repeat=3):
        assert denjoy_distance(x, z, s)[0] <= denjoy_distance(x, y, s)[0] + denjoy_distance(y, z, s)[0] + slack


def test_induced_action_examples():
    assert induced_action(ClopenVector.arc(0, 3), 1) == ClopenVector.arc(1, 3)
    assert induced_action(ClopenVector.unit(3), -5) == ClopenVector.unit(3)
    v = ClopenVector.from_terms(3, arcs={2: 1, -1: 3})
    assert induced_action(v, -1) == ClopenVector.from_terms(3, arcs={1: 1, -2: 3})
    with pytest.raises(WindowError):
        induced_action(ClopenVector.arc(3, 3), 1)


def test_measure_examples():
    s = DenjoySystem(GOLDEN_ANGLE, 0.0, 6)
    assert measure_functional(ClopenVector.unit(6), s) == pytest.approx(2 * math.pi)
    assert measure_functional(ClopenVector.arc(5, 6), s) == pytest.approx(GOLDEN_ANGLE)


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.integers(-5, 5), min_size=2 * n + 2, max_size=2 * n + 2), st.integers(-2, 2))))
def test_measure_is_invariant(args):
    n, coeffs, power = args
    s = DenjoySystem(GOLDEN_ANGLE, 0.0, n)
    v = ClopenVector(n, tuple(coeffs))
    try:
        w = induced_action(v, power)
    except WindowError:
        return
    assert measure_functional(w, s) == pytest.approx(measure_functional(v, s))


@pytest.mark.parametrize("n", [1, 3, 10])
def test_unit_and_arc_sum_are_independent(n):
    # 2 pi mu + (2n+1) lam mu0 = 0 has no nonzero integer solution for irrational lam/pi
    s = DenjoySystem(GOLDEN_ANGLE, 0.0, n)
    total = ClopenVector.from_terms(n, arcs={j: 1 for j in range(-n, n + 1)})
    for mu, mu0 in itertools.product(range(-5, 6), repeat=2):
        if (mu, mu0) != (0, 0):
            assert abs(measure_functional(mu * ClopenVector.unit(n) + mu0 * total, s)) > 1e-9


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_independence_certificate(n):
    mat, r = independence_certificate(DenjoySystem(GOLDEN_ANGLE, 0.4, n))
    assert mat.shape == (2 * n + 2, 2 * n + 2) and r == 2 * n + 2


def test_coding_examples():
    s = DenjoySystem(GOLDEN_ANGLE, 0.0, 4)
    assert rotation_coding(s, 0.3, 0) == ""
    w = rotation_coding(s, 0.3, 12)
    fib = two_sided_fibonacci(3)
    for k in range(1, 6):
        assert {w[i:i + k] for i in range(len(w) - k + 1)} <= language(fib, k)
    q = DenjoySystem(2 * math.pi * (0.25 + 1e-7), 0.0, 2)
    assert rotation_coding(q, 0.01, 8) == "21112111"


def test_coding_perturbs_endpoint_hits():
    s = DenjoySystem(GOLDEN_ANGLE, 0.0, 2)
    w = rotation_coding(s, 0.0, 50)  # starts exactly on the partition endpoint
    assert len(w) == 50 and set(w) <= {"1", "2"}


def test_coding_is_sturmian():
    w = rotation_coding(DenjoySystem(1.0, 0.0, 3), 0.123, 4000)
    for k in range(1, 9):
        assert len({w[i:i + k] for i in range(len(w) - k + 1)}) == k + 1


@pytest.mark.parametrize("lam,m", [(1.0, 1), (1.0, 6), (GOLDEN_ANGLE, 8)])
def test_disjoint_neighborhoods(lam, m):
    s = DenjoySystem(lam, 0.0, max(m, 6))
    arcs = disjoint_orbit_neighborhoods(s, m)
    assert len(arcs) == m + 1
    for i, u in enumerate(arcs):
        assert u.contains(s.orbit_point(i))
        assert (u.p - arcs[0].p, u.q - arcs[0].q) == (i, i)
        assert u.length == pytest.approx(arcs[0].length)
        for v in arcs[i + 1:]:
            assert u.disjoint(v)
    ev = evaluation_matrix(arcs[:m], [s.orbit_point(j) for j in range(m)])
    assert rank(ev) == m
    with pytest.raises(PreconditionError):
        disjoint_orbit_neighborhoods(s, s.depth + 1)


def test_parse_angle():
    assert parse_angle("golden") == GOLDEN_ANGLE
    assert parse_angle("2pi/phi^2") == pytest.approx(GOLDEN_ANGLE)
    assert parse_angle("1.25") == 1.25
    assert parse_angle("pi*sqrt(2)/3") == pytest.approx(math.pi * math.sqrt(2) / 3)
    with pytest.raises(ValueError):
        parse_angle("__import__('os')")
