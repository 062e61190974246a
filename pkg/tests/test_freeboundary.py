import random

import pytest
from hypothesis import given, strategies as st

from denjoykit import freeboundary as fb
from denjoykit.freeboundary import BoundaryVector, act_generator, refine

letters = st.sampled_from(list(fb.LETTERS))
raw_words = st.lists(letters, max_size=12).map("".join)
reduced_words = raw_words.map(fb.reduce)


def nonempty_reduced(max_len=6):
    return st.lists(letters, min_size=1, max_size=max_len).map(fb.reduce).filter(bool)


def vectors(level):
    n = fb.num_cylinders(level)
    return st.lists(st.integers(-4, 4), min_size=n, max_size=n).map(lambda c: BoundaryVector(level, tuple(c)))


def test_reduce_examples():
    assert fb.reduce(["a", "a^-1", "b"]) == "b"
    assert fb.reduce("abBa") == "aa"
    assert fb.reduce("") == ""
    with pytest.raises(ValueError):
        fb.reduce("abc")


@given(raw_words, raw_words, raw_words)
def test_reduce_is_associative(u, v, w):
    assert fb.reduce(fb.reduce(u + v) + w) == fb.reduce(u + fb.reduce(v + w))
    assert fb.is_reduced(fb.reduce(u))
    assert fb.reduce(u + fb.inverse(u)) == ""


@pytest.mark.parametrize("level", [1, 2, 3, 4, 5])
def test_cylinder_count(level):
    words = fb.cylinders(level)
    assert len(words) == 4 * 3 ** (level - 1) == fb.num_cylinders(level)
    assert all(fb.is_reduced(w) and len(w) == level for w in words)
    assert list(words) == sorted(words, key=lambda w: [fb.LETTERS.index(x) for x in w])


def test_refine_examples():
    assert refine(BoundaryVector.cylinder("a")).to_dict()["coeffs"] == {"aa": 1, "ab": 1, "aB": 1}
    assert refine(BoundaryVector.zero(1)) == BoundaryVector.zero(2)
    v = refine(BoundaryVector.cylinder("b") - BoundaryVector.cylinder("B"))
    assert sorted(v.to_dict()["coeffs"].values()) == [-1, -1, -1, 1, 1, 1]


def test_action_examples():
    left = act_generator("A", BoundaryVector.cylinder("a"))
    right = (BoundaryVector.cylinder("a") + BoundaryVector.cylinder("b") + BoundaryVector.cylinder("B")).refine_to(2)
    assert left == right
    assert act_generator("a", BoundaryVector.cylinder("b")) == BoundaryVector.cylinder("ab", 2)
    twice = act_generator("a", act_generator("A", BoundaryVector.cylinder("b")))
    assert twice == BoundaryVector.cylinder("b").refine_to(3)


@given(st.integers(1, 3).flatmap(vectors), letters)
def test_inverse_action_is_double_refinement(v, g):
    assert act_generator(fb.INVERSE[g], act_generator(g, v)) == refine(refine(v))


@given(st.integers(1, 3).flatmap(vectors), st.lists(letters, min_size=6, max_size=6))
def test_refine_preserves_values(v, tail):
    for w in fb.cylinders(v.level):
        p = w
        for x in tail:
            p += x if x != fb.INVERSE[p[-1]] else p[-1]
        assert refine(v).evaluate(p) == v.evaluate(p)


@given(st.integers(1, 3), letters)
def test_action_preserves_total_mass(level, g):
    total = BoundaryVector.zero(level + 1)
    for w in fb.cylinders(level):
        total = total + act_generator(g, BoundaryVector.cylinder(w))
    assert total == BoundaryVector.ones(level + 1)


@given(st.integers(1, 3).flatmap(vectors), st.integers(1, 3).flatmap(vectors), letters)
def test_action_is_additive(u, v, g):
    lhs = act_generator(g, u + v)
    rhs = act_generator(g, u.refine_to(max(u.level, v.level))) + act_generator(g, v.refine_to(max(u.level, v.level)))
    assert lhs == rhs


def test_pointwise_action_agrees_with_translation():
    # (d_g f)(xi) = f(g^-1 xi): test on long sample points
    rnd = random.Random(1)
    for _ in range(200):
        w = rnd.choice(fb.cylinders(2))
        g = rnd.choice(fb.LETTERS)
        image = act_generator(g, BoundaryVector.cylinder(w))
        xi = rnd.choice(fb.LETTERS)
        while len(xi) < 8:
            xi += rnd.choice([x for x in fb.LETTERS if x != fb.INVERSE[xi[-1]]])
        moved = fb.reduce(fb.INVERSE[g] + xi)
        assert image.evaluate(xi) == int(moved.startswith(w))


def test_serialisation_round_trip():
    v = BoundaryVector.cylinder("aB", 3) - BoundaryVector.cylinder("b", 3)
    assert BoundaryVector.from_dict(v.to_dict()) == v
    with pytest.raises(ValueError):
        BoundaryVector(2, (0,) * 5)


def test_minimality_examples():
    assert fb.minimality_witness("ba", "a", 3) == "baabaaaba"
    assert fb.minimality_witness("", "b", 1) == "ababa"
    with pytest.raises(ValueError):
        fb.minimality_witness("a", "a", 0)


@given(reduced_words, letters, st.integers(-5, 5).filter(bool))
def test_minimality_output(prefix, first, n):
    g = fb.minimality_witness(prefix, first, n)
    assert fb.is_reduced(g) and g.startswith(prefix)
    assert fb.is_reduced(g + first)


def test_infiniteness_example():
    g = fb.infiniteness_witness("a", "b", "b")
    assert g == "abbAABBBab"
    assert fb.exponent_sums(g) == (0, 0)
    with pytest.raises(ValueError):
        fb.infiniteness_witness("")


@given(nonempty_reduced())
def test_infiniteness_output(omega):
    g = fb.infiniteness_witness(omega)
    assert fb.is_reduced(g)
    assert fb.exponent_sums(g) == (0, 0)
    assert g.startswith(omega) and len(g) > len(omega)
    # g maps C(omega) into C(g omega), which sits strictly inside C(omega)
    assert fb.is_reduced(g + omega)


def test_infiniteness_widens_sigma1_when_single_letters_degenerate():
    w = "BAAbABa"
    g = fb.infiniteness_witness(w)
    assert g == "BAAbABaaabAbaB"
    assert g.startswith(w) and fb.is_reduced(g + w)
    assert fb.exponent_sums(g) == (0, 0)
