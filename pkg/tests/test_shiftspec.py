import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from denjoykit.exceptions import PreconditionError
from denjoykit.shiftspec import (
    INCONCLUSIVE,
    NOT_SIMPLE,
    JointPoint,
    b_gamma_matrix,
    joint_spectrum_grid,
    joint_spectrum_test,
    nonsimplicity_scan,
    periodic_spectrum,
    polar_identity_check,
    rotation_weight_check,
    shift,
    unimodular_witness,
    weighted_shift,
)
from denjoykit.symdyn import BiSequence, two_sided_fibonacci


def test_weighted_shift_structure():
    t = shift(3)
    assert np.array_equal(weighted_shift(BiSequence.constant(1, 3)).entries, t.entries)
    x = two_sided_fibonacci(2)
    tx = weighted_shift(x)
    assert tx[1, 0] == int(x[0]) and tx[0, 1] == 0
    nz = tx.entries[np.nonzero(tx.entries)]
    assert set(nz.real.astype(int)) <= {1, 2}
    gram = (tx.H @ tx).entries
    inner = gram[:-1, :-1]
    assert np.allclose(inner, np.diag([int(c) ** 2 for c in x.symbols[:-1]]))


def test_polar_identity():
    assert polar_identity_check(BiSequence.constant(1, 10))["max_residual"] == 0
    res = polar_identity_check(two_sided_fibonacci(3))
    assert res["radius"] == 44 and res["max_residual"] <= 1e-12 and res["pass"]
    with pytest.raises(PreconditionError):
        polar_identity_check(np.array([1.0, 0.0, 2.0]))


def test_joint_examples():
    x = two_sided_fibonacci(3)
    assert joint_spectrum_test(x, JointPoint((0,), (2,)))["score"] == 0
    assert joint_spectrum_test(x, JointPoint((0,), (1.5,)))["score"] == Fraction(1, 4)
    res = joint_spectrum_test(x, JointPoint((0, 1), (2, 2)), tol=0.1)
    assert res["score"] > 0 and res["member"] is False
    assert joint_spectrum_test(x, JointPoint((0, 1), (1, 2)), tol=0)["member"] is True


@given(st.lists(st.tuples(st.integers(-2, 3), st.floats(0, 3), st.floats(-1, 1)),
                min_size=1, max_size=3, unique_by=lambda t: t[0]))
def test_score_is_half_bottom_of_b_gamma(spec):
    x = two_sided_fibonacci(2)
    pt = JointPoint(tuple(i for i, _, _ in spec), tuple(complex(r, im) for _, r, im in spec))
    score = float(joint_spectrum_test(x, pt)["score"])
    bottom = np.linalg.eigvalsh(b_gamma_matrix(x, pt))[0]
    assert bottom / 2 == pytest.approx(score, abs=1e-9)


def test_joint_grid_shape():
    x = two_sided_fibonacci(2)
    axis = [Fraction(1), Fraction(3, 2), Fraction(2)]
    rows = joint_spectrum_grid(x, [0, 1], [axis, axis])
    assert len(rows) == 9 and all(len(r) == 3 for r in rows)


def test_unimodular_examples():
    res = unimodular_witness(np.ones(50), 1, 49)
    assert res["residual"] == pytest.approx(0.2, abs=1e-12)
    rng = np.random.default_rng(7)
    w = np.exp(2j * np.pi * rng.random(200))
    res = unimodular_witness(w, np.exp(0.3j), 199)
    assert res["residual"] <= 0.1 + 1e-9
    with pytest.raises(PreconditionError):
        unimodular_witness(w, 1.5, 10)
    with pytest.raises(PreconditionError):
        unimodular_witness(2 * w, 1, 10)


def test_witness_matches_dense_operator():
    rng = np.random.default_rng(2)
    n = 12
    w = np.exp(2j * np.pi * rng.random(n + 1))
    lam = np.exp(1.1j)
    alpha = [1]
    for j in range(n):
        alpha.append(alpha[-1] * w[j] / lam)
    chi = np.zeros(2 * (n + 2) + 1, dtype=complex)  # window -(n+2)..(n+2)
    r = n + 2
    chi[r: r + n + 1] = np.array(alpha) / np.linalg.norm(alpha)
    full = np.ones(2 * r + 1, dtype=complex)
    full[r: r + n + 1] = w
    tx = weighted_shift(full).entries
    dense = np.linalg.norm(tx @ chi - lam * chi)
    assert dense == pytest.approx(unimodular_witness(w, lam, n)["residual"], abs=1e-12)


def test_periodic_examples():
    one = periodic_spectrum([1], 1, 6)
    assert one["radius"] == 1 and np.allclose(np.abs(one["eigenvalues"]), 1)
    assert np.allclose(np.sort_complex(one["eigenvalues"] ** 6), np.ones(6))
    a = periodic_spectrum([1, 2], 2, 8)
    assert a["radius"] == pytest.approx(math.sqrt(2)) and len(a["eigenvalues"]) == 16 and a["max_deviation"] <= 1e-9
    b = periodic_spectrum([1, 1, 2], 3, 8)
    assert b["radius"] == pytest.approx(2 ** (1 / 3)) and b["max_deviation"] <= 1e-9
    mods = np.abs(b["eigenvalues"])
    assert mods.max() / mods.min() - 1 <= 1e-9
    assert periodic_spectrum(BiSequence.periodic("12", 9), 2, 4)["radius"] == pytest.approx(math.sqrt(2))
    with pytest.raises(PreconditionError):
        periodic_spectrum(two_sided_fibonacci(2), 2, 4)


def test_rotation_identities():
    res = rotation_weight_check((math.sqrt(5) - 1) / 2, 128)
    assert res["x0"] == 5.0
    assert res["max_residual"] <= 1e-12
    assert res["commutation_residual"] <= 1e-12
    with pytest.raises(PreconditionError):
        rotation_weight_check(1.5, 10)


def test_nonsimplicity():
    # every {1,2}-word of length 1, 2, 3, ... in turn: runs keep growing with the window
    text = "".join("".join(w) for n in range(1, 10) for w in itertools.product("12", repeat=n))
    r = 1500
    x = BiSequence(text[: 2 * r + 1], r)
    assert nonsimplicity_scan(x)["verdict"] == NOT_SIMPLE
    fib = nonsimplicity_scan(two_sided_fibonacci(4))
    assert fib["verdict"] == INCONCLUSIVE and all(row["run2"] <= 1 and row["run1"] <= 2 for row in fib["rows"])
    assert nonsimplicity_scan(BiSequence.constant(1, 30))["not_simple"]
