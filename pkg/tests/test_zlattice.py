import random

import pytest
from hypothesis import given, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from denjoykit.zlattice import (
    AbGroupInvariants,
    AbGroupPresentation,
    IntMatrix,
    RowLattice,
    cokernel_invariants,
    hermite_normal_form,
    image_invariants,
    kernel_basis,
    rank,
    smith_normal_form,
    subgroup_membership,
)


def matrices(max_rows=5, max_cols=5, lo=-6, hi=6):
    return st.integers(0, max_rows).flatmap(
        lambda r: st.integers(0, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c),
                               min_size=r, max_size=r).map(lambda rows: IntMatrix.from_rows(rows, cols=c))))


def sympy_factors(m: IntMatrix) -> list[int]:
    if m.rows == 0 or m.cols == 0:
        return []
    return [abs(int(d)) for d in invariant_factors(Matrix(m.tolist()), domain=ZZ) if d != 0]


def is_unimodular(m: IntMatrix) -> bool:
    return abs(m.determinant()) == 1


def test_snf_small_examples():
    r = smith_normal_form(IntMatrix.from_rows([[2]]))
    assert r.S.tolist() == [[2]] and r.invariant_factors == (2,)
    r = smith_normal_form(IntMatrix.from_rows([[1, 0], [0, 0]]))
    assert r.invariant_factors == (1,) and r.rank == 1
    m = IntMatrix.from_rows([[0, 0, -1, -1], [0, 0, -1, -1], [-1, -1, 0, 0], [-1, -1, 0, 0]])
    r = smith_normal_form(m)
    assert r.invariant_factors == (1, 1) and r.rank == 2
    assert r.U @ m @ r.V == r.S


@given(matrices())
def test_snf_certificate_and_sympy_oracle(m):
    r = smith_normal_form(m)
    assert r.U @ m @ r.V == r.S
    assert is_unimodular(r.U) and is_unimodular(r.V)
    diag = [r.S[i, i] for i in range(min(m.rows, m.cols))]
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert all(r.S[i, j] == 0 for i in range(m.rows) for j in range(m.cols) if i != j)
    assert list(r.invariant_factors) == sympy_factors(m)


@given(matrices(4, 4), st.randoms(use_true_random=False))
def test_invariant_factors_survive_shuffles(m, rnd):
    rows = m.tolist()
    rnd.shuffle(rows)
    perm = list(range(m.cols))
    rnd.shuffle(perm)
    shuffled = IntMatrix.from_rows([[r[j] for j in perm] for r in rows], cols=m.cols)
    assert smith_normal_form(shuffled).invariant_factors == smith_normal_form(m).invariant_factors


def test_big_entries_stay_exact():
    m = IntMatrix.from_rows([[10**30 + 1, 10**30], [10**30, 10**30 - 1]])
    r = smith_normal_form(m)
    assert r.U @ m @ r.V == r.S
    assert r.invariant_factors == (1, 1)


def test_cokernel_examples():
    p = AbGroupPresentation.from_relations(4, [[0, 1, -2, 1]])
    assert cokernel_invariants(p) == AbGroupInvariants(3)
    assert cokernel_invariants(AbGroupPresentation.from_relations(2, [])) == AbGroupInvariants(2)
    z2 = cokernel_invariants(AbGroupPresentation.from_relations(1, [[2]]))
    assert z2 == AbGroupInvariants(0, (2,)) and str(z2) == "Z/2"


def test_invariants_validate_chain():
    with pytest.raises(ValueError):
        AbGroupInvariants(0, (2, 3))
    assert AbGroupInvariants(1, (2, 4)).to_dict() == {"free_rank": 1, "torsion": [2, 4]}


@given(matrices(5, 4))
def test_cokernel_matches_snf(m):
    inv = cokernel_invariants(AbGroupPresentation(m.cols, m))
    factors = sympy_factors(m)
    assert inv.free_rank == m.cols - len(factors)
    assert list(inv.torsion) == [d for d in factors if d > 1]


@given(matrices(4, 4), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_redundant_relation_does_not_change_cokernel(m, coefs):
    if m.rows == 0 or m.cols == 0:
        return
    extra = [sum(c * m[i, j] for i, c in enumerate(coefs[: m.rows])) for j in range(m.cols)]
    assert subgroup_membership(m, extra)
    before = cokernel_invariants(AbGroupPresentation(m.cols, m))
    after = cokernel_invariants(AbGroupPresentation(m.cols, m.append_rows([extra])))
    assert before == after


def test_kernel_examples():
    assert kernel_basis(IntMatrix.from_rows([[1, 1]])) in ([(1, -1)], [(-1, 1)])
    assert kernel_basis(IntMatrix.identity(3)) == []
    k = kernel_basis(IntMatrix.from_rows([[1, -1, 0], [0, 1, -1]]))
    assert k in ([(1, 1, 1)], [(-1, -1, -1)])


@given(matrices(4, 5))
def test_kernel_is_primitive_and_complete(m):
    basis = kernel_basis(m)
    assert len(basis) == m.cols - rank(m)
    for v in basis:
        assert not any(m.apply(v))
    if basis:
        # primitive lattice: the basis extends to a unimodular matrix, i.e. its SNF factors are all 1
        assert set(smith_normal_form(IntMatrix.from_rows(basis, cols=m.cols)).invariant_factors) == {1}


def test_membership_examples():
    assert subgroup_membership(IntMatrix.from_rows([[2, 0]]), (4, 0))
    assert not subgroup_membership(IntMatrix.from_rows([[2, 0]]), (1, 0))
    assert subgroup_membership(IntMatrix.from_rows([[1, 1], [0, 2]]), (1, -1))
    with pytest.raises(ValueError):
        subgroup_membership(IntMatrix.from_rows([[1, 1]]), (1, 1, 1))


@given(matrices(4, 4))
def test_hnf_certificate(m):
    h, u = hermite_normal_form(m)
    assert u @ m == h
    assert is_unimodular(u) or m.rows == 0
    lat = RowLattice(m)
    for i in range(m.rows):
        assert m.tolist()[i] in lat


def test_empty_matrices():
    assert cokernel_invariants(AbGroupPresentation(3, IntMatrix.zeros(0, 3))) == AbGroupInvariants(3)
    assert smith_normal_form(IntMatrix.zeros(2, 0)).invariant_factors == ()


def _brute_image(p, vectors):
    # oracle: relations among the images are the kernel of [S; R]^T restricted to the S-coordinates
    k = len(vectors)
    stacked = IntMatrix.from_rows(list(vectors) + list(p.relations.tolist()), cols=p.num_generators)
    rels = [v[:k] for v in kernel_basis(stacked.T)]
    return cokernel_invariants(AbGroupPresentation.from_relations(k, rels))


@given(matrices(4, 4), st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=3))
def test_image_invariants_against_kernel_oracle(m, vecs):
    if m.cols != 4:
        return
    p = AbGroupPresentation(4, m)
    assert image_invariants(p, vecs) == _brute_image(p, vecs)


def test_image_of_everything_is_the_cokernel():
    rnd = random.Random(3)
    rows = [[rnd.randint(-2, 2) for _ in range(5)] for _ in range(3)]
    p = AbGroupPresentation.from_relations(5, rows)
    eye = [[int(i == j) for j in range(5)] for i in range(5)]
    assert image_invariants(p, eye) == cokernel_invariants(p)
