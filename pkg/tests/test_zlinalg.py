from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from bitrade.zlinalg import (AbelianGroup, IntMatrix, cokernel, group_from_cyclic_orders,
                             groups_isomorphic, smith_diagonal, snf)

from oracles import determinant, snf_diagonal_by_minors


def matrices(max_dim=6, lo=-9, hi=9):
    return st.integers(1, max_dim).flatmap(lambda m: st.integers(1, max_dim).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


def check_snf(rows):
    A = IntMatrix.from_rows(rows)
    res = snf(A)
    assert res.U @ A @ res.V == res.S
    assert abs(res.U.det()) == 1 and abs(res.V.det()) == 1
    assert res.S.is_diagonal()
    d = res.diagonal
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert d[:len(nz)] == nz, "zeros come last"
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    return res


def test_identity():
    res = check_snf([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert res.diagonal == [1, 1, 1]
    assert res.U == IntMatrix.identity(3) and res.V == IntMatrix.identity(3)


def test_composite_base_case():
    m, a1 = 2, 2
    assert check_snf([[m, -m + 1], [-m, m + a1 - 1]]).diagonal == [1, m * a1]


def test_k4_reduced_laplacian():
    assert check_snf([[3, -1, -1], [-1, 3, -1], [-1, -1, 3]]).diagonal == [1, 4, 4]


def test_empty_matrix_rejected():
    with pytest.raises(ValueError):
        snf(IntMatrix.zeros(0, 3))


def test_large_entries_exact():
    big = 10 ** 30
    res = check_snf([[big, 0], [0, big * 6]])
    assert res.diagonal == [big, 6 * big]


def test_cokernel_examples():
    assert cokernel(IntMatrix.zeros(2, 3)) == AbelianGroup(3, ())
    assert cokernel(IntMatrix.from_rows([[3, -1, -1], [-1, 3, -1], [-1, -1, 3]])) == AbelianGroup(0, (4, 4))
    # intercalate presentation: rows r0 r1 c0 c1 s0 s1
    W = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
    rel = [[0] * 6 for _ in W]
    for i, (r, c, s) in enumerate(W):
        rel[i][r] = rel[i][2 + c] = rel[i][4 + s] = 1
    assert snf_diagonal_by_minors(rel) == [1, 1, 1, 2]
    assert cokernel(IntMatrix.from_rows(rel)) == AbelianGroup(2, (2,))


def test_group_from_cyclic_orders():
    assert group_from_cyclic_orders([2, 3]) == AbelianGroup(0, (6,))
    assert group_from_cyclic_orders([1, 1]) == AbelianGroup()
    assert group_from_cyclic_orders([4, 6]) == AbelianGroup(0, (2, 12))
    with pytest.raises(ValueError):
        group_from_cyclic_orders([3, 0])


def test_groups_isomorphic():
    assert groups_isomorphic(AbelianGroup(0, (6,)), group_from_cyclic_orders([2, 3]))
    assert not groups_isomorphic(AbelianGroup(0, (4,)), AbelianGroup(0, (2, 2)))


def test_abelian_group_validation_and_text():
    with pytest.raises(ValueError):
        AbelianGroup(0, (4, 2))
    with pytest.raises(ValueError):
        AbelianGroup(0, (1, 2))
    assert str(AbelianGroup(2, (2,))) == "Z^2 + Z/2"
    assert str(AbelianGroup()) == "0"
    assert AbelianGroup(0, (2, 4)).order == 8
    assert AbelianGroup(1, ()).order is None


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_matches_minor_oracle(rows):
    res = check_snf(rows)
    assert res.diagonal == snf_diagonal_by_minors(rows)
    assert smith_diagonal(IntMatrix.from_rows(rows)) == res.diagonal


@settings(max_examples=80, deadline=None)
@given(matrices(max_dim=5), st.randoms(use_true_random=False))
def test_cokernel_permutation_invariant(rows, rnd):
    A = IntMatrix.from_rows(rows)
    rp = list(range(A.rows))
    cp = list(range(A.cols))
    rnd.shuffle(rp)
    rnd.shuffle(cp)
    assert cokernel(A.permute(rp, cp)) == cokernel(A)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(
    st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_square_cokernel_order_is_abs_det(rows):
    A = IntMatrix.from_rows(rows)
    det = determinant(rows)
    assert A.det() == det
    G = cokernel(A)
    if det == 0:
        assert G.free_rank > 0
    else:
        assert G.order == abs(det)
        assert cokernel(A.transpose()) == G


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 60), max_size=6))
def test_cyclic_orders_permutation_invariant(orders):
    G = group_from_cyclic_orders(orders)
    for p in list(permutations(orders))[:24]:
        assert group_from_cyclic_orders(p) == G
    n = 1
    for x in orders:
        n *= x
    assert G.order == n
    if orders:
        assert cokernel(IntMatrix.diagonal(orders)) == G
