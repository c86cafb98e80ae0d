"""Exact linear algebra: hand values, oracle agreement, and random sweeps."""

import numpy as np
import pytest

from pgph import linalg
from oracles import det_exact, kernel_vectors_mod_p, mat_mul_int, rank_mod_p


def test_rank_hand_values():
    assert linalg.rank(np.eye(4, dtype=int), 2) == 4
    assert linalg.rank(np.zeros((3, 5), dtype=int), 3) == 0
    assert linalg.rank([[1, 1], [1, 1]], 2) == 1
    assert linalg.rank([[1, 2], [2, 4]], 5) == 1
    assert linalg.rank([[1, 2], [2, 1]], 3) == 1  # second row = 2 * first mod 3


def test_rank_empty_shapes():
    assert linalg.rank(np.zeros((0, 4), dtype=int), 2) == 0
    assert linalg.rank(np.zeros((4, 0), dtype=int), 2) == 0


def test_kernel_hand_values():
    k = linalg.kernel_basis([[1, 1], [1, 1]], 2)
    assert k.tolist() == [[1, 1]]
    k = linalg.kernel_basis(np.eye(3, dtype=int), 3)
    assert k.shape == (0, 3)
    k = linalg.kernel_basis(np.zeros((2, 3), dtype=int), 2)
    assert k.tolist() == [[1, 0], [0, 1]]


def test_kernel_rows_annihilate():
    rng = np.random.RandomState(7)
    for p in (2, 3, 5):
        for _ in range(20):
            a = rng.randint(0, p, size=(rng.randint(1, 12), rng.randint(1, 12)))
            k = linalg.kernel_basis(a, p)
            assert len(k) + linalg.rank(a, p) == a.shape[0]
            if len(k):
                assert not np.any((k @ a) % p)


def test_rank_against_enumeration_oracle():
    rng = np.random.RandomState(11)
    for p in (2, 3):
        for _ in range(15):
            a = rng.randint(0, p, size=(rng.randint(1, 7), rng.randint(1, 5)))
            assert linalg.rank(a, p) == rank_mod_p(a.tolist(), p)


def test_kernel_against_enumeration_oracle():
    rng = np.random.RandomState(13)
    for p in (2, 3):
        for _ in range(10):
            a = rng.randint(0, p, size=(rng.randint(1, 6), rng.randint(1, 5)))
            expected = set(kernel_vectors_mod_p(a.tolist(), p))
            k = linalg.kernel_basis(a, p)
            for row in k:
                assert tuple(int(x) for x in row) in expected
            assert p ** len(k) == len(expected)


def test_solve_round_trip():
    rng = np.random.RandomState(17)
    for p in (2, 3, 5):
        for _ in range(20):
            a = rng.randint(0, p, size=(rng.randint(1, 10), rng.randint(1, 10)))
            x = rng.randint(0, p, size=(3, a.shape[0]))
            b = (x @ a) % p
            got = linalg.solve(a, b, p)
            assert np.array_equal((got @ a) % p, b)


def test_solve_single_row_and_inconsistent():
    a = [[1, 0], [0, 0]]
    x = linalg.solve(a, [1, 0], 2)
    assert ((x @ np.array(a)) % 2).tolist() == [1, 0]
    with pytest.raises(ValueError):
        linalg.solve(a, [0, 1], 2)


def test_packed_gf2_path_matches_dense(monkeypatch):
    rng = np.random.RandomState(23)
    cases = [rng.randint(0, 2, size=(rng.randint(1, 20), rng.randint(1, 90))) for _ in range(12)]
    dense = [(linalg.rank(a, 2), linalg.kernel_basis(a, 2)) for a in cases]
    monkeypatch.setattr(linalg, "_PACK_MIN_ENTRIES", 1)
    packed = [(linalg.rank(a, 2), linalg.kernel_basis(a, 2)) for a in cases]
    for (r1, k1), (r2, k2) in zip(dense, packed):
        assert r1 == r2
        assert np.array_equal(k1, k2)


def test_packed_solve_matches_dense(monkeypatch):
    rng = np.random.RandomState(29)
    a = rng.randint(0, 2, size=(40, 70))
    x = rng.randint(0, 2, size=(5, 40))
    b = (x @ a) % 2
    want = linalg.solve(a, b, 2)
    monkeypatch.setattr(linalg, "_PACK_MIN_ENTRIES", 1)
    got = linalg.solve(a, b, 2)
    assert np.array_equal(want, got)
    assert np.array_equal((got @ a) % 2, b)


def test_matmul_mod_p():
    a = [[1, 2], [3, 4]]
    b = [[0, 1], [1, 1]]
    assert linalg.fp_matmul(a, b, 5).tolist() == [[2, 3], [4, 2]]
    with pytest.raises(ValueError):
        linalg.fp_matmul(a, [[1, 2]], 5)


# ---------------------------------------------------------------------------
# Integer lattice routines


def test_smith_normal_form_hand_value():
    # 2x2 with determinant -8 and content 2: diagonal (2, 4) by hand reduction
    diag, U, V = linalg.smith_normal_form([[2, 4], [6, 8]])
    assert diag == [2, 4]
    assert abs(det_exact(U)) == 1
    assert abs(det_exact(V)) == 1
    product = mat_mul_int(mat_mul_int(U, [[2, 4], [6, 8]]), V)
    assert product == [[2, 0], [0, 4]]


def test_smith_normal_form_random_certified():
    rng = np.random.RandomState(31)
    for _ in range(25):
        m, n = rng.randint(1, 9), rng.randint(1, 9)
        a = rng.randint(-5, 6, size=(m, n)).tolist()
        diag, U, V = linalg.smith_normal_form(a)
        assert abs(det_exact(U)) == 1
        assert abs(det_exact(V)) == 1
        product = mat_mul_int(mat_mul_int(U, a), V)
        for i in range(m):
            for j in range(n):
                want = diag[i] if (i == j and i < len(diag)) else 0
                assert product[i][j] == want
        for i in range(len(diag) - 1):
            if diag[i + 1]:
                assert diag[i + 1] % diag[i] == 0
        assert all(d >= 0 for d in diag)


def test_snf_diagonal_matches_full_form():
    rng = np.random.RandomState(37)
    for _ in range(30):
        m, n = rng.randint(1, 12), rng.randint(1, 12)
        a = rng.randint(-5, 6, size=(m, n))
        fast = linalg.snf_diagonal(a)
        slow, _, _ = linalg.smith_normal_form(a.tolist())
        assert fast == slow


def test_snf_diagonal_hand_values():
    assert linalg.snf_diagonal([[2, 4], [6, 8]]) == [2, 4]
    assert linalg.snf_diagonal([[2]]) == [2]
    assert linalg.snf_diagonal(np.zeros((3, 2), dtype=int)) == [0, 0]
    assert linalg.snf_diagonal(np.zeros((0, 5), dtype=int)) == []
    assert linalg.snf_diagonal([[6, 0], [0, 10]]) == [2, 30]


def test_int_kernel_basis_annihilates_and_saturates():
    rng = np.random.RandomState(41)
    for _ in range(20):
        m, n = rng.randint(1, 8), rng.randint(1, 8)
        a = rng.randint(-4, 5, size=(m, n))
        k = linalg.int_kernel_basis(a)
        assert len(k) + linalg.int_rank(a) == m
        if len(k):
            assert not np.any(np.asarray(k) @ a)
            # saturated lattice: elementary divisors of the basis are all 1
            assert linalg.snf_diagonal(k) == [1] * len(k)


def test_int_kernel_hand_value():
    k = linalg.int_kernel_basis([[2], [4]])
    assert len(k) == 1
    x, y = k[0]
    assert 2 * x + 4 * y == 0
    assert abs(x) == 2 and abs(y) == 1


def test_cokernel_invariants():
    coker = linalg.abelian_invariants_of_cokernel
    assert coker(np.array([[2, 0], [0, 3]]), 2) == [6]
    assert coker(np.zeros((0, 2), dtype=int), 2) == [0, 0]
    assert coker(np.array([[2, 0]]), 2) == [2, 0]
    assert coker(np.array([[1, 0], [0, 1]]), 2) == []
    assert coker(np.array([[4, 0], [0, 4], [2, 2]]), 2) == [2, 4]


def test_large_entry_fallback_exact():
    # force the Python-int core: entries beyond the int64 comfort zone
    big = 1 << 45
    diag = linalg.snf_diagonal([[big, 0], [0, 2]])
    assert diag == [2, big]
    diag, U, V = linalg.smith_normal_form([[big, 1], [0, big]])
    product = mat_mul_int(mat_mul_int(U, [[big, 1], [0, big]]), V)
    assert product[0][0] == diag[0] and product[1][1] == diag[1]
    assert diag[0] == 1 and diag[1] == big * big
