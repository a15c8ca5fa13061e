import numpy as np
import pytest

from pbna import gf
from oracles import egcd_inverse, rank_by_minors


def test_field_new_rejects_composite():
    with pytest.raises(gf.NonPrimeModulus):
        gf.field_new(6)
    with pytest.raises(gf.NonPrimeModulus):
        gf.field_new(1)
    with pytest.raises(gf.NonPrimeModulus):
        gf.field_new(2147483647 * 3)


def test_inverse_small_field():
    fq = gf.field_new(7)
    assert fq.inv(3) == 5
    assert fq.mul(3, 5) == 1


def test_inverse_default_modulus_matches_euclid():
    fq = gf.FieldContext()
    assert fq.inv(2) == 1073741824
    assert fq.inv(2) == egcd_inverse(2, fq.q)
    rng = np.random.default_rng(11)
    for _ in range(50):
        a = int(rng.integers(1, fq.q))
        assert fq.inv(a) == egcd_inverse(a, fq.q)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        gf.FieldContext(7).inv(0)


def test_mul_inv_identity_random():
    for q in (5, 97, gf.DEFAULT_Q):
        fq = gf.FieldContext(q)
        rng = np.random.default_rng(q)
        for _ in range(40):
            a = fq.rand_nonzero(rng)
            assert fq.mul(a, fq.inv(a)) == 1


def test_field_basic_ops():
    fq = gf.FieldContext(11)
    assert fq.add(7, 8) == 4
    assert fq.sub(3, 9) == 5
    assert fq.neg(4) == 7
    assert fq.pow(2, 10) == 1  # Fermat


def test_rank_identity_zero_dependent():
    assert gf.rank(np.eye(3, dtype=np.int64), 7) == 3
    assert gf.rank(np.zeros((2, 5), dtype=np.int64), 7) == 0
    assert gf.rank([[1, 2], [2, 4]], 7) == 1


def test_rank_matches_transpose():
    rng = np.random.default_rng(5)
    for q in (5, 7, gf.DEFAULT_Q):
        for _ in range(20):
            rows = int(rng.integers(1, 9))
            cols = int(rng.integers(1, 9))
            a = rng.integers(0, q, size=(rows, cols))
            assert gf.rank(a, q) == gf.rank(a.T, q)


def test_rank_matches_minor_enumeration():
    rng = np.random.default_rng(17)
    q = 5
    for _ in range(60):
        rows = int(rng.integers(1, 5))
        cols = int(rng.integers(1, 5))
        a = rng.integers(0, q, size=(rows, cols))
        assert gf.rank(a, q) == rank_by_minors(a.tolist(), q)


def test_solve_identity():
    x = gf.solve(np.eye(2, dtype=np.int64), [3, 4], 7)
    assert x.tolist() == [3, 4]


def test_solve_inconsistent_raises():
    with pytest.raises(gf.NoSolution):
        gf.solve([[1], [1]], [2, 3], 5)


def test_solve_scalar():
    assert gf.solve([[2]], [3], 7).tolist() == [5]


def test_solve_rank_deficient_raises():
    with pytest.raises(gf.RankDeficient):
        gf.solve([[1, 2], [2, 4]], [1, 2], 7)


def test_solve_roundtrip_random():
    rng = np.random.default_rng(23)
    for q in (7, gf.DEFAULT_Q):
        for _ in range(25):
            cols = int(rng.integers(1, 5))
            rows = cols + int(rng.integers(0, 3))
            a = rng.integers(0, q, size=(rows, cols))
            if gf.rank(a, q) < cols:
                continue
            x = rng.integers(0, q, size=cols)
            y = gf.mat_vec(a, x, q)
            assert gf.solve(a, y, q).tolist() == (x % q).tolist()


def test_matrix_inverse_roundtrip():
    rng = np.random.default_rng(31)
    q = gf.DEFAULT_Q
    for _ in range(15):
        n = int(rng.integers(1, 6))
        a = rng.integers(0, q, size=(n, n))
        if gf.rank(a, q) < n:
            continue
        inv = gf.inverse(a, q)
        assert gf.mat_mul(a, inv, q).tolist() == np.eye(n, dtype=np.int64).tolist()


def test_matrix_inverse_singular_raises():
    with pytest.raises(gf.RankDeficient):
        gf.inverse([[1, 2], [2, 4]], 7)
