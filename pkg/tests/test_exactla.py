import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tatecoh.exactla import GF, QQ, Field, FieldMismatchError, Matrix, _integer_rows, _modular_prime, _modular_rref, _reconstruct, kernel_basis, rank, rref, solve

F2, F3, F5 = GF(2), GF(3), GF(5)


def mat(field, rows):
    return Matrix(field, np.array(rows, dtype=object))


# -- examples --------------------------------------------------------------------


def test_rref_identity():
    r, piv = rref(Matrix.identity(F2, 2))
    assert r == Matrix.identity(F2, 2) and piv == [0, 1]


def test_rref_zero():
    r, piv = rref(Matrix.zero(F2, 3, 3))
    assert r == Matrix.zero(F2, 3, 3) and piv == []


def test_rref_hand_reduction():
    r, piv = rref(mat(F2, [[1, 1], [1, 1]]))
    assert r == mat(F2, [[1, 1], [0, 0]]) and piv == [0]


def test_kernel_identity_empty():
    assert kernel_basis(Matrix.identity(F3, 4)).cols == 0


def test_kernel_zero_full():
    k = kernel_basis(Matrix.zero(F5, 3, 3))
    assert k.cols == 3 and rank(k) == 3


def test_kernel_all_ones_by_enumeration():
    m = mat(F2, [[1, 1]])
    k = kernel_basis(m)
    brute = [v for v in itertools.product(range(2), repeat=2) if (v[0] + v[1]) % 2 == 0 and any(v)]
    assert brute == [(1, 1)]
    assert k.cols == 1 and list(k.data[:, 0]) == [1, 1]


def test_solve_identity():
    b = mat(F5, [[1, 4], [3, 2]])
    assert solve(Matrix.identity(F5, 2), b) == b


def test_solve_zero_inconsistent():
    assert solve(Matrix.zero(F3, 2, 2), mat(F3, [[1], [0]])) is None


def test_solve_by_enumeration_f3():
    m = mat(F3, [[1, 1], [0, 1]])
    b = mat(F3, [[1], [2]])
    brute = [v for v in itertools.product(range(3), repeat=2)
             if ((v[0] + v[1]) % 3, v[1] % 3) == (1, 2)]
    assert brute == [(2, 2)]
    assert solve(m, b) == mat(F3, [[2], [2]])


def test_rationals_exact():
    m = mat(QQ, [[Fraction(1, 3), 1], [2, Fraction(1, 2)]])
    x = solve(m, mat(QQ, [[1], [1]]))
    assert x is not None
    assert all(isinstance(v, Fraction) for v in x.data.flat)
    assert np.array_equal(QQ.matmul(m.data, x.data), QQ.array([[1], [1]]))


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        _ = Matrix.identity(F2, 2) @ Matrix.identity(F3, 2)


def test_matrices_immutable():
    m = Matrix.identity(F2, 2)
    with pytest.raises(ValueError):
        m.data[0, 0] = 0


def test_gf2_table_product_matches_plain():
    rng = np.random.default_rng(3)
    for sa, sb in [((130, 70), (70, 90)), ((4, 80, 65), (65, 33)), ((90, 65), (3, 65, 9))]:
        a, b = rng.integers(0, 2, sa), rng.integers(0, 2, sb)
        assert np.array_equal(F2.matmul(a, b), (a @ b) % 2)


def test_rational_integer_fast_path():
    a = QQ.array([[1, 2], [3, 4]])
    b = QQ.array([[Fraction(1, 2), 0], [0, 1]])
    assert QQ.matmul(a, b)[0, 0] == Fraction(1, 2)
    assert QQ.matmul(a, a)[1, 1] == 22


# -- properties -------------------------------------------------------------------

fields = st.sampled_from([F2, F3, F5, QQ])


@st.composite
def matrices(draw, max_dim=6):
    F = draw(fields)
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(1, max_dim))
    lo, hi = (-3, 3) if F is QQ else (0, F.p - 1)
    data = draw(st.lists(st.integers(lo, hi), min_size=r * c, max_size=r * c))
    return Matrix(F, np.array(data, dtype=object).reshape(r, c) if r else F.zeros(0, c))


@given(matrices())
def test_rank_nullity(m):
    assert rank(m) + kernel_basis(m).cols == m.cols


@given(matrices())
def test_kernel_annihilates(m):
    k = kernel_basis(m)
    if k.cols and m.rows:
        assert not np.any(m.field.matmul(m.data, k.data))


@given(matrices())
def test_rref_idempotent_and_pivots(m):
    if m.rows == 0:
        return
    r, piv = rref(m)
    r2, piv2 = rref(r)
    assert r2 == r and piv2 == piv
    assert len(piv) == rank(m)
    for i, c in enumerate(piv):
        col = r.data[:, c]
        assert col[i] == 1 and sum(1 for v in col if v != 0) == 1


@given(matrices(), st.integers(0, 2**31))
def test_solve_consistent_rhs(m, seed):
    if m.rows == 0:
        return
    F = m.field
    x0 = F.random(np.random.default_rng(seed), m.cols, 1)
    b = Matrix(F, F.matmul(m.data, x0))
    x = solve(m, b)
    assert x is not None and np.array_equal(F.matmul(m.data, x.data), b.data)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**31))
def test_gf2_kernel_matches_enumeration(r, c, seed):
    data = np.random.default_rng(seed).integers(0, 2, (r, c))
    m = Matrix(F2, data)
    brute = sum(1 for v in itertools.product(range(2), repeat=c) if not np.any((data @ np.array(v)) % 2))
    assert 2 ** kernel_basis(m).cols == brute


# -- multimodular elimination over Q ---------------------------------------------------

def _plain_rref(a):
    return Field.rref(QQ, a)


def _low_rank(rng, rows, cols, rank, scale=3, den=4):
    left = np.array([[Fraction(int(rng.integers(-scale, scale + 1)), int(rng.integers(1, den + 1)))
                      for _ in range(rank)] for _ in range(rows)], dtype=object)
    right = np.array([[Fraction(int(rng.integers(-scale, scale + 1)), int(rng.integers(1, den + 1)))
                       for _ in range(cols)] for _ in range(rank)], dtype=object)
    return QQ.matmul(left, right)


@settings(max_examples=12)
@given(st.integers(20, 30), st.integers(20, 30), st.integers(0, 25), st.integers(0, 2**32))
def test_modular_rref_matches_fraction_elimination(r, c, k, seed):
    a = _low_rank(np.random.default_rng(seed), r, c, k)
    fast, piv = QQ.rref(a)
    slow, piv2 = _plain_rref(a)
    assert piv == piv2 and np.array_equal(fast, slow)
    assert len(piv) <= k


def test_modular_rref_needs_several_primes():
    rng = np.random.default_rng(3)
    b = np.array([[Fraction(int(rng.integers(10**15, 10**16)), int(rng.integers(1, 10**6))) for _ in range(6)]
                  for _ in range(20)], dtype=object)
    d = QQ.array(np.eye(20, dtype=np.int64) + np.triu(rng.integers(-2, 3, size=(20, 20)), 1))
    a = np.concatenate([d, QQ.matmul(d, b)], axis=1)
    assert _modular_rref(_integer_rows(a)) is not None
    r, piv = QQ.rref(a)
    assert piv == list(range(20)) and np.array_equal(r[:, 20:], b)


def test_modular_rref_falls_back_on_tall_entries():
    rng = np.random.default_rng(4)
    b = np.array([[Fraction(int(rng.integers(1, 10)) * 10**400 + 1, 3)] for _ in range(20)], dtype=object)
    a = np.concatenate([QQ.eye(20), b], axis=1)
    assert _modular_rref(_integer_rows(a)) is None
    r, piv = QQ.rref(a)
    assert piv == list(range(20)) and np.array_equal(r, a)


def test_modular_rref_survives_unlucky_prime():
    p = _modular_prime(0)
    a = np.array(np.eye(21, dtype=np.int64), dtype=object)
    a[20, 20] = p  # singular modulo the first prime only
    a[0, 20] = 1
    a = QQ.array(a)
    fast, piv = QQ.rref(a)
    assert piv == list(range(21)) and np.array_equal(fast, QQ.eye(21))


def test_rref_integer_agrees():
    rng = np.random.default_rng(5)
    ints = rng.integers(-3, 4, size=(30, 25)) @ rng.integers(-2, 3, size=(25, 25)) * (rng.integers(0, 2, size=(1, 25)))
    r1, p1 = QQ.rref_integer(ints.astype(object))
    r2, p2 = _plain_rref(QQ.array(ints))
    assert p1 == p2 and np.array_equal(r1, r2)


def test_rational_reconstruction():
    m = _modular_prime(0) * _modular_prime(1)
    for f in (Fraction(3, 7), Fraction(-22, 5), Fraction(0), Fraction(10**6, 999)):
        u = f.numerator * pow(f.denominator, -1, m) % m
        assert _reconstruct(u, m) == f
    assert _modular_prime(1) < _modular_prime(0) == 2**31 - 1
