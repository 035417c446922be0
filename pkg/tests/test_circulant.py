import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from bicirc.circulant import (
    RCirculant,
    build_Wr,
    circ,
    conj_transpose,
    densify,
    exact_abs2_entries,
    factor_U,
    factor_W,
    hadamard,
    matmul,
    matrix_to_json,
    matvec,
    scaled_first_row,
)
from bicirc.numeric import GaussianRational, ShapeError, ZeroRatio
from bicirc.sequences import SeqParams

S23 = math.sqrt(2 / 3)


def test_densify_examples():
    assert np.array_equal(densify(circ(1, [0, 1])), [[0, 1], [1, 0]])
    assert np.array_equal(densify(circ(2, [0, 1, 1])), [[0, 1, 1], [2, 0, 1], [2, 2, 0]])
    assert np.array_equal(densify(circ(5j, [7])), [[7]])


def test_rcirculant_validation():
    with pytest.raises(ZeroRatio):
        circ(0, [1, 2])
    with pytest.raises(ShapeError):
        RCirculant(3, 1, (1, 2))


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_densify_row_rotation(n):
    rng = np.random.default_rng(n)
    c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    r = complex(rng.standard_normal(), rng.standard_normal())
    M = densify(circ(r, c))
    assert np.array_equal(M[0], c)
    for i in range(n):
        expected = [r * c[n - i + k] for k in range(i)] + list(c[: n - i])
        assert np.allclose(M[i], expected, rtol=0, atol=0)


def test_r1_gives_constant_diagonals():
    c = [3, 1, 4, 1, 5]
    M = densify(circ(1, c))
    n = len(c)
    for i, j in itertools.product(range(n), repeat=2):
        assert M[i, j] == c[(j - i) % n]


@pytest.mark.parametrize("params, n, expected", [
    (SeqParams(1, 1, 0, 1), 4, [0, 1, 1, 2]),
    (SeqParams(2, 3, 0, 1), 3, [0, S23, 2]),
    (SeqParams(2, 3, 2, 3), 2, [2, 3 * S23]),
])
def test_scaled_first_row(params, n, expected):
    assert scaled_first_row(params, n) == pytest.approx(expected, rel=1e-15)


def test_scaled_first_row_n1():
    assert scaled_first_row(SeqParams(2, 3, 4, 1), 1) == [4]


def test_build_Wr_examples():
    assert build_Wr(SeqParams(1, 1), 2, 1) == circ(1, [0, 1])
    assert build_Wr(SeqParams(1, 1), 3, 2) == circ(2, [0, 1, 1])
    W = build_Wr(SeqParams(2, 3), 3, 1.5)
    assert W.r == 1.5 and W.first_row == pytest.approx([0, S23, 2])
    with pytest.raises(ZeroRatio):
        build_Wr(SeqParams(1, 1), 3, 0)


def test_hadamard_examples():
    A = np.array([[1, 2], [3, 4]])
    assert np.array_equal(hadamard(A, np.ones((2, 2))), A)
    assert np.array_equal(hadamard(A, [[5, 6], [7, 8]]), [[5, 12], [21, 32]])
    with pytest.raises(ShapeError):
        hadamard(A, np.ones((2, 3)))


def test_factor_U_examples():
    assert np.array_equal(factor_U(2, 3), [[1, 1], [3, 1]])
    assert np.array_equal(factor_U(3, 1), np.ones((3, 3)))
    assert np.array_equal(factor_U(1, 7 + 2j), [[1]])


def test_factor_W_examples():
    assert np.array_equal(factor_W(SeqParams(1, 1), 2), [[0, 1], [1, 0]])
    W = factor_W(SeqParams(2, 3), 3)
    row = np.array([0, S23, 2])
    for i in range(3):
        assert np.allclose(W[i], np.roll(row, i), rtol=1e-15)


def test_hadamard_factorization_exact_on_grid():
    rs = [2, 0.5, 1 + 1j, -3, 1j, 0.3 - 0.7j]
    for a, b, w0, w1 in itertools.product(range(1, 5), range(1, 5), range(0, 4), range(1, 4)):
        p = SeqParams(a, b, w0, w1)
        for n in range(1, 17):
            for r in rs:
                assert np.array_equal(hadamard(factor_U(n, r), factor_W(p, n)), densify(build_Wr(p, n, r)))


def test_dense_primitives():
    A = np.array([[1, 2j], [3, 4]])
    assert np.array_equal(matmul(np.eye(2), A), A)
    assert np.array_equal(conj_transpose([[1j]]), [[-1j]])
    Q = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert np.allclose(matmul(conj_transpose(Q), Q), np.eye(2), atol=1e-15)
    assert np.array_equal(matvec(A, [1, 1]), [1 + 2j, 7])
    with pytest.raises(ShapeError):
        matmul(A, np.ones((3, 1)))
    with pytest.raises(ShapeError):
        matvec(A, [1, 2, 3])


def test_exact_abs2_entries_matches_float_densify():
    p = SeqParams(2, 3, 1, 2)
    r = GaussianRational(Fraction(3, 4), Fraction(1, 4))
    exact = exact_abs2_entries(p, 5, r)
    dense = densify(build_Wr(p, 5, complex(r)))
    assert np.allclose(np.abs(dense) ** 2, [[float(x) for x in row] for row in exact], rtol=1e-14)


def test_matrix_json_schema():
    out = matrix_to_json(circ(2, [0, 1, 1]))
    assert out["n"] == 3
    assert out["r"] == [2.0, 0.0]
    assert out["first_row"] == [[0.0, 0.0], [1.0, 0.0], [1.0, 0.0]]
    assert out["dense"][1] == [[2.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
