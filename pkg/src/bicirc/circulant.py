"""r-circulant matrices and dense complex primitives.

Dense matrices are ``numpy`` ``complex128`` arrays.  ``densify`` follows
the entry rule literally (``c_{j-i}`` on and above the diagonal,
``r * c_{n+j-i}`` below) so it can serve as an oracle for everything else.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .numeric import GaussianRational, NonFinite, ShapeError, ZeroRatio, check_finite
from .sequences import SeqParams, generate, scaled_square, zeta

DenseMatrix = np.ndarray


@dataclass(frozen=True)
class RCirculant:
    n: int
    r: complex
    first_row: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "r", complex(self.r))
        object.__setattr__(self, "first_row", tuple(complex(c) for c in self.first_row))
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if len(self.first_row) != self.n:
            raise ShapeError(f"first_row has length {len(self.first_row)}, expected {self.n}")
        check_finite(self.r, "r")
        if self.r == 0:
            raise ZeroRatio()
        for c in self.first_row:
            check_finite(c, "first_row entry")


def circ(r: complex, row: Sequence[complex]) -> RCirculant:
    """Shorthand for ``circ_{r,n}[c_0, ..., c_{n-1}]``."""
    return RCirculant(len(row), r, tuple(row))


def as_matrix(A) -> DenseMatrix:
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or 0 in M.shape:
        raise ShapeError(f"expected a nonempty 2-d matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFinite("matrix has non-finite entries")
    return M


def densify(C: RCirculant) -> DenseMatrix:
    n, r, c = C.n, C.r, C.first_row
    M = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            M[i, j] = c[j - i] if j >= i else r * c[n + j - i]
    return M


def scaled_first_row(params: SeqParams, n: int) -> list[complex]:
    """``(a/b)**(zeta(k)/2) * w_k`` for ``k = 0 .. n-1``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    w = generate(params, max(n - 1, 1))
    s = math.sqrt(params.a / params.b)
    return [complex(s * w[k] if zeta(k) else float(w[k])) for k in range(n)]


def build_Wr(params: SeqParams, n: int, r: complex) -> RCirculant:
    r = complex(r)
    if r == 0:
        raise ZeroRatio()
    return RCirculant(n, r, tuple(scaled_first_row(params, n)))


def factor_U(n: int, r: complex) -> DenseMatrix:
    """Ones on and above the diagonal, ``r`` strictly below."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    U = np.ones((n, n), dtype=complex)
    U[np.tril_indices(n, -1)] = complex(r)
    return U


def factor_W(params: SeqParams, n: int) -> DenseMatrix:
    return densify(build_Wr(params, n, 1))


def hadamard(A: DenseMatrix, B: DenseMatrix) -> DenseMatrix:
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise ShapeError(f"Hadamard product needs equal shapes, got {A.shape} and {B.shape}")
    return A * B


def matmul(A: DenseMatrix, B: DenseMatrix) -> DenseMatrix:
    A, B = as_matrix(A), as_matrix(B)
    if A.shape[1] != B.shape[0]:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    return A @ B


def conj_transpose(A: DenseMatrix) -> DenseMatrix:
    return as_matrix(A).conj().T


def matvec(A: DenseMatrix, v) -> np.ndarray:
    A = as_matrix(A)
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.shape[0] != A.shape[1]:
        raise ShapeError(f"cannot apply {A.shape} matrix to vector of shape {v.shape}")
    return A @ v


def exact_abs2_entries(params: SeqParams, n: int, r: GaussianRational) -> list[list[Fraction]]:
    """``|entry_ij|**2`` of ``W_r`` in exact arithmetic, by the same entry rule as ``densify``.

    Only squared moduli are rational: ``|sqrt(a/b)**zeta(k) w_k|**2 = (a/b)**zeta(k) w_k**2``.
    """
    if r.is_zero():
        raise ZeroRatio()
    w = generate(params, max(n - 1, 1))
    sq = [scaled_square(params, k, w[k]) for k in range(n)]
    r2 = r.abs2()
    return [[sq[j - i] if j >= i else r2 * sq[n + j - i] for j in range(n)] for i in range(n)]


def matrix_to_json(C: RCirculant) -> dict:
    def pair(z: complex) -> list[float]:
        return [z.real, z.imag]

    D = densify(C)
    return {
        "n": C.n,
        "r": pair(C.r),
        "first_row": [pair(c) for c in C.first_row],
        "dense": [[pair(complex(z)) for z in row] for row in D],
    }
