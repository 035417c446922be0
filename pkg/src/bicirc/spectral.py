"""Eigenvalues and determinants of r-circulant matrices.

The direct route evaluates ``lambda_j = sum_k c_k (rho w^{-j})^k`` for the
principal ``rho``; the closed forms for ``W_r`` are checked against it, and
determinants are additionally checked against LU and cofactor expansion.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

from .circulant import DenseMatrix, RCirculant, as_matrix, build_Wr, densify
from .numeric import (
    DEFAULT_TOL,
    DegenerateFormula,
    NonFinite,
    ShapeError,
    Tolerances,
    ZeroRatio,
    check_finite,
    nth_root_principal,
    roots_of_unity,
)
from .sequences import SeqParams, generate, zeta

RESIDUAL_TOL = 1e-9
CROSS_TOL = 1e-8
SINGULAR_FLOOR = 1e-6


class Method(enum.Enum):
    CLOSED_FORM = "closed"
    DFT_SUM = "dft"


@dataclass(frozen=True)
class EigenSet:
    n: int
    r: complex
    rho: complex
    eigenvalues: tuple[complex, ...]
    method: Method

    def product(self) -> complex:
        out = 1 + 0j
        for lam in self.eigenvalues:
            out *= lam
        return out


def eval_points(r: complex, n: int) -> tuple[complex, list[complex]]:
    """Principal ``rho`` and the points ``x_j = rho * w**(-j)``, ``j = 0 .. n-1``."""
    rho = nth_root_principal(r, n)
    omega = roots_of_unity(n)
    # w**(-j) = w**(n-j); keeps quarter-turn points exact
    return rho, [rho * omega[(n - j) % n] for j in range(n)]


def eigenvalues_dft(C: RCirculant) -> EigenSet:
    if C.r == 0:
        raise ZeroRatio()
    rho, xs = eval_points(C.r, C.n)
    lams = []
    for x in xs:
        acc, xk = 0j, 1 + 0j
        for c in C.first_row:
            acc += c * xk
            xk *= x
        lams.append(check_finite(acc, "eigenvalue"))
    return EigenSet(C.n, C.r, rho, tuple(lams), Method.DFT_SUM)


def _wr_terms(params: SeqParams, n: int, r: complex) -> tuple[complex, complex, float]:
    """Numerator pieces ``(r c_n - w0, r c_{n-1} + sqrt(a/b)(b w0 - w1))`` and ``sqrt(ab)``."""
    w = generate(params, n)
    s = math.sqrt(params.a / params.b)
    cn = s ** zeta(n) * w[n]
    cn1 = s ** zeta(n + 1) * w[n - 1]
    P = r * cn - params.w0
    Q = r * cn1 + s * (params.b * params.w0 - params.w1)
    return P, Q, math.sqrt(params.a * params.b)


def _closed_precheck(n: int, r: complex) -> complex:
    r = complex(r)
    check_finite(r, "r")
    if r == 0:
        raise ZeroRatio()
    if n < 2:
        raise ValueError("closed forms need n >= 2 (n = 1 is handled directly)")
    return r


def eigenvalues_closed(params: SeqParams, n: int, r: complex, tol: Tolerances = DEFAULT_TOL) -> EigenSet:
    r = _closed_precheck(n, r)
    P, Q, sab = _wr_terms(params, n, r)
    rho, xs = eval_points(r, n)
    dens = [x * x + sab * x - 1 for x in xs]
    bad = [j for j, d in enumerate(dens) if abs(d) < tol.degeneracy_eps]
    if bad:
        raise DegenerateFormula(f"eigenvalue denominator vanishes at j={bad}", bad)
    lams = tuple(check_finite((P + Q * x) / d, "eigenvalue") for x, d in zip(xs, dens))
    return EigenSet(n, r, rho, lams, Method.CLOSED_FORM)


def eigenvalues_case_split(params: SeqParams, n: int, r: complex, tol: Tolerances = DEFAULT_TOL) -> EigenSet:
    """The even-``n`` / odd-``n`` specialisations written out separately."""
    r = _closed_precheck(n, r)
    w = generate(params, n)
    s = math.sqrt(params.a / params.b)
    sab = math.sqrt(params.a * params.b)
    w0, w1, b = params.w0, params.w1, params.b
    rho, xs = eval_points(r, n)
    lams = []
    for j, x in enumerate(xs):
        d = x * x + sab * x - 1
        if abs(d) < tol.degeneracy_eps:
            raise DegenerateFormula(f"eigenvalue denominator vanishes at j={j}", [j])
        if n % 2 == 0:
            num = r * w[n] - w0 + s * x * (r * w[n - 1] + (b * w0 - w1))
        else:
            num = s * r * w[n] - w0 + x * (r * w[n - 1] + s * (b * w0 - w1))
        lams.append(num / d)
    return EigenSet(n, r, rho, tuple(lams), Method.CLOSED_FORM)


def eigen_residual(C: RCirculant, E: EigenSet) -> float:
    """``max_j ||C v_j - lambda_j v_j|| / (||C||_F ||v_j||)`` with ``v_j[k] = x_j**k``."""
    A = densify(C)
    fro = float(np.linalg.norm(A))
    _, xs = eval_points(C.r, C.n)
    worst = 0.0
    for x, lam in zip(xs, E.eigenvalues):
        v = np.array([x ** k for k in range(C.n)], dtype=complex)
        res = float(np.linalg.norm(A @ v - lam * v))
        if res == 0.0:
            continue
        worst = max(worst, res / (fro * float(np.linalg.norm(v))))
    return worst


def det_closed(params: SeqParams, n: int, r: complex, tol: Tolerances = DEFAULT_TOL,
               break_sign: bool = False) -> complex:
    """Closed-form determinant of ``W_r``.

    The denominator uses the bi-periodic Lucas number ``p_n``.
    ``break_sign`` flips the sign joining the two numerator terms; it exists
    only so the verification sweep can prove it notices a wrong formula.
    """
    r = _closed_precheck(n, r)
    w = generate(params, n)
    p = generate(SeqParams.lucas(params.a, params.b), n)
    s = math.sqrt(params.a / params.b)
    sn = s ** zeta(n)
    den = 1 - sn * p[n] * r + (-1) ** n * r * r
    if abs(den) < tol.degeneracy_eps:
        raise DegenerateFormula("determinant denominator vanishes", list(range(n)))
    _, Q, _ = _wr_terms(params, n, r)
    try:
        first = (params.w0 - sn * r * w[n]) ** n
        second = r * Q ** n
    except OverflowError as exc:
        raise NonFinite(f"determinant overflows float64 at n={n}") from exc
    num = first + second if break_sign else first - second
    return check_finite(num / den, "determinant")


def det_lu(A: DenseMatrix) -> complex:
    """Determinant by Gaussian elimination with partial pivoting."""
    M = as_matrix(A).copy()
    n = M.shape[0]
    if M.shape[1] != n:
        raise ShapeError(f"determinant needs a square matrix, got {M.shape}")
    det = 1 + 0j
    for k in range(n):
        piv = k + int(np.argmax(np.abs(M[k:, k])))
        if M[piv, k] == 0:
            return 0j
        if piv != k:
            M[[k, piv]] = M[[piv, k]]
            det = -det
        det *= M[k, k]
        M[k + 1:, k:] -= np.outer(M[k + 1:, k] / M[k, k], M[k, k:])
    return complex(det)


def det_cofactor(A: DenseMatrix) -> complex:
    """Laplace expansion along rows, memoised on the set of remaining columns.

    Brute-force oracle; intended for ``n <= 10`` or so.
    """
    M = [[complex(z) for z in row] for row in as_matrix(A)]
    n = len(M)
    if any(len(row) != n for row in M):
        raise ShapeError("determinant needs a square matrix")

    @lru_cache(maxsize=None)
    def minor(row: int, cols: int) -> complex:
        if row == n:
            return 1 + 0j
        total = 0j
        sign = 1
        for j in range(n):
            if cols & (1 << j):
                if M[row][j] != 0:
                    total += sign * M[row][j] * minor(row + 1, cols & ~(1 << j))
                sign = -sign
        return total

    return minor(0, (1 << n) - 1)


def rel_err(x: complex, y: complex, floor: float = 0.0) -> float:
    scale = max(abs(x), abs(y), floor)
    return 0.0 if scale == 0 else abs(x - y) / scale


def det_sensitivity(eigenvalues) -> float:
    """First-order size of rounding error in ``prod(lambda_j)``.

    A perturbation of size ``R = max |lambda_j|`` in one eigenvalue moves the
    product by ``R * prod_{k != j} |lambda_k|``; summing over ``j`` gives the
    scale against which a (near-)singular determinant is compared.
    """
    mods = [abs(z) for z in eigenvalues]
    R = max(mods, default=0.0)
    total = 0.0
    for j in range(len(mods)):
        term = R
        for k, m in enumerate(mods):
            if k != j:
                term *= m
        total += term
    return total


def det_floor(eigenvalues) -> float:
    """Comparison floor for determinants: ``SINGULAR_FLOOR * det_sensitivity``.

    It only exceeds ``|det|`` when the matrix is singular to within about
    ``1e-6`` of its sensitivity, where a relative error is meaningless.
    """
    return SINGULAR_FLOOR * det_sensitivity(eigenvalues)


def multiset_rel_err(xs, ys) -> float:
    """Max deviation of the best one-to-one pairing, relative to the largest modulus."""
    xs = np.asarray(xs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    if xs.shape != ys.shape:
        raise ShapeError("multisets differ in size")
    scale = float(max(np.max(np.abs(xs)), np.max(np.abs(ys))))
    if scale == 0.0:
        return 0.0
    cost = np.abs(xs[:, None] - ys[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols])) / scale


@dataclass
class EigenReport:
    dft: EigenSet
    closed: EigenSet | None
    residual: float
    multiset_err: float | None
    trace_err: float
    degenerate_js: list[int] = field(default_factory=list)
    skipped: str | None = None

    @property
    def method(self) -> Method:
        return Method.CLOSED_FORM if self.closed is not None else Method.DFT_SUM

    @property
    def eigenvalues(self) -> tuple[complex, ...]:
        return (self.closed or self.dft).eigenvalues

    def checks(self) -> list[tuple[str, bool, float]]:
        out = [("eigen_residual", self.residual <= RESIDUAL_TOL, RESIDUAL_TOL - self.residual),
               ("trace", self.trace_err <= RESIDUAL_TOL, RESIDUAL_TOL - self.trace_err)]
        if self.multiset_err is not None:
            out.append(("eigen_multiset", self.multiset_err <= CROSS_TOL, CROSS_TOL - self.multiset_err))
        return out

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks())


def analyze_eigen(params: SeqParams, n: int, r: complex, tol: Tolerances = DEFAULT_TOL) -> EigenReport:
    C = build_Wr(params, n, r)
    dft = eigenvalues_dft(C)
    residual = eigen_residual(C, dft)
    tr = sum(dft.eigenvalues)
    expected = n * C.first_row[0]
    trace_err = abs(tr - expected) / max(1.0, sum(abs(z) for z in dft.eigenvalues))
    if n < 2:
        return EigenReport(dft, None, residual, None, trace_err, skipped="n >= 2 required")
    try:
        closed = eigenvalues_closed(params, n, r, tol)
    except DegenerateFormula as exc:
        return EigenReport(dft, None, residual, None, trace_err, degenerate_js=exc.js)
    return EigenReport(dft, closed, residual, multiset_rel_err(closed.eigenvalues, dft.eigenvalues), trace_err)


@dataclass
class DetReport:
    det_closed: complex | None
    det_product: complex
    det_lu: complex
    max_pairwise_rel_err: float
    degenerate: bool = False
    skipped: str | None = None

    @property
    def passed(self) -> bool:
        return self.max_pairwise_rel_err <= CROSS_TOL

    @property
    def value(self) -> complex:
        """Closed form when available, else the eigenvalue product."""
        return self.det_closed if self.det_closed is not None else self.det_product


def analyze_det(params: SeqParams, n: int, r: complex, tol: Tolerances = DEFAULT_TOL,
                break_sign: bool = False) -> DetReport:
    C = build_Wr(params, n, r)
    eig = eigenvalues_dft(C)
    prod = eig.product()
    floor = det_floor(eig.eigenvalues)
    lu = det_lu(densify(C))
    if n < 2:
        return DetReport(None, prod, lu, rel_err(prod, lu, floor), skipped="n >= 2 required")
    try:
        closed = det_closed(params, n, r, tol, break_sign=break_sign)
    except DegenerateFormula:
        return DetReport(None, prod, lu, rel_err(prod, lu, floor), degenerate=True)
    err = max(rel_err(closed, prod, floor), rel_err(closed, lu, floor), rel_err(prod, lu, floor))
    return DetReport(closed, prod, lu, err)
