"""Matrix norms, the Zielke and Mathias inequalities, and spectral-norm bounds for W_r."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circulant import (
    DenseMatrix,
    as_matrix,
    build_Wr,
    densify,
    exact_abs2_entries,
    factor_U,
    factor_W,
    hadamard,
)
from .numeric import (
    DEFAULT_TOL,
    GaussianRational,
    IdentityFailed,
    InequalityViolated,
    NoConvergence,
    Tolerances,
    ZeroRatio,
)
from .sequences import SeqParams, generate, scaled_square, sum_squares_from0

INEQ_SLACK = 1e-8
DEFAULT_SEED = 20240601
SQUARE_EVERY = 50
CONFIRM_SQUARINGS = 32


class Regime(enum.Enum):
    R_GE_1 = "r_ge_1"
    R_LT_1 = "r_lt_1"


class SpecialCase(enum.Enum):
    BI_FIBONACCI = "bi_fibonacci"
    BI_LUCAS = "bi_lucas"
    CLASSICAL_GENERALIZED = "classical_generalized"


@dataclass
class CheckRecord:
    name: str
    passed: bool
    slack: float
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "slack": self.slack}


def frobenius(A: DenseMatrix) -> float:
    A = as_matrix(A)
    return math.sqrt(float(np.sum(A.real ** 2 + A.imag ** 2)))


def frobenius_closed_sq(params: SeqParams, n: int, r: GaussianRational) -> Fraction:
    """``sum_k (n + k(|r|**2 - 1)) (a/b)**zeta(k) w_k**2`` exactly."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not isinstance(r, GaussianRational):
        r = GaussianRational.from_complex(r)
    if r.is_zero():
        raise ZeroRatio()
    w = generate(params, max(n - 1, 1))
    r2m1 = r.abs2() - 1
    return sum(((n + k * r2m1) * scaled_square(params, k, w[k]) for k in range(n)), Fraction(0))


def frobenius_sq_entrywise(params: SeqParams, n: int, r: GaussianRational) -> Fraction:
    """Exact ``sum_ij |entry_ij|**2`` of ``W_r``; the oracle for :func:`frobenius_closed_sq`."""
    return sum((x for row in exact_abs2_entries(params, n, r) for x in row), Fraction(0))


def _unit_start(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _high_power(H: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Unit vector along ``H**(2**CONFIRM_SQUARINGS) v``."""
    P = H
    for _ in range(CONFIRM_SQUARINGS):
        P = P @ P
        P /= np.max(np.abs(P))
    u = P @ v
    nu = np.linalg.norm(u)
    return v if nu == 0.0 else u / nu


def spectral_norm(A: DenseMatrix, tol: Tolerances = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> float:
    """Largest singular value via power iteration on the Gram matrix ``G = A^H A``.

    Stops when the Rayleigh quotient ``v^H G v`` changes by less than
    ``tol.power_iter_tol`` relative.  Every ``SQUARE_EVERY`` steps without
    convergence the iteration matrix is squared (and rescaled), so a step
    applies ``G**(2**k)``; this keeps nearly tied top singular values from
    stalling the iteration.  A small step is only accepted once a much higher
    power of the iteration matrix leaves the quotient unchanged.
    """
    A = as_matrix(A)
    if frobenius(A) == 0.0:
        return 0.0
    G = A.conj().T @ A
    H = G
    v = _unit_start(G.shape[1], seed)
    prev = float(np.vdot(v, G @ v).real)
    rq = last = prev
    for it in range(1, tol.power_iter_max + 1):
        u = H @ v
        nu = np.linalg.norm(u)
        if nu == 0.0:
            # start vector fell in the null space; reseed deterministically
            v = _unit_start(G.shape[1], seed + it)
            prev = float(np.vdot(v, G @ v).real)
            continue
        v = u / nu
        rq = float(np.vdot(v, G @ v).real)
        if abs(rq - prev) <= tol.power_iter_tol * abs(rq):
            # a small step can also mean slow progress; confirm with a high power
            w = _high_power(H, v)
            rq2 = float(np.vdot(w, G @ w).real)
            if abs(rq2 - rq) <= tol.power_iter_tol * abs(rq2):
                return math.sqrt(max(rq, rq2, 0.0))
            v, rq = w, rq2
        prev, last = rq, prev
        if it % SQUARE_EVERY == 0:
            H = H @ H
            H /= np.max(np.abs(H))
    raise NoConvergence("power iteration did not converge", rq, last, tol.power_iter_max)


def r1_max_row(A: DenseMatrix) -> float:
    A = as_matrix(A)
    return float(np.sqrt(np.max(np.sum(np.abs(A) ** 2, axis=1))))


def c1_max_col(A: DenseMatrix) -> float:
    A = as_matrix(A)
    return float(np.sqrt(np.max(np.sum(np.abs(A) ** 2, axis=0))))


def _check(name: str, slacks: dict[str, float], scale: float, strict: bool) -> CheckRecord:
    """Each slack is ``rhs - lhs``; the check passes when all exceed ``-INEQ_SLACK * scale``."""
    worst = min(slacks.values())
    passed = worst >= -INEQ_SLACK * max(1.0, scale)
    rec = CheckRecord(name, passed, worst, dict(slacks))
    if strict and not passed:
        raise InequalityViolated(f"{name} violated: slacks {slacks}")
    return rec


def check_zielke(A: DenseMatrix, tol: Tolerances = DEFAULT_TOL, seed: int = DEFAULT_SEED,
                 strict: bool = True, spec: float | None = None) -> CheckRecord:
    """``||A||_F / sqrt(n) <= ||A||_2 <= ||A||_F`` for square ``A``.

    ``spec`` may carry an already computed spectral norm of ``A``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError(f"Zielke check needs a square matrix, got {A.shape}")
    fro = frobenius(A)
    if spec is None:
        spec = spectral_norm(A, tol, seed)
    slacks = {"lower": spec - fro / math.sqrt(n), "upper": fro - spec}
    return _check("zielke", slacks, fro, strict)


def check_mathias(A: DenseMatrix, B: DenseMatrix, tol: Tolerances = DEFAULT_TOL,
                  seed: int = DEFAULT_SEED, strict: bool = True) -> CheckRecord:
    """``||A o B||_2 <= ||A||_2 ||B||_2`` and ``||A o B||_2 <= r1(A) c1(B)``."""
    AB = hadamard(A, B)
    lhs = spectral_norm(AB, tol, seed)
    prod_norms = spectral_norm(A, tol, seed) * spectral_norm(B, tol, seed)
    row_col = r1_max_row(A) * c1_max_col(B)
    slacks = {"spectral_product": prod_norms - lhs, "row_col": row_col - lhs}
    return _check("mathias", slacks, max(prod_norms, row_col), strict)


def delta(params: SeqParams, n: int) -> Fraction:
    """``w_{n-1} w_n - w0 w1 + b w0**2``; ``delta/b`` must equal the row sum of squares."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    w = generate(params, n)
    d = Fraction(w[n - 1] * w[n] - params.w0 * params.w1 + params.b * params.w0 ** 2)
    if d / params.b != sum_squares_from0(params, n):
        raise IdentityFailed(f"delta/b differs from the row sum of squares for {params}, n={n}")
    return d


@dataclass(frozen=True)
class Bounds:
    lower: float
    upper: float
    regime: Regime


def regime_of(r: complex) -> Regime:
    return Regime.R_GE_1 if abs(complex(r)) >= 1 else Regime.R_LT_1


def bounds_from_radicand(radicand: Fraction, n: int, r: complex) -> Bounds:
    """Both regimes' bounds given ``delta/b`` (or its specialised equivalent)."""
    r = complex(r)
    if r == 0:
        raise ZeroRatio()
    base = math.sqrt(radicand)
    mod = abs(r)
    if mod >= 1:
        return Bounds(base, math.sqrt(((n - 1) * mod * mod + 1) * float(radicand)), Regime.R_GE_1)
    return Bounds(mod * base, math.sqrt(n * float(radicand)), Regime.R_LT_1)


def spectral_bounds(params: SeqParams, n: int, r: complex) -> Bounds:
    return bounds_from_radicand(delta(params, n) / params.b, n, r)


def special_case_bounds(kind: SpecialCase, params: SeqParams, n: int, r: complex) -> Bounds:
    """Bounds written in terms of ``q_n``, ``p_n`` or (for ``a = b = 1``) ``w_n``.

    ``params`` supplies ``a, b`` for the first two kinds and ``w0, w1`` for
    the third; the fixed fields are overridden.  The classical radicand is
    ``w_{n-1} w_n - w0 w1 + w0**2``.
    """
    kind = SpecialCase(kind)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if kind is SpecialCase.BI_FIBONACCI:
        q = generate(SeqParams.fibonacci(params.a, params.b), n)
        radicand = Fraction(q[n - 1] * q[n], params.b)
    elif kind is SpecialCase.BI_LUCAS:
        p = generate(SeqParams.lucas(params.a, params.b), n)
        radicand = Fraction(p[n - 1] * p[n], params.b) + 2
    else:
        w = generate(SeqParams(1, 1, params.w0, params.w1), n)
        radicand = Fraction(w[n - 1] * w[n] - params.w0 * params.w1 + params.w0 ** 2)
    return bounds_from_radicand(radicand, n, r)


def special_case_params(kind: SpecialCase, params: SeqParams) -> SeqParams:
    """The general-bound parameters that a special case corresponds to."""
    kind = SpecialCase(kind)
    if kind is SpecialCase.BI_FIBONACCI:
        return SeqParams.fibonacci(params.a, params.b)
    if kind is SpecialCase.BI_LUCAS:
        return SeqParams.lucas(params.a, params.b)
    return SeqParams(1, 1, params.w0, params.w1)


@dataclass(frozen=True)
class HadamardBoundReport:
    r1_U: float
    c1_W: float
    product: float
    spectral_of_product_matrix: float


def hadamard_bound(params: SeqParams, n: int, r: complex, tol: Tolerances = DEFAULT_TOL,
                   seed: int = DEFAULT_SEED) -> HadamardBoundReport:
    U, W = factor_U(n, r), factor_W(params, n)
    r1, c1 = r1_max_row(U), c1_max_col(W)
    return HadamardBoundReport(r1, c1, r1 * c1, spectral_norm(hadamard(U, W), tol, seed))


@dataclass
class NormReport:
    n: int
    r: complex
    frobenius_direct: float
    frobenius_closed_sq: Fraction
    spectral_numeric: float
    delta: Fraction
    lower_bound: float
    upper_bound: float
    regime: Regime
    checks: list[CheckRecord]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def analyze_norms(params: SeqParams, n: int, r: GaussianRational | complex,
                  tol: Tolerances = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> NormReport:
    """Every norm quantity for ``W_r`` with each closed form checked against its oracle."""
    rg = r if isinstance(r, GaussianRational) else GaussianRational.from_complex(r)
    rc = complex(rg)
    if rc == 0:
        raise ZeroRatio()
    A = densify(build_Wr(params, n, rc))
    fro = frobenius(A)
    closed_sq = frobenius_closed_sq(params, n, rg)
    entry_sq = frobenius_sq_entrywise(params, n, rg)
    spec = spectral_norm(A, tol, seed)
    d = delta(params, n)
    bnd = spectral_bounds(params, n, rc)
    hb = hadamard_bound(params, n, rc, tol, seed)
    scale = max(1.0, bnd.upper)

    closed_f = math.sqrt(closed_sq)
    checks = [
        CheckRecord("frobenius_exact", closed_sq == entry_sq, 0.0 if closed_sq == entry_sq
                    else float(abs(closed_sq - entry_sq))),
        CheckRecord("frobenius_float", abs(closed_f - fro) <= tol.abs_tol + tol.rel_tol * max(closed_f, fro),
                    tol.rel_tol * max(closed_f, fro) - abs(closed_f - fro)),
        _check("sandwich_lower", {"lower": spec - bnd.lower}, scale, False),
        _check("sandwich_upper", {"upper": bnd.upper - spec}, scale, False),
        _check("hadamard_row_col", {"row_col": hb.product - hb.spectral_of_product_matrix}, hb.product, False),
        check_zielke(A, tol, seed, strict=False, spec=spec),
    ]
    return NormReport(n, rc, fro, closed_sq, spec, d, bnd.lower, bnd.upper, bnd.regime, checks)
