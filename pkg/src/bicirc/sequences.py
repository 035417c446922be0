"""Generalized bi-periodic Fibonacci numbers.

``w_n = a**zeta(n+1) * b**zeta(n) * w_{n-1} + w_{n-2}``: the multiplier is
``a`` at even ``n`` and ``b`` at odd ``n``.  Values are exact Python ints;
the Binet form and generating-function expansion are float cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .numeric import IdentityFailed


def zeta(n: int) -> int:
    """Parity indicator ``(1 - (-1)**n) / 2``."""
    return n & 1


@dataclass(frozen=True)
class SeqParams:
    a: int
    b: int
    w0: int = 0
    w1: int = 1

    def __post_init__(self):
        for name in ("a", "b", "w0", "w1"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"{name} must be an integer, got {value!r}")
        if self.a < 1:
            raise ValueError(f"a must be a positive integer, got {self.a}")
        if self.b < 1:
            raise ValueError(f"b must be a positive integer, got {self.b}")
        if self.w0 < 0:
            raise ValueError(f"w0 must be a nonnegative integer, got {self.w0}")
        if self.w1 < 1:
            raise ValueError(f"w1 must be a positive integer, got {self.w1}")

    @classmethod
    def fibonacci(cls, a: int, b: int) -> "SeqParams":
        """Bi-periodic Fibonacci ``q_n``: ``(w0, w1) = (0, 1)``."""
        return cls(a, b, 0, 1)

    @classmethod
    def lucas(cls, a: int, b: int) -> "SeqParams":
        """Bi-periodic Lucas ``p_n``: ``(w0, w1) = (2, b)``."""
        return cls(a, b, 2, b)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.a, self.b)


@dataclass(frozen=True)
class SequenceTable:
    params: SeqParams
    values: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> int:
        return self.values[k]

    @property
    def N(self) -> int:
        return len(self.values) - 1

    def check(self) -> bool:
        """Re-verify the recurrence certificate over the whole table."""
        p, v = self.params, self.values
        if v[0] != p.w0 or (len(v) > 1 and v[1] != p.w1):
            return False
        for n in range(2, len(v)):
            mult = p.a if zeta(n) == 0 else p.b
            if v[n] != mult * v[n - 1] + v[n - 2]:
                return False
        return True


def generate(params: SeqParams, N: int) -> SequenceTable:
    """Exact table ``w_0 .. w_N``."""
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    values = [params.w0, params.w1]
    for n in range(2, N + 1):
        mult = params.a ** zeta(n + 1) * params.b ** zeta(n)
        values.append(mult * values[-1] + values[-2])
    return SequenceTable(params, tuple(values[: N + 1]))


@dataclass(frozen=True)
class RootPair:
    alpha: float
    beta: float
    discriminant: float

    @property
    def gap(self) -> float:
        return self.alpha - self.beta


def roots(params: SeqParams) -> RootPair:
    """Roots of ``x**2 - ab*x - ab``, ``alpha > 0 > beta``."""
    ab = params.a * params.b
    disc = float(ab * ab + 4 * ab)
    s = math.sqrt(disc)
    alpha = (ab + s) / 2
    # ab - s suffers cancellation; alpha*beta = -ab is exact in the coefficients
    beta = -ab / alpha
    return RootPair(alpha, beta, disc)


@dataclass(frozen=True)
class BinetCoeffs:
    A: float
    B: float


def binet_coeffs(params: SeqParams, rp: RootPair | None = None) -> BinetCoeffs:
    if rp is None:
        rp = roots(params)
    gap = math.sqrt(rp.discriminant)
    A = (params.w1 - (rp.beta / params.a) * params.w0) / gap
    B = (params.w1 - (rp.alpha / params.a) * params.w0) / gap
    return BinetCoeffs(A, B)


def binet_eval(params: SeqParams, n: int) -> float:
    """Binet closed form for ``w_n``, ``n >= 1``."""
    if n < 1:
        raise ValueError(f"Binet form requires n >= 1, got {n}")
    rp = roots(params)
    c = binet_coeffs(params, rp)
    ab = params.a * params.b
    # (alpha**n)/(ab)**floor(n/2) overflows slower when scaled stepwise
    half = n // 2
    scale_a = (rp.alpha / math.sqrt(ab)) ** n * math.sqrt(ab) ** (n - 2 * half)
    scale_b = (rp.beta / math.sqrt(ab)) ** n * math.sqrt(ab) ** (n - 2 * half)
    return params.a ** zeta(n + 1) * (c.A * scale_a - c.B * scale_b)


def scaled_square(params: SeqParams, k: int, wk: int) -> Fraction:
    """``(a/b)**zeta(k) * w_k**2`` exactly."""
    sq = Fraction(wk * wk)
    return sq * params.ratio if zeta(k) else sq


def sum_squares_from1(params: SeqParams, n: int) -> Fraction:
    """``sum_{k=1}^{n} (a/b)**zeta(k) w_k**2``, checked against ``(w_n w_{n+1} - w0 w1)/b``.

    The identity also holds at ``n = 1``, which is accepted here.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    w = generate(params, n + 1)
    total = sum((scaled_square(params, k, w[k]) for k in range(1, n + 1)), Fraction(0))
    closed = Fraction(w[n] * w[n + 1] - params.w0 * params.w1, params.b)
    if total != closed:
        raise IdentityFailed(f"sum of squares from 1 failed for {params}, n={n}: {total} != {closed}")
    return total


def sum_squares_from0(params: SeqParams, n: int) -> Fraction:
    """``sum_{k=0}^{n-1} (a/b)**zeta(k) w_k**2``, checked against
    ``(w_n w_{n-1} - w0 w1 + b w0**2)/b``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    w = generate(params, n)
    total = sum((scaled_square(params, k, w[k]) for k in range(n)), Fraction(0))
    closed = Fraction(w[n] * w[n - 1] - params.w0 * params.w1 + params.b * params.w0 ** 2, params.b)
    if total != closed:
        raise IdentityFailed(f"sum of squares from 0 failed for {params}, n={n}: {total} != {closed}")
    return total


def genfn_polys(params: SeqParams) -> tuple[list[int], list[int]]:
    """Numerator and denominator coefficients (ascending powers) of the generating function."""
    a, b, w0, w1 = params.a, params.b, params.w0, params.w1
    num = [w0, w1, a * w1 - (a * b + 1) * w0, b * w0 - w1]
    den = [1, 0, -(a * b + 2), 0, 1]
    return num, den


def series_coeffs(num: Sequence, den: Sequence, N: int) -> list:
    """First ``N+1`` Maclaurin coefficients of ``num(x)/den(x)``; needs ``den[0] != 0``.

    Solves ``den * c = num`` term by term, i.e. the linear recurrence
    ``c_k = (num_k - sum_{i>=1} den_i c_{k-i}) / den_0``.
    """
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    if den[0] == 0:
        raise ZeroDivisionError("denominator has no constant term")
    out: list = []
    for k in range(N + 1):
        acc = num[k] if k < len(num) else 0 * den[0]
        for i in range(1, min(k, len(den) - 1) + 1):
            acc = acc - den[i] * out[k - i]
        out.append(acc / den[0])
    return out


def genfn_coeffs(params: SeqParams, N: int) -> list[float]:
    num, den = genfn_polys(params)
    return series_coeffs([float(c) for c in num], [float(c) for c in den], N)
