"""Scalar kernel: exact rationals, complex scalars, tolerance policy.

Python ``int`` serves as the arbitrary-precision integer and
``fractions.Fraction`` as the exact rational (always reduced, positive
denominator).  Floating paths use the builtin ``complex``.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction

ExactRational = Fraction


class BicircError(Exception):
    """Base class for all errors raised by this package."""


class NonFinite(BicircError, ValueError):
    pass


class ZeroRatio(BicircError, ValueError):
    """The r-circulant ratio must lie in C \\ {0}."""

    def __init__(self, msg: str = "r must be nonzero (r in C\\{0})"):
        super().__init__(msg)


class ShapeError(BicircError, ValueError):
    pass


class IdentityFailed(BicircError, AssertionError):
    """An exact identity did not hold; always an implementation bug."""


class InequalityViolated(BicircError, AssertionError):
    pass


class NoConvergence(BicircError, RuntimeError):
    def __init__(self, msg: str, last: float, previous: float, iterations: int):
        super().__init__(f"{msg} (last={last!r}, previous={previous!r}, iterations={iterations})")
        self.last = last
        self.previous = previous
        self.iterations = iterations


class DegenerateFormula(BicircError, ArithmeticError):
    """A closed-form denominator is numerically zero; ``js`` lists the offending indices."""

    def __init__(self, msg: str, js: list[int] | None = None):
        super().__init__(msg)
        self.js = list(js or [])


@dataclass(frozen=True)
class Tolerances:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    power_iter_tol: float = 1e-12
    power_iter_max: int = 10_000
    degeneracy_eps: float = 1e-10

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "power_iter_tol", "degeneracy_eps"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")
        if not (isinstance(self.power_iter_max, int) and self.power_iter_max > 0):
            raise ValueError(f"power_iter_max must be a positive integer, got {self.power_iter_max!r}")


DEFAULT_TOL = Tolerances()


def check_finite(z: complex | float, what: str = "value") -> complex | float:
    """Return ``z`` unchanged, raising NonFinite on NaN/Inf components."""
    if isinstance(z, complex):
        ok = math.isfinite(z.real) and math.isfinite(z.imag)
    else:
        ok = math.isfinite(z)
    if not ok:
        raise NonFinite(f"{what} is not finite: {z!r}")
    return z


def approx_eq(x: float, y: float, tol: Tolerances = DEFAULT_TOL) -> bool:
    check_finite(x, "x")
    check_finite(y, "y")
    return abs(x - y) <= tol.abs_tol + tol.rel_tol * max(abs(x), abs(y))


def nth_root_principal(r: complex, n: int) -> complex:
    """Principal n-th root ``|r|**(1/n) * exp(i*Arg(r)/n)`` with Arg in (-pi, pi]."""
    r = complex(r)
    check_finite(r, "r")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if r == 0:
        raise ZeroRatio()
    if n == 1:
        return r
    modulus, arg = cmath.polar(r)
    # cmath.phase gives -pi for -1-0j; fold onto the (-pi, pi] branch
    if arg == -math.pi:
        arg = math.pi
    return cmath.rect(modulus ** (1.0 / n), arg / n)


def roots_of_unity(n: int) -> list[complex]:
    """``[w**0, ..., w**(n-1)]`` with ``w = exp(2*pi*i/n)``.

    Each power is evaluated directly from its angle, so quarter turns come
    out exact (e.g. ``n=4`` gives ``1, i, -1, -i`` up to signed zeros).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    out = []
    for j in range(n):
        # reduce 4j/n to quadrant + remainder so axis points are exact
        q, rem = divmod(4 * j, n)
        if rem == 0:
            out.append((1 + 0j, 1j, -1 + 0j, -1j)[q % 4])
        else:
            out.append(cmath.exp(2j * math.pi * j / n))
    return out


@dataclass(frozen=True)
class GaussianRational:
    """Complex number with exact rational parts; ``abs2`` is exact."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def from_complex(cls, z: complex) -> "GaussianRational":
        # Fraction(float) is exact: the binary value is kept verbatim
        z = complex(z)
        check_finite(z, "z")
        return cls(Fraction(z.real), Fraction(z.imag))

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"""^\s*
    (?:
      (?P<re>[+-]?{_NUM})(?P<im1>[+-](?:{_NUM})?)i
    | (?P<im2>[+-]?(?:{_NUM})?)i
    | (?P<re_only>[+-]?{_NUM})
    )\s*$""",
    re.VERBOSE,
)


def _imag_part(text: str) -> Fraction:
    if text in ("", "+"):
        return Fraction(1)
    if text == "-":
        return Fraction(-1)
    return Fraction(text)


def parse_gaussian(text: str) -> GaussianRational:
    """Parse ``"x"``, ``"xi"``, ``"x+yi"``, ``"x-yi"`` (decimal parts) exactly.

    A bare ``"i"`` / ``"-i"`` means a unit imaginary part.

    >>> parse_gaussian("0.5+0.25i")
    GaussianRational(re=Fraction(1, 2), im=Fraction(1, 4))
    """
    m = _COMPLEX_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse complex literal {text!r}")
    if m.group("re_only") is not None:
        return GaussianRational(Fraction(m.group("re_only")), Fraction(0))
    if m.group("re") is not None:
        return GaussianRational(Fraction(m.group("re")), _imag_part(m.group("im1")))
    return GaussianRational(Fraction(0), _imag_part(m.group("im2")))


def parse_complex(text: str) -> complex:
    return complex(parse_gaussian(text))


def format_complex(z: complex) -> str:
    """Inverse of :func:`parse_complex` for finite values (round-trips floats)."""
    z = complex(z)
    check_finite(z, "z")
    if z.imag == 0:
        return repr(z.real)
    if z.real == 0:
        return f"{z.imag!r}i"
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"
