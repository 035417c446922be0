"""Grid-wide verification of every identity, bound and formula against its oracle."""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import norms, spectral
from .circulant import build_Wr, densify, factor_U, factor_W, hadamard
from .numeric import DEFAULT_TOL, BicircError, GaussianRational, Tolerances, parse_gaussian
from .sequences import (
    SeqParams,
    binet_eval,
    generate,
    genfn_coeffs,
    sum_squares_from0,
    sum_squares_from1,
)

IDENTITIES = (
    "squares_from1", "squares_from0", "q_p_squares", "binet", "genfn",
    "hadamard_factorization", "frobenius_closed", "spectral_sandwich", "special_case_bounds",
    "eigen_closed", "eigen_case_split", "eigen_residual", "det_agreement", "zielke", "mathias",
)

BINET_TOL = 1e-9
COFACTOR_MAX_N = 8


@dataclass
class Tally:
    checked: int = 0
    passed: int = 0
    skipped: int = 0
    first_failure: dict | None = None
    skip_reasons: list[str] = field(default_factory=list)

    @property
    def failed(self) -> int:
        return self.checked - self.passed

    def record(self, ok: bool, where: dict, **extra) -> None:
        self.checked += 1
        if ok:
            self.passed += 1
        elif self.first_failure is None:
            self.first_failure = {**where, **extra}

    def skip(self, reason: str) -> None:
        self.skipped += 1
        if reason not in self.skip_reasons:
            self.skip_reasons.append(reason)

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "skip_reasons": self.skip_reasons,
            "first_failure": self.first_failure,
        }


@dataclass
class VerifyGrid:
    a: list[int] = field(default_factory=lambda: [1, 2, 3])
    b: list[int] = field(default_factory=lambda: [1, 2, 3])
    w0: list[int] = field(default_factory=lambda: [0, 1, 2])
    w1: list[int] = field(default_factory=lambda: [1, 2, 3])
    n: list[int] = field(default_factory=lambda: list(range(1, 9)))
    r: list[str] = field(default_factory=lambda: ["2", "1+i", "0.5", "-3", "i", "1", "0.25"])
    random_phase_moduli: list[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])
    random_pairs: int = 200
    random_pair_max_n: int = 10

    def size(self) -> int:
        return (len(self.a) * len(self.b) * len(self.w0) * len(self.w1) * len(self.n)
                * (len(self.r) + len(self.random_phase_moduli)))

    def to_json(self) -> dict:
        return {
            "a": self.a, "b": self.b, "w0": self.w0, "w1": self.w1, "n": self.n, "r": self.r,
            "random_phase_moduli": self.random_phase_moduli,
            "random_pairs": self.random_pairs,
        }


def _where(p: SeqParams, n: int | None = None, r: complex | None = None) -> dict:
    out = {"a": p.a, "b": p.b, "w0": p.w0, "w1": p.w1}
    if n is not None:
        out["n"] = n
    if r is not None:
        out["r"] = [r.real, r.imag]
    return out


def _exact(fn, *args) -> bool:
    try:
        fn(*args)
    except BicircError:
        return False
    return True


def _sequence_checks(t: dict[str, Tally], p: SeqParams, ns: list[int]) -> None:
    nmax = max(ns)
    w = generate(p, max(nmax + 1, 20))
    for n in ns:
        here = _where(p, n)
        t["squares_from1"].record(_exact(sum_squares_from1, p, n), here)
        t["squares_from0"].record(_exact(sum_squares_from0, p, n), here)
        if n <= 40:
            got = binet_eval(p, n)
            t["binet"].record(abs(got - w[n]) <= BINET_TOL * max(1, w[n]), here, value=got)
    coeffs = genfn_coeffs(p, 19)
    t["genfn"].record(all(abs(c - w[k]) <= BINET_TOL * max(1, w[k]) for k, c in enumerate(coeffs)),
                      _where(p))


def _q_p_checks(t: dict[str, Tally], a: int, b: int, ns: list[int]) -> None:
    q_params, p_params = SeqParams.fibonacci(a, b), SeqParams.lucas(a, b)
    q = generate(q_params, max(ns) + 1)
    pl = generate(p_params, max(ns) + 1)
    for n in ns:
        ok_q = sum_squares_from1(q_params, n) == Fraction(q[n] * q[n + 1], b)
        ok_p = sum_squares_from1(p_params, n) == Fraction(pl[n] * pl[n + 1], b) - 2
        t["q_p_squares"].record(ok_q and ok_p, {"a": a, "b": b, "n": n})


def _point_checks(t: dict[str, Tally], p: SeqParams, n: int, rg: GaussianRational,
                  tol: Tolerances, seed: int, break_sign: bool) -> bool:
    """All matrix-level checks at one grid point; returns True if a fallback was used."""
    r = complex(rg)
    here = _where(p, n, r)
    C = build_Wr(p, n, r)
    A = densify(C)
    U, W = factor_U(n, r), factor_W(p, n)

    t["hadamard_factorization"].record(bool(np.array_equal(hadamard(U, W), A)), here)

    closed_sq = norms.frobenius_closed_sq(p, n, rg)
    exact_ok = closed_sq == norms.frobenius_sq_entrywise(p, n, rg)
    fro = norms.frobenius(A)
    cf = math.sqrt(closed_sq)
    t["frobenius_closed"].record(exact_ok and abs(cf - fro) <= 1e-9 * max(cf, fro, 1e-300), here)

    spec = norms.spectral_norm(A, tol, seed)
    bnd = norms.spectral_bounds(p, n, r)
    slack = norms.INEQ_SLACK * max(1.0, bnd.upper)
    t["spectral_sandwich"].record(bnd.lower - slack <= spec <= bnd.upper + slack, here,
                         spectral=spec, lower=bnd.lower, upper=bnd.upper)

    ok7 = True
    for kind in norms.SpecialCase:
        special = norms.special_case_bounds(kind, p, n, r)
        general = norms.spectral_bounds(norms.special_case_params(kind, p), n, r)
        ok7 = ok7 and special == general
    t["special_case_bounds"].record(ok7, here)

    t["zielke"].record(norms.check_zielke(A, tol, seed, strict=False, spec=spec).passed, here)
    t["mathias"].record(norms.check_mathias(U, W, tol, seed, strict=False).passed, here)

    eig = spectral.analyze_eigen(p, n, r, tol)
    t["eigen_residual"].record(eig.residual <= spectral.RESIDUAL_TOL, here, residual=eig.residual)
    fallback = False
    if n < 2:
        t["eigen_closed"].skip("n >= 2 required")
        t["eigen_case_split"].skip("n >= 2 required")
        t["det_agreement"].skip("n >= 2 required")
        return False
    if eig.closed is None:
        t["eigen_closed"].skip("degenerate denominator")
        t["eigen_case_split"].skip("degenerate denominator")
        fallback = True
    else:
        t["eigen_closed"].record(eig.multiset_err <= spectral.CROSS_TOL, here, err=eig.multiset_err)
        split = spectral.eigenvalues_case_split(p, n, r, tol)
        par_err = spectral.multiset_rel_err(split.eigenvalues, eig.closed.eigenvalues)
        t["eigen_case_split"].record(par_err <= spectral.CROSS_TOL, here, err=par_err)

    det = spectral.analyze_det(p, n, r, tol, break_sign=break_sign)
    if det.det_closed is None:
        t["det_agreement"].skip("degenerate denominator")
        return True
    ok = det.passed
    extra = {"err": det.max_pairwise_rel_err}
    if n <= COFACTOR_MAX_N:
        cof = spectral.det_cofactor(A)
        floor = spectral.det_floor(eig.dft.eigenvalues)
        cof_err = spectral.rel_err(det.det_closed, cof, floor)
        ok = ok and cof_err <= spectral.CROSS_TOL
        extra["cofactor_err"] = cof_err
    t["det_agreement"].record(ok, here, **extra)
    return fallback


def _random_pair_checks(t: Tally, rng: np.random.Generator, count: int, max_n: int,
                        tol: Tolerances, seed: int) -> None:
    for i in range(count):
        n = int(rng.integers(1, max_n + 1))
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        rec = norms.check_mathias(A, B, tol, seed, strict=False)
        ok = rec.passed
        for M in (A, B):
            ok = ok and norms.check_zielke(M, tol, seed, strict=False).passed
        t.record(ok, {"random_pair": i, "n": n})


def grid_ratios(grid: VerifyGrid, rng: np.random.Generator) -> list[GaussianRational]:
    rs = [parse_gaussian(s) for s in grid.r]
    for m in grid.random_phase_moduli:
        theta = float(rng.uniform(-math.pi, math.pi))
        rs.append(GaussianRational.from_complex(cmath.rect(m, theta)))
    return rs


def run_verify(grid: VerifyGrid | None = None, seed: int = norms.DEFAULT_SEED,
               tol: Tolerances = DEFAULT_TOL, break_sign: bool = False) -> dict:
    """Run every check over the grid; returns a JSON-ready report."""
    grid = grid or VerifyGrid()
    rng = np.random.default_rng(seed)
    rs = grid_ratios(grid, rng)
    if any(r.is_zero() for r in rs):
        raise ValueError("grid contains r = 0")
    tallies = {name: Tally() for name in IDENTITIES}
    ns = sorted(set(grid.n))
    fallbacks = 0

    for a, b in itertools.product(grid.a, grid.b):
        _q_p_checks(tallies, a, b, ns)
    for a, b, w0, w1 in itertools.product(grid.a, grid.b, grid.w0, grid.w1):
        p = SeqParams(a, b, w0, w1)
        _sequence_checks(tallies, p, ns)
        for n in ns:
            for rg in rs:
                fallbacks += _point_checks(tallies, p, n, rg, tol, seed, break_sign)
    mathias_random = Tally()
    _random_pair_checks(mathias_random, rng, grid.random_pairs, grid.random_pair_max_n, tol, seed)
    tallies["mathias"].checked += mathias_random.checked
    tallies["mathias"].passed += mathias_random.passed
    if tallies["mathias"].first_failure is None:
        tallies["mathias"].first_failure = mathias_random.first_failure

    failures = sum(t.failed for t in tallies.values())
    first = next((dict(identity=k, **t.first_failure) for k, t in tallies.items()
                  if t.first_failure is not None), None)
    return {
        "seed": seed,
        "self_test_break": break_sign,
        "grid": grid.to_json(),
        "identities": {k: t.to_json() for k, t in tallies.items()},
        "degenerate_fallbacks": fallbacks,
        "total_failures": failures,
        "first_failure": first,
        "status": "pass" if failures == 0 else "fail",
    }
