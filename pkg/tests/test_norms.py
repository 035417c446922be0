import cmath
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bicirc import norms
from bicirc.circulant import build_Wr, circ, densify, factor_U, factor_W
from bicirc.numeric import (
    GaussianRational,
    IdentityFailed,
    InequalityViolated,
    NoConvergence,
    Tolerances,
    ZeroRatio,
)
from bicirc.norms import Regime, SpecialCase
from bicirc.sequences import SeqParams, generate

FIB = SeqParams(1, 1, 0, 1)
Q23 = SeqParams(2, 3, 0, 1)
P23 = SeqParams(2, 3, 2, 3)


def test_frobenius_examples():
    assert norms.frobenius([[0, 1], [1, 0]]) == pytest.approx(math.sqrt(2))
    assert norms.frobenius([[3, 4]]) == 5.0
    A = densify(circ(2, [0, math.sqrt(2 / 3), 2]))
    assert norms.frobenius(A) == pytest.approx(math.sqrt(40), rel=1e-15)


@pytest.mark.parametrize("params, n, r, expected", [
    (Q23, 3, GaussianRational(2), Fraction(40)),
    (FIB, 2, GaussianRational(1), Fraction(2)),
    (SeqParams(3, 2, 5, 1), 1, GaussianRational(Fraction(1, 3), 7), Fraction(25)),
])
def test_frobenius_closed_sq_examples(params, n, r, expected):
    assert norms.frobenius_closed_sq(params, n, r) == expected


def test_frobenius_closed_sq_rejects_zero():
    with pytest.raises(ZeroRatio):
        norms.frobenius_closed_sq(FIB, 3, GaussianRational(0))


def test_spectral_norm_examples():
    assert norms.spectral_norm([[0, 1], [1, 0]]) == pytest.approx(1.0, rel=1e-12)
    assert norms.spectral_norm(np.diag([3, -5])) == pytest.approx(5.0, rel=1e-12)
    assert norms.spectral_norm([[1, 1], [0, 1]]) == pytest.approx(math.sqrt((3 + math.sqrt(5)) / 2), rel=1e-12)
    assert norms.spectral_norm(np.zeros((3, 3))) == 0.0


def test_spectral_norm_deterministic_for_seed():
    A = np.random.default_rng(3).standard_normal((7, 7))
    assert norms.spectral_norm(A, seed=11) == norms.spectral_norm(A, seed=11)


def test_spectral_norm_no_convergence_reports_iterates():
    A = np.random.default_rng(5).standard_normal((6, 6))
    with pytest.raises(NoConvergence) as info:
        norms.spectral_norm(A, Tolerances(power_iter_max=1, power_iter_tol=1e-300))
    assert info.value.iterations == 1
    assert math.isfinite(info.value.last) and math.isfinite(info.value.previous)


def test_spectral_norm_handles_tied_top_singular_values():
    # singular values 5, 5, 5 - 1e-6: clustered top end
    rng = np.random.default_rng(0)
    Q1, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    Q2, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    A = Q1 @ np.diag([5, 5, 5 - 1e-6]) @ Q2
    assert norms.spectral_norm(A) == pytest.approx(5.0, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(0, 2 ** 32))
def test_spectral_norm_matches_svd(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    assert norms.spectral_norm(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-10)


def test_row_col_norm_examples():
    assert norms.r1_max_row(factor_U(3, 2)) == pytest.approx(3.0)
    assert norms.r1_max_row(factor_U(3, 0.5)) == pytest.approx(math.sqrt(3))
    for p, n in [(Q23, 5), (P23, 4), (SeqParams(3, 1, 2, 2), 6)]:
        d = norms.delta(p, n)
        assert norms.c1_max_col(factor_W(p, n)) == pytest.approx(math.sqrt(d / p.b), rel=1e-14)


@pytest.mark.parametrize("n, r", [(4, 3), (5, 0.5), (6, 2j), (1, 0.1)])
def test_r1_of_U_follows_regime(n, r):
    expected = math.sqrt((n - 1) * abs(r) ** 2 + 1) if abs(r) >= 1 else math.sqrt(n)
    assert norms.r1_max_row(factor_U(n, r)) == pytest.approx(expected, rel=1e-14)


def test_zielke_examples():
    rec = norms.check_zielke(np.eye(3))
    assert rec.passed and rec.detail["lower"] == pytest.approx(0.0, abs=1e-12)
    n = 4
    rec = norms.check_zielke(np.ones((n, n)))
    assert rec.passed and rec.detail["upper"] == pytest.approx(0.0, abs=1e-9)
    assert norms.check_zielke(densify(build_Wr(Q23, 4, 2))).passed


def test_zielke_strict_raises_on_violation(monkeypatch):
    monkeypatch.setattr(norms, "spectral_norm", lambda *a, **k: 100.0)
    with pytest.raises(InequalityViolated):
        norms.check_zielke(np.eye(3))
    assert not norms.check_zielke(np.eye(3), strict=False).passed


def test_mathias_examples():
    assert norms.check_mathias(np.eye(3), np.eye(3)).passed
    U, W = factor_U(3, 2), factor_W(FIB, 3)
    assert norms.delta(FIB, 3) == 2
    rec = norms.check_mathias(U, W)
    assert rec.passed
    spec = norms.spectral_norm(densify(build_Wr(FIB, 3, 2)))
    assert spec <= 3 * math.sqrt(2) + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 32))
def test_mathias_random_complex_pairs(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    assert norms.check_mathias(A, B).passed


@pytest.mark.parametrize("params, n, expected", [
    (Q23, 3, 14),
    (P23, 2, 30),
])
def test_delta_examples(params, n, expected):
    assert norms.delta(params, n) == expected


@pytest.mark.parametrize("n", range(1, 12))
def test_delta_fibonacci(n):
    F = generate(FIB, n)
    assert norms.delta(FIB, n) == F[n - 1] * F[n]


def test_delta_checks_row_sum(monkeypatch):
    monkeypatch.setattr(norms, "sum_squares_from0", lambda p, n: Fraction(-1))
    with pytest.raises(IdentityFailed):
        norms.delta(Q23, 3)


def test_spectral_bounds_examples():
    b = norms.spectral_bounds(FIB, 3, 2)
    assert (b.lower, b.upper, b.regime) == (pytest.approx(math.sqrt(2)), pytest.approx(math.sqrt(18)), Regime.R_GE_1)
    b = norms.spectral_bounds(FIB, 3, 0.5)
    assert (b.lower, b.upper, b.regime) == (pytest.approx(math.sqrt(2) / 2), pytest.approx(math.sqrt(6)), Regime.R_LT_1)
    for w0 in range(4):
        b = norms.spectral_bounds(SeqParams(2, 3, w0, 2), 1, 1)
        assert b.lower == pytest.approx(w0) and b.upper == pytest.approx(w0)
    with pytest.raises(ZeroRatio):
        norms.spectral_bounds(FIB, 3, 0)


def test_regime_boundary():
    assert norms.spectral_bounds(FIB, 3, 1).regime is Regime.R_GE_1
    assert norms.spectral_bounds(FIB, 3, -1j).regime is Regime.R_GE_1
    assert norms.spectral_bounds(FIB, 3, 0.999).regime is Regime.R_LT_1


def test_upper_bound_monotone_in_modulus():
    for p, n in [(FIB, 5), (P23, 7), (SeqParams(4, 1, 3, 2), 3)]:
        uppers = [norms.spectral_bounds(p, n, m).upper for m in np.linspace(1, 10, 40)]
        assert all(u2 >= u1 for u1, u2 in zip(uppers, uppers[1:]))


def test_special_case_examples():
    b = norms.special_case_bounds(SpecialCase.BI_FIBONACCI, SeqParams(2, 3), 3, 2)
    assert b.lower == pytest.approx(math.sqrt(14 / 3)) and b.upper == pytest.approx(math.sqrt(42))
    b = norms.special_case_bounds(SpecialCase.BI_LUCAS, SeqParams(2, 3), 3, 2)
    assert b.lower == pytest.approx(math.sqrt(74))
    b = norms.special_case_bounds(SpecialCase.CLASSICAL_GENERALIZED, SeqParams(1, 1, 1, 1), 3, 1)
    assert b.lower == pytest.approx(math.sqrt(6))
    assert norms.delta(SeqParams(1, 1, 1, 1), 3) == 6


def test_special_cases_equal_general_bound_exactly():
    for a, b, w0, w1 in itertools.product(range(1, 5), range(1, 5), range(0, 3), range(1, 3)):
        p = SeqParams(a, b, w0, w1)
        for n in range(1, 10):
            for r in (0.25, 1, 3, 0.5j, -2 + 1j):
                for kind in SpecialCase:
                    assert (norms.special_case_bounds(kind, p, n, r)
                            == norms.spectral_bounds(norms.special_case_params(kind, p), n, r))


def test_sandwich_sampled_grid():
    rng = np.random.default_rng(7)
    for a, b, w0, w1 in itertools.product(range(1, 5), (1, 4), (0, 3), (1, 3)):
        p = SeqParams(a, b, w0, w1)
        for n in range(1, 13):
            for m in (0.25, 0.5, 1, 2, 4):
                r = cmath.rect(m, rng.uniform(-math.pi, math.pi))
                bnd = norms.spectral_bounds(p, n, r)
                s = norms.spectral_norm(densify(build_Wr(p, n, r)))
                slack = 1e-8 * max(1, bnd.upper)
                assert bnd.lower - slack <= s <= bnd.upper + slack


def test_hadamard_bound_report():
    hb = norms.hadamard_bound(Q23, 4, 3)
    assert hb.product == hb.r1_U * hb.c1_W
    assert hb.spectral_of_product_matrix <= hb.product + 1e-9


def test_analyze_norms_all_checks_pass():
    rep = norms.analyze_norms(P23, 6, GaussianRational(Fraction(3, 4), Fraction(1, 4)))
    assert rep.passed, rep.checks
    assert rep.regime is Regime.R_LT_1
    assert rep.lower_bound <= rep.spectral_numeric <= rep.upper_bound
    assert {c.name for c in rep.checks} >= {"frobenius_exact", "sandwich_lower", "sandwich_upper", "zielke"}
