"""r-circulant matrices with generalized bi-periodic Fibonacci entries: norms,
bounds, eigenvalues and determinants, each cross-checked against an oracle."""
from .circulant import RCirculant, build_Wr, circ, densify, factor_U, factor_W, hadamard, scaled_first_row
from .norms import (
    Regime,
    SpecialCase,
    analyze_norms,
    delta,
    frobenius,
    frobenius_closed_sq,
    spectral_bounds,
    spectral_norm,
    special_case_bounds,
)
from .numeric import GaussianRational, Tolerances, parse_complex, parse_gaussian
from .sequences import SeqParams, binet_eval, generate, genfn_coeffs, sum_squares_from0, sum_squares_from1, zeta
from .spectral import analyze_det, analyze_eigen, det_closed, det_lu, eigenvalues_closed, eigenvalues_dft

__version__ = "0.1.0"
