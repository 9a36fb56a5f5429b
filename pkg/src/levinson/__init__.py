"""Mollified second-moment experiments for the Riemann zeta function.

The lightweight modules are imported eagerly. ``momentlab`` pulls in the
compiled kernel and is loaded on first attribute access.
"""
from __future__ import annotations

import importlib

from .afe import AfeShifts, ContourSpec, V_weight, afe_residual, afe_sides, arith_factor_check
from .mainterm import (
    MainTermResult,
    ShiftPair,
    c1_derivative_form,
    c1_integral_form,
    c_general,
    kappa_bound,
    main_term_closed,
    main_term_quadrature,
    q_operator_path,
)
from .optimizer import OptimizeResult, OptimizeSpec, optimize_alternating
from .polyalg import BivariatePolynomial, MainTermParams, Polynomial, exp_moments
from .zetakernel import MollifierSpec, ZetaContext, V_eval, mobius_sieve, psi_eval, zeta_derivative, zeta_em

__version__ = "0.1.0"

_LAZY = {
    "MomentRunConfig",
    "MomentReport",
    "WindowSpec",
    "run_moment",
    "sharp_moment",
    "smoothed_moment",
    "window_admissibility",
}


def __getattr__(name):
    if name in _LAZY:
        return getattr(importlib.import_module(".momentlab", __name__), name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "AfeShifts", "ContourSpec", "V_weight", "afe_residual", "afe_sides", "arith_factor_check",
    "MainTermResult", "ShiftPair", "c1_derivative_form", "c1_integral_form", "c_general",
    "kappa_bound", "main_term_closed", "main_term_quadrature", "q_operator_path",
    "OptimizeResult", "OptimizeSpec", "optimize_alternating",
    "BivariatePolynomial", "MainTermParams", "Polynomial", "exp_moments",
    "MollifierSpec", "ZetaContext", "V_eval", "mobius_sieve", "psi_eval", "zeta_derivative", "zeta_em",
    *sorted(_LAZY),
]
