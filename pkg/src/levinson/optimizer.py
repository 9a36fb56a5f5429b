"""Mollifier optimisation by alternating equality-constrained quadratic programs.

With ``Q`` fixed, the inner derivative ``g(u, v)`` is linear in the
coefficients of ``P``, so ``c = 1 + p^T A p`` with ``A`` the Gram matrix of
the basis functions under the weight ``e^{2Rv} / theta``; the constraints
``P(0) = 0, P(1) = 1`` are linear. The same holds for ``Q`` with ``P``
fixed under ``Q(0) = 1``. Each subproblem is solved exactly through its KKT
system, and an outer one-dimensional search picks ``R``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .mainterm import kappa_bound, main_term_closed
from .polyalg import (
    BivariatePolynomial,
    MainTermParams,
    Polynomial,
    bipoly_integrate_unit_square_weighted,
)

logger = logging.getLogger(__name__)

__all__ = [
    "OptimizeSpec",
    "OptimizeResult",
    "QPSolution",
    "quadratic_form_P",
    "quadratic_form_Q",
    "solve_constrained_qp",
    "optimize_P_given_Q",
    "optimize_Q_given_P",
    "alternate",
    "optimize_alternating",
]


@dataclass(frozen=True)
class OptimizeSpec:
    degP: int = 1
    degQ: int = 1
    theta: float = 0.5
    R_range: tuple[float, float] = (0.5, 3.0)
    max_alt_iters: int = 50
    tol: float = 1e-12
    grid_points: int = 200
    symmetric_Q: bool = False

    def __post_init__(self):
        lo, hi = self.R_range
        if self.degP < 1 or self.degQ < 0:
            raise ValueError("need degP >= 1 and degQ >= 0")
        if not 0 < self.theta <= 0.5:
            raise ValueError("theta must lie in (0, 1/2]")
        if not 0 < lo <= hi:
            raise ValueError("R_range must be a positive interval")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_alt_iters < 1:
            raise ValueError("max_alt_iters must be at least 1")


@dataclass(frozen=True)
class OptimizeResult:
    P_opt: Polynomial
    Q_opt: Polynomial
    R_opt: float
    c_opt: float
    kappa_opt: float
    iterations: int
    converged: bool
    c_trace: tuple[float, ...] = ()
    R_trace: tuple[tuple[float, float, float], ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class QPSolution:
    x: np.ndarray
    residual: float
    degenerate: bool


def _gram(basis: list[BivariatePolynomial], R: float, theta: float) -> np.ndarray:
    n = len(basis)
    A = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            A[i, j] = A[j, i] = bipoly_integrate_unit_square_weighted(basis[i] * basis[j], R) / theta
    return A


def quadratic_form_P(Q: Polynomial, R: float, theta: float, degP: int) -> np.ndarray:
    """Matrix ``A`` with ``c(P) = 1 + p^T A p`` for fixed ``Q``."""
    dQ = Q.derivative()
    basis = []
    for j in range(degP + 1):
        mono = Polynomial([0.0] * j + [1.0])
        d_mono = mono.derivative()
        phi = BivariatePolynomial.outer(mono * (R * theta) + d_mono, Q)
        phi = phi + BivariatePolynomial.outer(mono * theta, dQ)
        basis.append(phi)
    return _gram(basis, R, theta)


def quadratic_form_Q(P: Polynomial, R: float, theta: float, degQ: int) -> np.ndarray:
    """Matrix ``B`` with ``c(Q) = 1 + q^T B q`` for fixed ``P``."""
    lead = P * (R * theta) + P.derivative()
    basis = []
    for k in range(degQ + 1):
        mono = Polynomial([0.0] * k + [1.0])
        phi = BivariatePolynomial.outer(lead, mono)
        phi = phi + BivariatePolynomial.outer(P * theta, mono.derivative())
        basis.append(phi)
    return _gram(basis, R, theta)


def solve_constrained_qp(A: np.ndarray, C: np.ndarray, d: np.ndarray) -> QPSolution:
    """Minimise ``x^T A x`` subject to ``C x = d`` via the KKT system.

    A singular KKT matrix falls back to the minimum-norm least-squares
    solution and is reported as degenerate.
    """
    n, m = A.shape[0], C.shape[0]
    K = np.zeros((n + m, n + m))
    K[:n, :n] = 2.0 * A
    K[:n, n:] = C.T
    K[n:, :n] = C
    rhs = np.concatenate([np.zeros(n), d])
    degenerate = False
    try:
        if np.linalg.cond(K) > 1e14:
            raise np.linalg.LinAlgError("ill-conditioned KKT system")
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        degenerate = True
        sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    x = sol[:n]
    residual = float(np.max(np.abs(C @ x - d))) if m else 0.0
    return QPSolution(x, residual, degenerate)


def _polish(x: np.ndarray, C: np.ndarray, d: np.ndarray) -> np.ndarray:
    # one projection step removes the rounding left by the KKT solve
    r = C @ x - d
    return x - C.T @ np.linalg.solve(C @ C.T, r)


def optimize_P_given_Q(Q: Polynomial, R: float, theta: float, degP: int) -> Polynomial:
    if degP < 1:
        raise ValueError("degP must be at least 1")
    A = quadratic_form_P(Q, R, theta, degP)
    C = np.zeros((2, degP + 1))
    C[0, 0] = 1.0
    C[1, :] = 1.0
    d = np.array([0.0, 1.0])
    sol = solve_constrained_qp(A, C, d)
    if sol.degenerate:
        logger.warning("degenerate P subproblem at R=%g; using minimum-norm solution", R)
    x = _polish(sol.x, C, d)
    x[0] = 0.0
    return Polynomial(x)


def _symmetry_rows(degQ: int) -> np.ndarray:
    """Independent linear conditions expressing ``Q'(x) = Q'(1 - x)``."""
    n = max(degQ, 1)
    M = np.zeros((n, degQ + 1))
    one_minus_x = Polynomial([1.0, -1.0])
    for k in range(1, degQ + 1):
        refl = Polynomial([float(k)])
        for _ in range(k - 1):
            refl = refl * one_minus_x
        dc = (Polynomial([0.0] * (k - 1) + [float(k)]) - refl).coeffs
        M[: len(dc), k] = dc
    _, sv, vt = np.linalg.svd(M)
    rank = int(np.sum(sv > 1e-10))
    return vt[:rank]


def optimize_Q_given_P(
    P: Polynomial, R: float, theta: float, degQ: int, symmetric: bool = False
) -> Polynomial:
    """Minimise ``c`` over ``Q`` of degree ``degQ`` with ``Q(0) = 1``.

    ``symmetric=True`` adds ``Q'(x) = Q'(1 - x)``. The kappa bound derived
    from the main term is only meaningful for such ``Q``; below degree 2 the
    condition holds automatically.
    """
    if degQ < 0:
        raise ValueError("degQ must be non-negative")
    if degQ == 0:
        return Polynomial([1.0])
    B = quadratic_form_Q(P, R, theta, degQ)
    C = np.zeros((1, degQ + 1))
    C[0, 0] = 1.0
    d = np.array([1.0])
    if symmetric:
        S = _symmetry_rows(degQ)
        C = np.vstack([C, S])
        d = np.concatenate([d, np.zeros(S.shape[0])])
    sol = solve_constrained_qp(B, C, d)
    if sol.degenerate:
        logger.warning("degenerate Q subproblem at R=%g; using minimum-norm solution", R)
    x = _polish(sol.x, C, d)
    x[0] = 1.0
    return Polynomial(x)


def _c(P, Q, R, theta) -> float:
    return main_term_closed(MainTermParams(P, Q, R, theta, check=False)).c_value


def _start(degP: int, degQ: int) -> tuple[Polynomial, Polynomial]:
    P = Polynomial([0.0, 1.0])
    Q = Polynomial([1.0, -1.0]) if degQ >= 1 else Polynomial([1.0])
    return P, Q


def alternate(spec: OptimizeSpec, R: float, P0=None, Q0=None):
    """Coordinate descent at fixed ``R``; returns ``(P, Q, c_trace, converged)``.

    Starts from the classical pair ``P = x, Q = 1 - x`` unless told otherwise.
    """
    P, Q = _start(spec.degP, spec.degQ)
    P = P0 if P0 is not None else P
    Q = Q0 if Q0 is not None else Q
    trace = [_c(P, Q, R, spec.theta)]
    converged = False
    for _ in range(spec.max_alt_iters):
        P = optimize_P_given_Q(Q, R, spec.theta, spec.degP)
        Q = optimize_Q_given_P(P, R, spec.theta, spec.degQ, spec.symmetric_Q)
        trace.append(_c(P, Q, R, spec.theta))
        if abs(trace[-2] - trace[-1]) < spec.tol:
            converged = True
            break
    return P, Q, trace, converged


def _kappa_at(spec: OptimizeSpec, R: float):
    P, Q, trace, conv = alternate(spec, R)
    return kappa_bound(R, trace[-1]), (P, Q, trace, conv)


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def optimize_alternating(spec: OptimizeSpec) -> OptimizeResult:
    """Maximise the kappa bound over ``P``, ``Q`` and ``R`` in ``spec.R_range``.

    A dense grid over ``R`` locates the best bracket (guarding against
    non-unimodality), then golden-section search refines inside it.
    """
    lo, hi = spec.R_range
    evaluated: dict[float, tuple] = {}

    def kap(R):
        if R not in evaluated:
            evaluated[R] = _kappa_at(spec, R)
        return evaluated[R][0]

    if lo == hi:
        best_R = lo
        kap(lo)
    else:
        grid = np.linspace(lo, hi, max(spec.grid_points, 3))
        vals = [kap(float(r)) for r in grid]
        i = int(np.argmax(vals))
        a = float(grid[max(i - 1, 0)])
        b = float(grid[min(i + 1, len(grid) - 1)])
        x1 = b - _INV_PHI * (b - a)
        x2 = a + _INV_PHI * (b - a)
        f1, f2 = kap(x1), kap(x2)
        while b - a > 1e-8:
            if f1 >= f2:
                b, x2, f2 = x2, x1, f1
                x1 = b - _INV_PHI * (b - a)
                f1 = kap(x1)
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + _INV_PHI * (b - a)
                f2 = kap(x2)
        best_R = max(evaluated, key=lambda r: evaluated[r][0])

    k_best, (P, Q, trace, conv) = evaluated[best_R]
    R_trace = tuple(
        (r, evaluated[r][1][2][-1], evaluated[r][0]) for r in sorted(evaluated)
    )
    return OptimizeResult(
        P_opt=P,
        Q_opt=Q,
        R_opt=best_R,
        c_opt=trace[-1],
        kappa_opt=k_best,
        iterations=len(trace) - 1,
        converged=conv,
        c_trace=tuple(trace),
        R_trace=R_trace,
    )
