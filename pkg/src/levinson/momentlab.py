"""Desk-scale numerical check of the mollified second moment.

The integrand ``|V psi(sigma0 + it)|^2`` is sampled on composite
Gauss-Legendre panels. Per panel, ``V`` is the Euler-Maclaurin Dirichlet
sum with coefficients ``n^{-sigma0} Q(log n / L)`` (the operator
``Q(-(1/L) d/ds)`` acting termwise) plus the differentiated boundary
terms, and ``psi`` is the length-``M`` mollifier; both Dirichlet sums go
through the same compiled panel kernel.
"""
from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .mainterm import main_term_closed
from .polyalg import MainTermParams, Polynomial
from .quadrature import panel_rule
from .zetakernel import MollifierSpec, ZetaContext, em_tail_jets

logger = logging.getLogger(__name__)

__all__ = [
    "WindowSpec",
    "MomentRunConfig",
    "MomentReport",
    "StepWarning",
    "smooth_ramp",
    "window_build",
    "window_admissibility",
    "w_hat_zero",
    "smoothed_moment",
    "sharp_moment",
    "sharp_integral",
    "integrand_on_grid",
    "run_moment",
]

T_MAX_DESK = 2e5
PANEL_NODES = 16
STEP_TOLERANCE = 5e-3


class StepWarning(RuntimeWarning):
    """Halving the quadrature step changed the moment by more than 0.5%."""


def smooth_ramp(x):
    """C-infinity step: 0 for ``x <= 0``, 1 for ``x >= 1``."""
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, 1e-300, 1.0 - 1e-16)
    a = np.where(x > 0, np.exp(-1.0 / xc), 0.0)
    b = np.where(x < 1, np.exp(-1.0 / (1.0 - xc)), 0.0)
    out = a / (a + b)
    return np.where(x <= 0, 0.0, np.where(x >= 1, 1.0, out))


_KINDS = ("upper-majorant", "lower-minorant", "centered-bump")


@dataclass(frozen=True)
class WindowSpec:
    """Smooth window rising over ``delta`` at each end of ``support``.

    The plateau (where ``w = 1``) is ``support`` shrunk by ``delta`` on both
    sides. Default supports: the majorant of ``[T/2, T]`` lives on
    ``[T/2 - delta, T + delta]``, the minorant on ``[T/2, T]``, and the
    centered bump has a plateau of length ``T/2`` centred on ``T``.
    """

    T: float
    delta: float | None = None
    support: tuple[float, float] | None = None
    kind: str = "upper-majorant"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown window kind {self.kind!r}")
        if not self.T > 1:
            raise ValueError("T must exceed 1")
        d = self.T / math.log(self.T) if self.delta is None else float(self.delta)
        if not d > 0:
            raise ValueError("delta must be positive")
        object.__setattr__(self, "delta", d)
        if self.support is None:
            T = self.T
            sup = {
                "upper-majorant": (T / 2 - d, T + d),
                "lower-minorant": (T / 2, T),
                "centered-bump": (3 * T / 4 - d, 5 * T / 4 + d),
            }[self.kind]
            object.__setattr__(self, "support", sup)
        a, b = self.support
        if a < self.T / 4 - 1e-9 * self.T or b > 2 * self.T + 1e-9 * self.T:
            raise ValueError("window support must lie inside [T/4, 2T]")
        if b - a < 2 * d:
            raise ValueError("support shorter than two transition widths")

    @property
    def plateau(self) -> tuple[float, float]:
        a, b = self.support
        return a + self.delta, b - self.delta


def window_build(spec: WindowSpec):
    """Return the weight ``w(t)`` described by ``spec`` (vectorised callable)."""
    a, b = spec.support
    d = spec.delta

    def w(t):
        t = np.asarray(t, dtype=float)
        return smooth_ramp((t - a) / d) * smooth_ramp((b - t) / d)

    return w


def window_admissibility(spec: WindowSpec, orders: int = 4, grid: int = 40001) -> dict:
    """Check range, support and derivative bounds of the window numerically.

    Returns ``{"range_ok", "support_ok", "C": [C_0, ..., C_orders]}`` where
    ``C_j`` is the measured ``max |w^{(j)}| * delta**j``. Each transition
    is a rescaled ramp, so the constants are those of the ramp itself.
    """
    w = window_build(spec)
    a, b = spec.support
    t = np.linspace(a - spec.delta, b + spec.delta, grid)
    vals = w(t)
    range_ok = bool(np.all((vals >= 0) & (vals <= 1)))
    outside = (t < a) | (t > b)
    support_ok = bool(np.all(vals[outside] == 0.0))
    x = np.linspace(-0.05, 1.05, grid)
    h = x[1] - x[0]
    f = smooth_ramp(x)
    C = [float(np.max(np.abs(f)))]
    for _ in range(orders):
        f = np.gradient(f, h, edge_order=2)
        C.append(float(np.max(np.abs(f))))
    return {"range_ok": range_ok, "support_ok": support_ok, "C": C}


def w_hat_zero(spec: WindowSpec, panels_per_ramp: int = 16) -> float:
    """``int w(t) dt`` by composite Gauss-Legendre on each transition."""
    a, b = spec.support
    d = spec.delta
    w = window_build(spec)
    lo, hi = spec.plateau
    total = hi - lo
    for (u, v) in ((a, lo), (hi, b)):
        starts, _, offsets, weights = panel_rule(u, v, panels_per_ramp, PANEL_NODES)
        t = starts[:, None] + offsets[None, :]
        total += float(np.sum(w(t) @ weights))
    return total


@dataclass(frozen=True)
class MomentRunConfig:
    """Parameters of one moment experiment.

    ``quad_step`` is the mean node spacing; panels hold 16 nodes, so a
    panel is ``16 * quad_step`` wide. ``M = round(T**theta)``.
    """

    T: float
    theta: float = 0.5
    R: float = 1.3
    P: Polynomial = field(default_factory=lambda: Polynomial([0.0, 1.0]))
    Q: Polynomial = field(default_factory=lambda: Polynomial([1.0, -1.0]))
    window: WindowSpec | None = None
    quad_step: float = 0.125
    ctx: ZetaContext = field(default_factory=lambda: ZetaContext(em_order=12, height_factor=2.0))
    M_override: int | None = None

    def __post_init__(self):
        if not 1 < self.T <= T_MAX_DESK:
            raise ValueError(f"T must lie in (1, {T_MAX_DESK:g}] (desk-scale guard)")
        if not self.quad_step > 0:
            raise ValueError("quad_step must be positive")
        if self.M < 2:
            raise ValueError("mollifier length M = round(T^theta) must be at least 2")
        if not 0 < self.sigma0 < 0.5:
            raise ValueError(f"sigma0 = {self.sigma0:g} outside (0, 1/2)")
        if abs(self.Q(0.0) - 1.0) > 1e-12:
            raise ValueError("Q(0) must be 1")

    @property
    def L(self) -> float:
        return math.log(self.T)

    @property
    def M(self) -> int:
        if self.M_override is not None:
            return int(self.M_override)
        return int(round(self.T**self.theta))

    @property
    def sigma0(self) -> float:
        return 0.5 - self.R / self.L

    @property
    def mollifier(self) -> MollifierSpec:
        return MollifierSpec(self.P, self.M, self.R, self.L)

    def main_term(self) -> float:
        return main_term_closed(MainTermParams(self.P, self.Q, self.R, self.theta, check=False)).c_value

    def halved(self) -> "MomentRunConfig":
        return MomentRunConfig(
            self.T, self.theta, self.R, self.P, self.Q, self.window,
            self.quad_step / 2, self.ctx, self.M_override,
        )


class _Integrand:
    """Evaluates ``|V psi|^2`` on composite panels for one configuration."""

    def __init__(self, config: MomentRunConfig):
        self.config = config

    @cached_property
    def _v_coef(self):
        c = self.config
        return c.Q(self._logn / c.L) * np.exp(-c.sigma0 * self._logn)

    @cached_property
    def _logn(self):
        N = self.config.ctx.terms_for(2 * self.config.T + 64)
        return np.log(np.arange(1, N + 1, dtype=float))

    def _phases(self, logn, offsets):
        E = np.exp(-1j * np.outer(logn, offsets))
        return np.ascontiguousarray(E.real), np.ascontiguousarray(E.imag)

    def values(self, a: float, b: float):
        """Nodes, weights and integrand values on ``[a, b]``; shapes ``(panels, 16)``."""
        c = self.config
        width = PANEL_NODES * c.quad_step
        n_panels = max(1, math.ceil((b - a) / width))
        starts, width, offsets, weights = panel_rule(a, b, n_panels, PANEL_NODES)
        t = starts[:, None] + offsets[None, :]
        ends = starts + width
        ncut = np.array([c.ctx.terms_for(e) for e in ends], dtype=np.int64)
        nmax = int(ncut.max())
        if nmax > self._logn.size:
            raise ValueError("interval exceeds the precomputed Dirichlet length")
        # Dirichlet part runs over n < N
        logn = self._logn[: nmax - 1]
        pr, pi = self._phases(logn, offsets)
        dirichlet = _kernels.panel_dirichlet_sums(
            starts, pr, pi, logn, np.ascontiguousarray(self._v_coef[: nmax - 1]), ncut - 1
        )
        s = c.sigma0 + 1j * t
        V = dirichlet + self._tail(s, ncut[:, None])
        moll = c.mollifier
        lh = moll.log_h
        hr, hi = self._phases(lh, offsets)
        psi = _kernels.panel_dirichlet_sums(
            starts, hr, hi, lh, np.ascontiguousarray(moll.coefficients * np.exp(-0.5 * lh)),
            np.full(n_panels, moll.M, dtype=np.int64),
        )
        return t, weights, np.abs(V * psi) ** 2

    def _tail(self, s, N):
        c = self.config
        J = c.Q.degree
        jets = em_tail_jets(s, N, c.ctx.em_order, J)
        q = np.array(c.Q.coeffs)
        out = np.zeros(s.shape, dtype=complex)
        for j in range(J + 1):
            out += q[j] * (-1.0 / c.L) ** j * math.factorial(j) * jets[j]
        return out


def integrand_on_grid(config: MomentRunConfig, a: float, b: float):
    """``(t, weights, |V psi(sigma0 + it)|^2)`` on the composite rule over ``[a, b]``."""
    return _Integrand(config).values(a, b)


def _integrate(config: MomentRunConfig, a: float, b: float, weight=None, per_panel=False):
    t, wq, f = _Integrand(config).values(a, b)
    if weight is not None:
        f = f * weight(t)
    panels = f @ wq
    total = math.fsum(panels)
    if per_panel:
        return total, t[:, 0], panels
    return total


def _step_check(value, config, fn):
    finer = fn(config.halved())
    change = abs(finer - value) / abs(finer) if finer else 0.0
    if change > STEP_TOLERANCE:
        warnings.warn(
            f"halving quad_step changed the moment by {100 * change:.3g}%", StepWarning, stacklevel=3
        )
    return change


def _window_spec(config: MomentRunConfig) -> WindowSpec:
    return config.window if config.window is not None else WindowSpec(config.T)


def smoothed_moment(config: MomentRunConfig, check: bool = False) -> float:
    """``int w(t) |V psi(sigma0 + it)|^2 dt`` over the window support."""
    spec = _window_spec(config)
    a, b = spec.support
    val = _integrate(config, a, b, window_build(spec))
    if check:
        _step_check(val, config, lambda c: smoothed_moment(c))
    return val


def sharp_integral(config: MomentRunConfig, a: float, b: float) -> float:
    """``int_a^b |V psi(sigma0 + it)|^2 dt`` without a window."""
    if not 1 <= a < b:
        raise ValueError("need 1 <= a < b")
    return _integrate(config, a, b)


def sharp_moment(config: MomentRunConfig, check: bool = False) -> float:
    """``(1/T) int_1^T |V psi(sigma0 + it)|^2 dt``."""
    val = sharp_integral(config, 1.0, config.T) / config.T
    if check:
        _step_check(val, config, lambda c: sharp_moment(c))
    return val


@dataclass(frozen=True)
class MomentReport:
    T: float
    M: int
    sigma0: float
    moment: float
    main_term: float
    ratio: float
    runtime_seconds: float
    mode: str
    step_change: float | None = None
    panels: tuple = ()


def run_moment(
    config: MomentRunConfig, mode: str = "sharp", check: bool = False, dump_panels: bool = False
) -> MomentReport:
    """Run one experiment and compare with the predicted main term.

    For ``mode="sharp"`` the prediction is ``c``; for ``"smoothed"`` it is
    ``c * w_hat(0)``.
    """
    if mode not in ("sharp", "smoothed"):
        raise ValueError("mode must be 'sharp' or 'smoothed'")
    start = time.perf_counter()
    c = config.main_term()
    if mode == "sharp":
        a, b, weight, scale, main = 1.0, config.T, None, 1.0 / config.T, c
        fn = sharp_moment
    else:
        spec = _window_spec(config)
        a, b = spec.support
        weight, scale = window_build(spec), 1.0
        main = c * w_hat_zero(spec)
        fn = smoothed_moment
    value, panel_t, panel_vals = _integrate(config, a, b, weight, per_panel=True)
    value *= scale
    change = _step_check(value, config, fn) if check else None
    elapsed = time.perf_counter() - start
    logger.info("moment %s T=%g: %.6g (main %.6g) in %.1fs", mode, config.T, value, main, elapsed)
    panels = tuple(zip(panel_t.tolist(), (panel_vals * scale).tolist())) if dump_panels else ()
    return MomentReport(
        config.T, config.M, config.sigma0, value, main, value / main, elapsed, mode, change, panels
    )
