"""Command-line entry point: ``levinson <subcommand> [flags]``.

Every subcommand writes a CSV (header first, floats in round-trip
precision) to ``--output``, to ``$LEVINSON_OUTPUT_DIR/<subcommand>.csv``
when that variable is set, or to stdout. Parameters may also come from a
flat ``key = value`` file given with ``--config``; flags win over the file.

Exit codes: 0 success, 1 acceptance failure (``reproduce``), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .polyalg import MainTermParams, Polynomial

OUTPUT_ENV = "LEVINSON_OUTPUT_DIR"

C_BRACKET = (2.34, 2.36)
KAPPA_BRACKET = (0.340, 0.346)
IDENTITY_TOL = 1e-9


class UsageError(Exception):
    """Malformed or inconsistent parameters."""


def _poly(text: str) -> Polynomial:
    try:
        return Polynomial.from_string(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float(text) -> float:
    return float(text)


def _int(text) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


# key -> (converter, default, help)
Schema = dict[str, tuple[Callable[[Any], Any], Any, str]]

_PQ: Schema = {
    "P": (_poly, "0,1", "P coefficients, lowest degree first"),
    "Q": (_poly, "1,-1", "Q coefficients, lowest degree first"),
    "R": (_float, 1.3, "shift R in sigma0 = 1/2 - R/L"),
    "theta": (_float, 0.5, "mollifier length exponent"),
}

SCHEMAS: dict[str, Schema] = {
    "mainterm": {**_PQ, "nodes": (_int, 64, "Gauss-Legendre nodes per axis for the quadrature oracle")},
    "optimize": {
        "degP": (_int, 1, "degree of P"),
        "degQ": (_int, 1, "degree of Q"),
        "theta": (_float, 0.5, "mollifier length exponent"),
        "R_min": (_float, 0.5, "lower end of the R search interval"),
        "R_max": (_float, 3.0, "upper end of the R search interval"),
        "tol": (_float, 1e-12, "stop when c changes by less than this"),
        "max_iters": (_int, 50, "maximum alternating iterations"),
        "grid_points": (_int, 200, "R grid size before golden-section refinement"),
        "symmetric_Q": (_bool, False, "also impose Q'(x) = Q'(1-x)"),
    },
    "moment": {
        **_PQ,
        "T": (_float, 1e4, "height T"),
        "window": (str, "upper-majorant", "upper-majorant | lower-minorant | centered-bump"),
        "step": (_float, 0.125, "mean t-node spacing (panels of 16 nodes)"),
        "mode": (str, "sharp", "sharp | smoothed"),
        "check_step": (_bool, False, "rerun with half the step and report the change"),
        "dump_panels": (str, "", "optional CSV path for per-panel contributions"),
    },
    "verify-afe": {
        "t": (_float, 100.0, "height t"),
        "alpha": (complex, 0.01, "shift alpha"),
        "beta": (complex, 0.01, "shift beta"),
        "truncation": (_int, 100000, "sum over mn <= truncation"),
    },
    "verify-arith": {
        "cap": (_int, 10000, "largest common value N = hm = kn"),
        "s_re": (_float, 0.5, "real s > 0"),
    },
    "reproduce": {
        "check_identities": (_bool, False, "run the randomised identity suites"),
        "json": (_bool, False, "emit a JSON report instead of text"),
    },
}

_COMMON = ("config", "output", "seed", "threads")


@dataclass
class RunConfig:
    subcommand: str
    parameters: dict[str, Any]
    output_path: str | None = None
    seed: int = 0
    threads: int | None = None
    warnings: list[str] = field(default_factory=list)


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="levinson", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, schema in SCHEMAS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key = value parameter file")
        p.add_argument("--output", default=None, help="CSV output path")
        p.add_argument("--seed", default=None, help="seed for randomised checks")
        p.add_argument("--threads", default=None, help="cap on worker threads")
        for key, (conv, default, help_) in schema.items():
            flag = "--" + key.replace("_", "-")
            if key in ("P", "Q", "R", "T"):
                flag = "--" + key
            extra = {"nargs": "?", "const": "true"} if conv is _bool else {}
            p.add_argument(flag, dest=key, default=None, help=f"{help_} (default {default})", **extra)
    return parser


def parse_config(argv: list[str], file: str | None = None) -> RunConfig:
    """Turn command-line flags (and an optional parameter file) into a RunConfig."""
    args = _build_parser().parse_args(argv)
    flags = vars(args)
    name = flags.pop("subcommand")
    schema = SCHEMAS[name]
    file = flags.get("config") or file
    from_file = read_config_file(file) if file else {}
    for key in from_file:
        if key not in schema and key not in _COMMON:
            raise UsageError(f"unknown key {key!r} for subcommand {name!r}")
    params: dict[str, Any] = {}
    for key, (conv, default, _) in schema.items():
        raw = flags.get(key)
        if raw is None:
            raw = from_file.get(key, default)
        try:
            params[key] = conv(raw)
        except (ValueError, TypeError) as exc:
            raise UsageError(f"bad value for {key!r}: {exc}") from None
        except UsageError as exc:
            raise UsageError(f"bad value for {key!r}: {exc}") from None

    def common(key, conv):
        raw = flags.get(key)
        if raw is None:
            raw = from_file.get(key)
        if raw is None:
            return None
        try:
            return conv(raw)
        except ValueError:
            raise UsageError(f"bad value for {key!r}: {raw!r}") from None

    cfg = RunConfig(
        subcommand=name,
        parameters=params,
        output_path=common("output", str),
        seed=common("seed", _int) or 0,
        threads=common("threads", _int),
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    p = cfg.parameters
    if "P" in p:
        P, Q = p["P"], p["Q"]
        if abs(P(0.0)) > 1e-12:
            raise UsageError(f"key 'P': P(0) = {P(0.0)!r}, must be 0")
        if abs(P(1.0) - 1.0) > 1e-12:
            raise UsageError(f"key 'P': P(1) = {P(1.0)!r}, must be 1")
        if abs(Q(0.0) - 1.0) > 1e-12:
            raise UsageError(f"key 'Q': Q(0) = {Q(0.0)!r}, must be 1")
    if "theta" in p and not 0 < p["theta"] <= 0.5:
        raise UsageError("key 'theta': must lie in (0, 1/2]")
    if cfg.subcommand in ("mainterm", "moment") and not p["R"] > 0:
        raise UsageError("key 'R': must be positive")
    if cfg.subcommand == "moment":
        if p["mode"] not in ("sharp", "smoothed"):
            raise UsageError("key 'mode': must be 'sharp' or 'smoothed'")
        if p["window"] not in ("upper-majorant", "lower-minorant", "centered-bump"):
            raise UsageError(f"key 'window': unknown kind {p['window']!r}")
        if not 1 < p["T"] <= 2e5:
            raise UsageError("key 'T': must lie in (1, 2e5]")
        p["M"] = int(round(p["T"] ** p["theta"]))
        if p["M"] < 2:
            raise UsageError("key 'T': mollifier length round(T^theta) must be at least 2")
    if cfg.subcommand == "optimize" and not 0 < p["R_min"] <= p["R_max"]:
        raise UsageError("keys 'R_min'/'R_max': need 0 < R_min <= R_max")
    if cfg.subcommand == "verify-arith" and not p["s_re"] > 0:
        raise UsageError("key 's_re': must be positive")
    if cfg.subcommand == "verify-afe" and p["truncation"] < 1:
        raise UsageError("key 'truncation': must be at least 1")
    if "theta" in p and p["theta"] == 0.5:
        cfg.warnings.append("theta = 1/2 is the boundary of the admissible range (0, 1/2)")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, Polynomial):
        return x.to_string()
    if isinstance(x, complex):
        return repr(x)
    return str(x)


def _csv(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------- subcommands


def identity_residuals(P: Polynomial, Q: Polynomial, R: float, theta: float, logT: float = 20.0) -> dict:
    """Residuals of the closed-form cross-checks for one parameter set."""
    from .mainterm import (
        ShiftPair, c1_derivative_form, c1_integral_form, c_general,
        exp_moment_identity, main_term_closed, main_term_quadrature, q_operator_path,
    )

    params = MainTermParams(P, Q, R, theta)
    closed = main_term_closed(params).c_value
    sh = ShiftPair.from_theta(0.7 / logT, -0.3 / logT + 0.2j / logT, logT, theta)
    c1 = c1_integral_form(sh, P)
    c1m = c1_integral_form(sh.mirrored(), P)
    lhs, rhs = exp_moment_identity(sh)
    recon = (c1 + c1m) + (np.exp(-(sh.alpha + sh.beta) * logT) - 1.0) * c1m
    return {
        "quadrature": abs(closed - main_term_quadrature(params).c_value) / closed,
        "operator_path": abs(closed - q_operator_path(params, logT)) / closed,
        "c1_bracket": abs(c1 + c1m - 2 * (P.derivative() * P).integral_unit()),
        "c1_forms": abs(c1 - c1_derivative_form(sh, P)),
        "exp_moment": abs(lhs - rhs),
        "reconstruction": abs(c_general(sh, P) - recon),
    }


def _run_mainterm(cfg: RunConfig) -> tuple[str, int]:
    from .mainterm import main_term_closed, main_term_quadrature

    p = cfg.parameters
    params = MainTermParams(p["P"], p["Q"], p["R"], p["theta"])
    closed = main_term_closed(params)
    quad = main_term_quadrature(params, p["nodes"])
    res = identity_residuals(p["P"], p["Q"], p["R"], p["theta"])
    header = ["P", "Q", "R", "theta", "c_closed", "c_quadrature", "kappa_bound"]
    header += [f"residual_{k}" for k in res] + ["seed", "warnings"]
    row = [p["P"], p["Q"], p["R"], p["theta"], closed.c_value, quad.c_value, closed.kappa_bound]
    row += list(res.values()) + [cfg.seed, "; ".join(cfg.warnings)]
    return _csv(header, [row]), 0


def _run_optimize(cfg: RunConfig) -> tuple[str, int]:
    from .optimizer import OptimizeSpec, optimize_alternating

    p = cfg.parameters
    spec = OptimizeSpec(
        degP=p["degP"], degQ=p["degQ"], theta=p["theta"], R_range=(p["R_min"], p["R_max"]),
        max_alt_iters=p["max_iters"], tol=p["tol"], grid_points=p["grid_points"],
        symmetric_Q=p["symmetric_Q"],
    )
    res = optimize_alternating(spec)
    rows = [["trace", R, c, k, "", "", "", ""] for R, c, k in res.R_trace]
    rows.append(["final", res.R_opt, res.c_opt, res.kappa_opt, res.P_opt, res.Q_opt,
                 res.iterations, res.converged])
    header = ["kind", "R", "c", "kappa", "P", "Q", "iterations", "converged"]
    return _csv(header, rows), 0


def _run_moment(cfg: RunConfig) -> tuple[str, int]:
    from .momentlab import MomentRunConfig, WindowSpec, run_moment

    p = cfg.parameters
    window = WindowSpec(p["T"], kind=p["window"]) if p["mode"] == "smoothed" else None
    config = MomentRunConfig(
        T=p["T"], theta=p["theta"], R=p["R"], P=p["P"], Q=p["Q"], window=window, quad_step=p["step"]
    )
    rep = run_moment(config, p["mode"], check=p["check_step"], dump_panels=bool(p["dump_panels"]))
    if p["dump_panels"]:
        Path(p["dump_panels"]).write_text(_csv(["panel_start", "contribution"], [list(r) for r in rep.panels]))
    header = ["T", "M", "sigma0", "moment", "main_term", "ratio", "runtime_seconds"]
    row = [rep.T, rep.M, rep.sigma0, rep.moment, rep.main_term, rep.ratio, rep.runtime_seconds]
    if p["check_step"]:
        header.append("step_change")
        row.append(rep.step_change)
    return _csv(header, [row]), 0


def _run_verify_afe(cfg: RunConfig) -> tuple[str, int]:
    from .afe import AfeShifts, afe_sides

    p = cfg.parameters
    try:
        shifts = AfeShifts(p["alpha"], p["beta"])
    except ValueError as exc:
        raise UsageError(f"keys 'alpha'/'beta': {exc}") from None
    lhs, rhs = afe_sides(p["t"], shifts, p["truncation"])
    header = ["t", "alpha", "beta", "truncation", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"]
    row = [p["t"], p["alpha"], p["beta"], p["truncation"], lhs.real, lhs.imag, rhs.real, rhs.imag, abs(lhs - rhs)]
    return _csv(header, [row]), 0


def _run_verify_arith(cfg: RunConfig) -> tuple[str, int]:
    from .afe import arith_factor_check, divisor_mobius_sums

    p = cfg.parameters
    value = arith_factor_check(p["s_re"], p["cap"])
    blocks = divisor_mobius_sums(p["cap"])
    nonzero = int(np.count_nonzero(blocks[1:]))
    header = ["cap", "s_re", "value", "residual", "nonzero_blocks"]
    return _csv(header, [[p["cap"], p["s_re"], value, abs(value - 1.0), nonzero]]), 0


def reproduce_report(check_identities: bool = False, seed: int = 0) -> dict:
    """Headline numbers for ``P = x, Q = 1 - x, R = 1.3, theta = 1/2`` with bracket verdicts."""
    from .mainterm import kappa_bound, main_term_closed

    start = time.perf_counter()
    P, Q, R, theta = Polynomial([0.0, 1.0]), Polynomial([1.0, -1.0]), 1.3, 0.5
    c = main_term_closed(MainTermParams(P, Q, R, theta)).c_value
    kappa = kappa_bound(R, c)
    residuals = identity_residuals(P, Q, R, theta)
    report: dict[str, Any] = {
        "P": P.to_string(),
        "Q": Q.to_string(),
        "R": R,
        "theta": theta,
        "c": c,
        "kappa": kappa,
        "c_bracket": list(C_BRACKET),
        "kappa_bracket": list(KAPPA_BRACKET),
        "c_ok": C_BRACKET[0] <= c <= C_BRACKET[1],
        "kappa_ok": KAPPA_BRACKET[0] <= kappa <= KAPPA_BRACKET[1],
        "residuals": residuals,
        "seed": seed,
        "warnings": ["theta = 1/2 is the boundary of the admissible range (0, 1/2)"],
    }
    ok = report["c_ok"] and report["kappa_ok"]
    if check_identities:
        worst = _random_identity_sweep(seed)
        report["random_sweep_max_residuals"] = worst
        report["identities_ok"] = all(v < IDENTITY_TOL for v in worst.values()) and all(
            v < IDENTITY_TOL for v in residuals.values()
        )
        ok = ok and report["identities_ok"]
    report["ok"] = ok
    report["runtime_seconds"] = time.perf_counter() - start
    return report


def _random_identity_sweep(seed: int, trials: int = 20) -> dict:
    from .afe import arith_factor_check

    rng = np.random.default_rng(seed)
    worst: dict[str, float] = {}
    for _ in range(trials):
        deg = int(rng.integers(1, 6))
        raw = rng.normal(size=deg)
        # P(0) = 0 and P(1) = 1
        coeffs = np.concatenate([[0.0], raw])
        coeffs[1] += 1.0 - coeffs.sum()
        qdeg = int(rng.integers(0, 5))
        q = np.concatenate([[1.0], rng.normal(size=qdeg)])
        R = float(rng.uniform(0.2, 3.0))
        theta = float(rng.uniform(0.1, 0.5))
        res = identity_residuals(Polynomial(coeffs), Polynomial(q), R, theta)
        for k, v in res.items():
            worst[k] = max(worst.get(k, 0.0), float(v))
    worst["arith_factor"] = abs(arith_factor_check(0.5, 1000) - 1.0)
    return worst


def _run_reproduce(cfg: RunConfig) -> tuple[str, int]:
    p = cfg.parameters
    report = reproduce_report(p["check_identities"], cfg.seed)
    code = 0 if report["ok"] else 1
    if p["json"]:
        report = {k: v for k, v in report.items() if k != "runtime_seconds"}
        return json.dumps(report, sort_keys=True, indent=2) + "\n", code
    lines = [
        f"c(P, Q, R, theta) = {report['c']:.10f}   bracket {C_BRACKET}  {'ok' if report['c_ok'] else 'FAIL'}",
        f"kappa bound       = {report['kappa']:.10f}   bracket {KAPPA_BRACKET}  {'ok' if report['kappa_ok'] else 'FAIL'}",
    ]
    for k, v in report["residuals"].items():
        lines.append(f"residual {k:<16s} {v:.3e}")
    if "random_sweep_max_residuals" in report:
        for k, v in report["random_sweep_max_residuals"].items():
            lines.append(f"sweep max {k:<15s} {v:.3e}")
        lines.append(f"identities {'ok' if report['identities_ok'] else 'FAIL'} (tolerance {IDENTITY_TOL:g})")
    for w in report["warnings"]:
        lines.append(f"warning: {w}")
    if not report["ok"]:
        lines.append("FAIL: a headline value or identity is outside its acceptance bracket")
    return "\n".join(lines) + "\n", code


_RUNNERS = {
    "mainterm": _run_mainterm,
    "optimize": _run_optimize,
    "moment": _run_moment,
    "verify-afe": _run_verify_afe,
    "verify-arith": _run_verify_arith,
    "reproduce": _run_reproduce,
}


def _destination(cfg: RunConfig) -> Path | None:
    if cfg.output_path:
        return Path(cfg.output_path)
    env = os.environ.get(OUTPUT_ENV)
    if env and cfg.subcommand != "reproduce":
        return Path(env) / f"{cfg.subcommand}.csv"
    return None


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"levinson: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    if cfg.threads is not None:
        import numba

        numba.set_num_threads(max(1, min(cfg.threads, numba.config.NUMBA_NUM_THREADS)))
    try:
        text, code = _RUNNERS[cfg.subcommand](cfg)
    except UsageError as exc:
        print(f"levinson: error: {exc}", file=sys.stderr)
        return 2
    for w in cfg.warnings:
        if cfg.subcommand != "reproduce":
            print(f"levinson: warning: {w}", file=sys.stderr)
    dest = _destination(cfg)
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
