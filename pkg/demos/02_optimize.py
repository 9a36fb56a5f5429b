"""Alternating optimisation of P, Q and R.

Each half-step is an equality-constrained quadratic program, so c never
increases along the alternation. Above degree 1 the kappa bound is only
meaningful when Q' is symmetric about 1/2; without that condition the
optimiser happily reports values that are far too large.
"""
import time

from levinson import OptimizeSpec, optimize_alternating

for degP, degQ, sym in [(1, 1, False), (2, 2, True), (3, 3, True), (3, 3, False)]:
    start = time.perf_counter()
    res = optimize_alternating(OptimizeSpec(degP=degP, degQ=degQ, symmetric_Q=sym, grid_points=60))
    took = time.perf_counter() - start
    label = "symmetric Q'" if sym else "free Q"
    print(f"deg ({degP},{degQ}) {label:13s} R = {res.R_opt:.4f}  c = {res.c_opt:.6f}  "
          f"kappa = {res.kappa_opt:.4f}  [{took:.1f} s]")
    print(f"    P = {res.P_opt.to_string()}")
    print(f"    Q = {res.Q_opt.to_string()}")
