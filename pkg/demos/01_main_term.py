"""Main term for the classical pair P = x, Q = 1 - x at R = 1.3, theta = 1/2.

The same number is reached three ways: exact polynomial algebra, tensor
Gauss-Legendre quadrature, and Cauchy-circle differentiation of the
two-shift main term c(alpha, beta). The last route should not depend on
the auxiliary log T.
"""
from levinson import MainTermParams, Polynomial, main_term_closed, main_term_quadrature, q_operator_path

params = MainTermParams(Polynomial([0.0, 1.0]), Polynomial([1.0, -1.0]), R=1.3, theta=0.5)

closed = main_term_closed(params)
quad = main_term_quadrature(params, n_nodes=64)
print(f"closed form      c = {closed.c_value:.15f}")
print(f"quadrature       c = {quad.c_value:.15f}")
for logT in (10.0, 20.0, 80.0):
    print(f"operator path    c = {q_operator_path(params, logT):.15f}   (log T = {logT:g})")
print(f"kappa bound        = {closed.kappa_bound:.6f}")
for w in params.warnings:
    print("note:", w)

# how the bound moves with R for this fixed pair
print("\n   R        c        kappa")
for R in (0.8, 1.0, 1.2, 1.3, 1.4, 1.6, 2.0):
    res = main_term_closed(MainTermParams(params.P, params.Q, R, 0.5))
    print(f"{R:5.2f}  {res.c_value:8.5f}  {res.kappa_bound:8.5f}")
