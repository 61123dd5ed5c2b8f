"""A forward curve in the weighted space and the swaps written on it.

Builds a seasonal curve, looks at its norm and at the representer of
point evaluation, then prices swaps under the three delivery weights.
"""

import numpy as np

from energyfwd import ContractSpec, Curve, WeightSpec, evaluate, h_curve, inner_product, norm, shift, swap_price

knots = np.linspace(0.1, 5.0, 50)
g = Curve.from_function(lambda x: 45.0 + 4.0 * np.cos(2 * np.pi * x) - 0.5 * x, knots, alpha_tilde=1.0)
print(f"g(0) = {g.f0:.3f}, |g| = {norm(g):.3f}")

# point evaluation is an inner product with h_x
x = 1.3
hx = h_curve(x, g.alpha_tilde, knots=g.knots)
print(f"g({x}) = {evaluate(g, x):.6f}   <g, h_x> = {inner_product(g, hx):.6f}")

# the shift semigroup moves the curve along maturity and never grows the norm by more than a constant
for s in (0.25, 1.0, 3.0):
    print(f"shift {s:4.2f}: |S g| / |g| = {norm(shift(g, s)) / norm(g):.4f}")

T1, T2 = 1.0, 1.25
for kind, r in (("uniform", None), ("futures", 0.05), ("unit", None)):
    c = ContractSpec(T1, T2, WeightSpec(kind, T2 - T1, r))
    print(f"{kind:8s} swap over [{T1}, {T2}] at t=0: {swap_price(g, c, 0.0):.6f}")

# the same contract a quarter later, seen from a curve that has not moved
c = ContractSpec(T1, T2, WeightSpec("uniform", T2 - T1))
print(f"uniform swap at t=0.25 on the same curve: {swap_price(g, c, 0.25):.6f}")
