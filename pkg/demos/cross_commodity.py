"""Two commodities driven by correlated noises.

A block covariance couples the noises. It is validated, used to price an
exchange option between two geometric curves and a quanto-style product
on two arithmetic curves, each checked against simulation.
"""

import math

import numpy as np

from energyfwd import (BlockCov, Call, ContractSpec, CovOp, Curve, PricingRequest, SigmaSpec, TablePayoff,
                       WeightSpec, evaluate, price_margrabe, price_quanto, qt_block, regression_operator,
                       validate_block)
from energyfwd.montecarlo import mc_margrabe, mc_quanto
from energyfwd.pricing import margrabe_variance, m_of_g

knots = np.linspace(0.1, 5.0, 40)


def cov(lambdas, shapes):
    return CovOp.from_curves(lambdas, [Curve.from_function(f, knots) for f in shapes])


def block(Q1, Q2, rho, seed):
    # C = Q1^(1/2) M Q2^(1/2) with |M| = rho is valid whenever rho <= 1
    M = np.random.default_rng(seed).normal(size=(Q1.rank, Q2.rank))
    M *= rho / np.linalg.norm(M, 2)
    return BlockCov(Q1, Q2, np.sqrt(Q1.lambdas)[:, None] * M * np.sqrt(Q2.lambdas)[None, :])


Q1 = cov([0.5, 0.2], [lambda x: np.exp(-x), lambda x: 0.5 + 0 * x])
Q2 = cov([0.3, 0.1], [lambda x: x * np.exp(-x), lambda x: 1 / (1 + x)])
B = block(Q1, Q2, 0.9, 1)
rep = validate_block(B)
print(f"block valid: {rep.valid}, whitened |C| = {rep.spectral_norm:.4f}, min eigenvalue {rep.min_eig:.4f}")
print(f"inflated block valid: {validate_block(BlockCov(Q1, Q2, 1.5 * B.C)).valid}")

# the second noise given the first: L2 = R L1 + independent remainder
R = regression_operator(B)
print("regression matrix:\n", np.round(R.matrix, 4))
P = qt_block(B, 1.0, 0.5, 1.0)
print(f"Cov(g1(1, 0.5), g2(1, 1.0)) from the noise accumulated over [0, 1]: {P[1, 0]:.5f}")

# exchange option on two lognormal forwards with delivery at T
sig = (SigmaSpec.identity(), SigmaSpec.identity())
logs = (Curve.from_function(lambda x: np.log(40.0 + 2.0 * np.sin(1.3 * x)), knots),
        Curve.from_function(lambda x: np.log(39.0 + np.sin(1.3 * x)), knots))
Bg = block(cov([0.02, 0.008], [lambda x: np.exp(-x), lambda x: 0.5 + 0 * x]),
           cov([0.015, 0.005], [lambda x: x * np.exp(-x), lambda x: 1 / (1 + x)]), 0.8, 2)
T, tau, r = 1.2, 0.9, 0.03
f1, f2 = (math.exp(evaluate(x, T)) for x in logs)
cf = price_margrabe(f1, f2, margrabe_variance(sig, Bg, T, 0.0, tau), math.exp(-r * tau))
mc = mc_margrabe(logs, sig, Bg, T, 0.0, tau, r, n_paths=50_000, seed=3)
print(f"exchange option: closed form {cf:.5f}  Monte Carlo {mc.price:.5f} +- {mc.stderr:.5f}")

# a call on commodity 1 paid out only when commodity 2 ends high
g1 = Curve.from_function(lambda x: 40.0 + 2.0 * np.sin(1.3 * x), knots)
g2 = Curve.from_function(lambda x: 10.0 + 0.5 * np.sin(1.3 * x), knots)
c1, c2 = ContractSpec(1.0, 1.25, WeightSpec("uniform", 0.25)), ContractSpec(1.0, 1.5, WeightSpec("unit", 0.5))
K = m_of_g(g1, c1, 0.0)
req = PricingRequest(c1, 0.0, 0.8, 0.02, K=K, contract2=c2)
payoffs = (Call(K), TablePayoff((4.0, 6.0), (0.0, 1.0)))
cf = price_quanto(g1, g2, B, (c1, c2), payoffs, req)
mc = mc_quanto(g1, g2, B, (c1, c2), payoffs, req, n_paths=50_000, seed=4)
print(f"quanto: closed form {cf:.5f}  Monte Carlo {mc.price:.5f} +- {mc.stderr:.5f}")
