"""Monte Carlo prices from the simulators, used as oracles for the
closed-form and quadrature pricers.

Every estimator uses the simulated forward itself as a control variate:
its mean is known exactly (martingale property), which removes most of
the sampling noise of near-linear payoffs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .covariance import SigmaSpec
from .dynamics import ForwardProbe, NoiseSpec, SimPlan, SwapProbe, simulate_bivariate, simulate_geometric, simulate_mild
from .pricing import Spread, m_of_g
from .curve_space import evaluate

__all__ = ["MCResult", "control_variate", "mc_european", "mc_calendar_spread", "mc_black76",
           "mc_margrabe", "mc_quanto"]


@dataclass
class MCResult:
    """Estimate with its standard error; ``raw_*`` without control variate."""

    price: float
    stderr: float
    n_paths: int
    raw_price: float = None
    raw_stderr: float = None

    def within(self, value, n_se=3.0):
        return abs(value - self.price) <= n_se * self.stderr

    def z_score(self, value):
        return (value - self.price) / self.stderr if self.stderr > 0 else (0.0 if value == self.price else math.inf)

    def to_dict(self):
        return {"price": self.price, "stderr": self.stderr, "n_paths": self.n_paths}


def control_variate(y, controls, means):
    """Regression estimator of E[y] with controls of known means.

    Returns
    -------
    estimate, stderr : float
    """
    y = np.asarray(y, dtype=float)
    X = np.atleast_2d(np.asarray(controls, dtype=float))
    if X.shape[0] != y.size:
        X = X.T
    X = X - np.asarray(means, dtype=float)
    Xc = X - X.mean(axis=0)
    yc = y - y.mean()
    beta, *_ = np.linalg.lstsq(Xc, yc, rcond=None)
    adj = y - X @ beta
    n = y.size
    return float(adj.mean()), float(adj.std(ddof=1 + X.shape[1]) / math.sqrt(n))


def _result(y, controls, means, disc):
    n = y.size
    raw, raw_se = float(y.mean()), float(y.std(ddof=1) / math.sqrt(n))
    if controls is None:
        return MCResult(disc * raw, disc * raw_se, n, disc * raw, disc * raw_se)
    est, se = control_variate(y, controls, means)
    return MCResult(disc * est, disc * se, n, disc * raw, disc * raw_se)


def _plan(t, tau, n_paths, n_steps, seed, model="arithmetic", **kw):
    return SimPlan(t, tau, n_steps, n_paths, seed, model=model, record="final", **kw)


def mc_european(g, sigma, noise, req, n_paths=100_000, n_steps=20, seed=0, control=True, **plan_kw):
    """disc E[p(F(tau))] from simulated swap prices (Gaussian or NIG noise)."""
    m = m_of_g(g, req.contract, req.t)
    if req.tau <= req.t:
        return MCResult(req.disc * float(req.payoff(np.array([m]))[0]), 0.0, n_paths)
    ps = simulate_mild(g, sigma, noise, _plan(req.t, req.tau, n_paths, n_steps, seed, **plan_kw),
                       [SwapProbe(req.contract)])
    F = ps.terminal(0)
    return _result(req.payoff(F), F if control else None, [m], req.disc)


def mc_calendar_spread(g, sigma, noise, contracts, req, payoff=None, n_paths=100_000, n_steps=20, seed=0,
                       **plan_kw):
    """disc E[p(F1(tau), F2(tau))] for two swaps on one simulated curve."""
    payoff = Spread(0.0 if req.K is None else req.K) if payoff is None else payoff
    ps = simulate_mild(g, sigma, noise, _plan(req.t, req.tau, n_paths, n_steps, seed, **plan_kw),
                       [SwapProbe(c) for c in contracts])
    F1, F2 = ps.terminal(0), ps.terminal(1)
    means = [m_of_g(g, c, req.t) for c in contracts]
    return _result(payoff(F1, F2), np.column_stack([F1, F2]), means, req.disc)


def mc_black76(g_tilde, sigma, Q, T, t, tau, r, K, n_paths=100_000, n_steps=20, seed=0, **plan_kw):
    """Call on the fixed-delivery forward in the geometric model."""
    ps = simulate_geometric(g_tilde, sigma, NoiseSpec("gaussian", Q),
                            _plan(t, tau, n_paths, n_steps, seed, "geometric", **plan_kw), [ForwardProbe(T)])
    f = ps.terminal(0)
    f0 = math.exp(evaluate(g_tilde, T - t))
    return _result(np.maximum(f - K, 0.0), f, [f0], math.exp(-r * (tau - t)))


def mc_margrabe(g_tildes, sigmas, block, T, t, tau, r, n_paths=100_000, n_steps=20, seed=0, **plan_kw):
    """Exchange option E[(f1 - f2)^+] on two geometric forward curves."""
    plan = _plan(t, tau, n_paths, n_steps, seed, "geometric", **plan_kw)
    a, b = simulate_bivariate(g_tildes, sigmas, block, plan, ([ForwardProbe(T)], [ForwardProbe(T)]))
    f1, f2 = a.terminal(0), b.terminal(0)
    means = [math.exp(evaluate(g, T - t)) for g in g_tildes]
    return _result(np.maximum(f1 - f2, 0.0), np.column_stack([f1, f2]), means, math.exp(-r * (tau - t)))


def mc_quanto(g1, g2, block, contracts, payoffs, req, sigmas=None, n_paths=100_000, n_steps=20, seed=0,
              **plan_kw):
    """disc E[p(F1(tau)) q(F2(tau))] from the bivariate arithmetic simulator."""
    sigmas = (SigmaSpec.identity(), SigmaSpec.identity()) if sigmas is None else sigmas
    plan = _plan(req.t, req.tau, n_paths, n_steps, seed, **plan_kw)
    a, b = simulate_bivariate((g1, g2), sigmas, block, plan,
                              ([SwapProbe(contracts[0])], [SwapProbe(contracts[1])]))
    F1, F2 = a.terminal(0), b.terminal(0)
    p, q = payoffs
    means = [m_of_g(g1, contracts[0], req.t), m_of_g(g2, contracts[1], req.t)]
    return _result(p(F1) * q(F2), np.column_stack([F1, F2]), means, req.disc)
