"""Quadrature helpers shared by the operator and pricing modules.

Gauss-Legendre panels on intervals split at known breakpoints, Gaussian
expectations by Gauss-Hermite (smooth integrands) or by Gauss-Legendre
panels split at payoff kinks, and a conditional scheme for two
dimensional Gaussian expectations.
"""

import warnings
from functools import lru_cache

import numpy as np
from scipy.special import roots_hermitenorm, roots_legendre

# Standard normal mass beyond this many deviations is below 1e-30.
NORMAL_CUTOFF = 12.0
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    x, w = roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def gauss_hermite_normal(n):
    """Nodes and weights for E[f(X)], X ~ N(0, 1), with n points."""
    x, w = roots_hermitenorm(n)
    w = w / np.sqrt(2.0 * np.pi)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(a, b, breakpoints=(), n=32):
    """Gauss-Legendre nodes and weights on [a, b] split at breakpoints.

    Breakpoints outside the open interval (a, b) are ignored.

    Returns
    -------
    nodes, weights : ndarray
    """
    if b <= a:
        return np.empty(0), np.empty(0)
    bp = np.asarray(breakpoints, dtype=float).ravel()
    bp = bp[(bp > a) & (bp < b)]
    edges = np.unique(np.concatenate(([a], bp, [b])))
    # drop slivers created by round-off
    keep = np.concatenate(([True], np.diff(edges) > 1e-14 * max(1.0, abs(b))))
    edges = edges[keep]
    edges[-1] = b
    x, w = gauss_legendre(n)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + hi) * 0.5 + half * x
    weights = half * w
    return nodes.ravel(), weights.ravel()


def time_integral(fn, a, b, breakpoints=(), n=32, rtol=1e-9, check=True):
    """Integrate a vectorized function over [a, b] by split Gauss-Legendre.

    The integral is recomputed with twice as many nodes per panel and a
    warning is issued if the two values differ by more than ``rtol``.

    Parameters
    ----------
    fn : callable
        Maps an array of times of shape (m,) to an array of shape (m, ...).
    a, b : float
        Integration limits; an empty interval gives zero.
    breakpoints : sequence of float
        Points where the integrand may have kinks.
    """
    if b <= a:
        out = np.asarray(fn(np.array([a])))
        return np.zeros(out.shape[1:]) if out.ndim > 1 else 0.0
    s, w = panel_nodes(a, b, breakpoints, n)
    vals = np.asarray(fn(s))
    est = np.tensordot(w, vals, axes=(0, 0))
    if check:
        s2, w2 = panel_nodes(a, b, breakpoints, 2 * n)
        est2 = np.tensordot(w2, np.asarray(fn(s2)), axes=(0, 0))
        scale = np.max(np.abs(est2))
        if np.max(np.abs(est2 - est)) > rtol * max(scale, 1e-300):
            warnings.warn(
                "time quadrature not stable to the requested tolerance; "
                "using the refined value", RuntimeWarning, stacklevel=2)
        est = est2
    if np.ndim(est) == 0:
        return float(est)
    return est


def expect_normal(fn, mean, sd, kinks=(), n=64):
    """E[fn(mean + sd * X)] for standard normal X.

    Smooth integrands use Gauss-Hermite; with kinks the real line is cut
    at +-12 deviations and at each kink, and every panel gets an n-point
    Gauss-Legendre rule against the normal density.
    """
    if sd <= 0.0:
        return float(np.asarray(fn(np.array([mean])))[0])
    z_kinks = (np.asarray(kinks, dtype=float) - mean) / sd
    z_kinks = z_kinks[np.abs(z_kinks) < NORMAL_CUTOFF]
    if len(z_kinks) == 0:
        x, w = gauss_hermite_normal(n)
        return float(np.dot(w, fn(mean + sd * x)))
    z, w = panel_nodes(-NORMAL_CUTOFF, NORMAL_CUTOFF, z_kinks, n)
    w = w * _INV_SQRT_2PI * np.exp(-0.5 * z * z)
    return float(np.dot(w, fn(mean + sd * z)))


def normal_nodes(mean, sd, kinks=(), n=64):
    """Nodes and weights realising ``expect_normal`` for reuse."""
    if sd <= 0.0:
        return np.array([float(mean)]), np.array([1.0])
    z_kinks = (np.asarray(kinks, dtype=float) - mean) / sd
    z_kinks = z_kinks[np.abs(z_kinks) < NORMAL_CUTOFF]
    if len(z_kinks) == 0:
        x, w = gauss_hermite_normal(n)
        return mean + sd * np.asarray(x), np.asarray(w)
    z, w = panel_nodes(-NORMAL_CUTOFF, NORMAL_CUTOFF, z_kinks, n)
    w = w * _INV_SQRT_2PI * np.exp(-0.5 * z * z)
    return mean + sd * z, w


def expect_normal_2d(fn, mean, cov, x_kinks=(), y_kinks=None, n=64):
    """E[fn(X, Y)] for a bivariate normal (X, Y).

    The outer integral runs over X, the inner one over Y given X. Both use
    the rules of :func:`normal_nodes`, so payoff kinks in either variable
    are split exactly.

    Parameters
    ----------
    fn : callable
        fn(x, y) vectorized over equal-shape arrays.
    mean : (2,) array_like
    cov : (2, 2) array_like
        Positive semidefinite covariance matrix.
    x_kinks : sequence of float
        Kinks of the outer function x -> E[fn(x, Y) | X = x].
    y_kinks : callable or sequence, optional
        Kinks in y, either fixed or as a function of x.
    """
    m1, m2 = float(mean[0]), float(mean[1])
    cov = np.asarray(cov, dtype=float)
    v1, v2, c12 = cov[0, 0], cov[1, 1], cov[0, 1]
    v1 = max(v1, 0.0)
    v2 = max(v2, 0.0)
    if v1 <= 0.0:
        # X degenerate: integrate Y alone
        yk = y_kinks(m1) if callable(y_kinks) else (y_kinks or ())
        return expect_normal(lambda y: fn(np.full_like(y, m1), y), m2, np.sqrt(v2), yk, n)
    s1 = np.sqrt(v1)
    beta = c12 / v1
    cond_var = max(v2 - beta * c12, 0.0)
    cond_sd = np.sqrt(cond_var)
    if cond_sd <= 1e-14 * max(1.0, np.sqrt(v2)):
        cond_sd = 0.0
    xs, wx = normal_nodes(m1, s1, x_kinks, n)
    total = 0.0
    if callable(y_kinks):
        for xi, wi in zip(xs, wx):
            cm = m2 + beta * (xi - m1)
            ys, wy = normal_nodes(cm, cond_sd, y_kinks(xi), n)
            total += wi * np.dot(wy, fn(np.full_like(ys, xi), ys))
        return float(total)
    yk = y_kinks or ()
    if cond_sd == 0.0:
        ys = m2 + beta * (xs - m1)
        return float(np.dot(wx, fn(xs, ys)))
    # fixed kinks in y: conditional means shift, so build nodes per x
    for xi, wi in zip(xs, wx):
        cm = m2 + beta * (xi - m1)
        ys, wy = normal_nodes(cm, cond_sd, yk, n)
        total += wi * np.dot(wy, fn(np.full_like(ys, xi), ys))
    return float(total)
