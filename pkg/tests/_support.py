"""Shared builders for the test suite."""

import numpy as np
from hypothesis import strategies as st

from energyfwd import BlockCov, ContractSpec, CovOp, Curve, WeightSpec

FAMILIES = ("uniform", "futures", "unit")


def random_knots(rng, n=None, span=4.0):
    n = int(rng.integers(3, 12)) if n is None else n
    return np.sort(rng.uniform(0.02, span, n))


def random_curve(rng, alpha=1.0, n=None, span=4.0, scale=1.0, level=0.0):
    knots = random_knots(rng, n, span)
    # random walk nodal values: slopes of order one
    widths = np.diff(np.concatenate(([0.0], knots)))
    vals = level + scale * np.concatenate(([rng.normal()], rng.normal(size=knots.size) * np.sqrt(widths)))
    vals[1:] = vals[0] + np.cumsum(vals[1:] - level)
    return Curve.from_nodal(knots, vals, alpha)


def weight(kind, ell, r=0.7):
    return WeightSpec(kind, ell, r if kind == "futures" else None)


def contract(T1, T2, kind="uniform", r=0.7):
    return ContractSpec(T1, T2, weight(kind, T2 - T1, r))


SMOOTH_SHAPES = (
    lambda x: np.exp(-x),
    lambda x: 0.5 + 0.0 * x,
    lambda x: x * np.exp(-x),
    lambda x: np.exp(-0.3 * x) * np.cos(1.5 * x),
    lambda x: 1.0 / (1.0 + x),
)


def smooth_cov(lambdas=(0.5, 0.2, 0.08), alpha=1.0, knots=None, shapes=SMOOTH_SHAPES, offset=0):
    """Covariance with smooth eigenfunctions (Gram-Schmidt of fixed shapes)."""
    knots = np.linspace(0.1, 5.0, 40) if knots is None else knots
    k = len(lambdas)
    curves = [Curve.from_function(shapes[(offset + i) % len(shapes)], knots, alpha) for i in range(k)]
    return CovOp.from_curves(lambdas, curves)


def random_block(rng, Q1, Q2, rho=0.8):
    """Valid block: C = R1 M R2 with ||M|| = rho."""
    M = rng.normal(size=(Q1.rank, Q2.rank))
    M *= rho / np.linalg.norm(M, 2)
    C = np.sqrt(Q1.lambdas)[:, None] * M * np.sqrt(Q2.lambdas)[None, :]
    return BlockCov(Q1, Q2, C)


def forward_curve(level=40.0, amp=2.0, alpha=1.0, knots=None):
    knots = np.linspace(0.1, 5.0, 40) if knots is None else knots
    return Curve.from_function(lambda x: level + amp * np.sin(1.3 * x) - 0.3 * x, knots, alpha)


@st.composite
def curves(draw, alpha=1.0, max_knots=10, span=5.0):
    n = draw(st.integers(0, max_knots))
    raw = draw(st.lists(st.floats(0.01, span, allow_nan=False), min_size=n, max_size=n, unique=True))
    knots = np.sort(np.asarray(raw, dtype=float))
    if knots.size > 1 and np.min(np.diff(knots)) < 1e-3:
        knots = knots[np.concatenate(([True], np.diff(knots) >= 1e-3))]
    f0 = draw(st.floats(-50, 50, allow_nan=False))
    slopes = draw(st.lists(st.floats(-20, 20, allow_nan=False), min_size=knots.size, max_size=knots.size))
    return Curve(f0, knots, slopes, alpha)


alphas = st.sampled_from([0.25, 0.5, 1.0, 2.0])
