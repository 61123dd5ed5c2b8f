"""Delivery-period weights and the swap operator D acting on curves.

A swap delivering over [T1, T2] with settlement weight w on [0, l],
l = T2 - T1, has price F(t, T1, T2) = (D g(t))(T1 - t) where

    (D g)(x) = int_x^{x+l} w(y - x) g(y) dy
             = W(l) g(x) + int q(x, y) g'(y) dy,

W the cumulative weight and q(x, y) = (W(l) - W(y - x)) 1_{[0, l]}(y - x).
Both forms are implemented independently: the direct form integrates
the piecewise-linear curve against w, the second form integrates the
kernel q against the piecewise-constant derivative.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .curve_space import (
    AlphaWeight, Curve, _same_alpha, evaluate, h_curve, inner_product,
    merge_knots, projected_representer, refine_knots,
)
from .errors import DomainError, OperatorError, ParameterError
from .quadrature import gauss_legendre

__all__ = [
    "WeightSpec", "ContractSpec", "w_cumulative", "kernel_q", "apply_D",
    "eval_D_at", "eval_D_direct", "swap_price", "dual_D_apply_h", "dual_general",
    "delivery_grid", "op_norm_bound",
]

KINDS = ("unit", "uniform", "futures", "tabulated")


@dataclass(frozen=True, eq=False)
class WeightSpec:
    """Settlement weight w on [0, ell].

    Parameters
    ----------
    kind : {'unit', 'uniform', 'futures', 'tabulated'}
        unit: w = 1 (temperature indices); uniform: w = 1/ell (forward
        style); futures: w(u) = r exp(-r u) / (1 - exp(-r ell)) (futures
        style, continuously discounted settlement); tabulated: piecewise
        linear through ``table``.
    ell : float
        Delivery length, positive.
    r : float, optional
        Rate of the futures-style weight, positive.
    table : tuple of arrays, optional
        (points, values) for the tabulated kind. Points must start at 0
        and end at ell; values must be positive.
    """

    kind: str
    ell: float
    r: float = None
    table: tuple = None
    _tab: dict = field(init=False, repr=False, default=None)

    def __post_init__(self):
        kind = str(self.kind).lower()
        if kind in ("futuresstyle", "futures_style"):
            kind = "futures"
        if kind not in KINDS:
            raise ParameterError(f"unknown weight kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "kind", kind)
        ell = float(self.ell)
        if not (math.isfinite(ell) and ell > 0.0):
            raise ParameterError("delivery length ell must be positive")
        object.__setattr__(self, "ell", ell)
        if kind == "futures":
            if self.r is None or not (float(self.r) > 0.0):
                raise ParameterError("futures-style weight needs a positive rate r")
            object.__setattr__(self, "r", float(self.r))
        if kind == "tabulated":
            self._build_table()

    def _build_table(self):
        if self.table is None:
            raise ParameterError("tabulated weight needs a table of (points, values)")
        u = np.asarray(self.table[0], dtype=float)
        v = np.asarray(self.table[1], dtype=float)
        if u.ndim != 1 or u.shape != v.shape or u.size < 2:
            raise ParameterError("weight table needs matching point and value arrays (>= 2 points)")
        if np.any(np.diff(u) <= 0) or u[0] != 0.0 or not math.isclose(u[-1], self.ell, rel_tol=1e-12):
            raise ParameterError("weight table points must increase from 0 to ell")
        if np.any(v <= 0) or not np.all(np.isfinite(v)):
            raise ParameterError("weight table values must be positive and finite")
        u = u.copy()
        u[-1] = self.ell
        tab = {"u": u, "v": v}
        n = u.size - 1
        Wc, N1c, Mc = np.zeros(n + 1), np.zeros(n + 1), np.zeros(n + 1)
        object.__setattr__(self, "_tab", tab)
        for k in range(n):
            lo, hi = u[k], u[k + 1]
            Wc[k + 1] = Wc[k] + self._panel_w(k, lo, hi, 0)
            N1c[k + 1] = N1c[k] + self._panel_w(k, lo, hi, 1)
        tab["W"], tab["N1"] = Wc, N1c
        for k in range(n):
            Mc[k + 1] = Mc[k] + self._panel_M(k, u[k], u[k + 1])
        tab["M"] = Mc

    # tabulated helpers: 5-point Gauss-Legendre per panel
    def _panel_w(self, k, lo, hi, power):
        x, w = gauss_legendre(5)
        lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        half = 0.5 * (hi - lo)
        s = 0.5 * (hi + lo)[..., None] + half[..., None] * x
        vals = np.interp(s, self._tab["u"], self._tab["v"]) * (s ** power)
        return np.sum(vals * w, axis=-1) * half

    def _panel_M(self, k, lo, hi):
        x, w = gauss_legendre(5)
        lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        k = np.asarray(k)
        half = 0.5 * (hi - lo)
        s = 0.5 * (hi + lo)[..., None] + half[..., None] * x
        Ws = self._tab["W"][k][..., None] + self._panel_w(k, np.broadcast_to(lo[..., None], s.shape), s, 0)
        return np.sum(Ws * w, axis=-1) * half

    def _tab_eval(self, v, what):
        u = self._tab["u"]
        v = np.clip(np.asarray(v, dtype=float), 0.0, self.ell)
        k = np.clip(np.searchsorted(u, v, side="right") - 1, 0, u.size - 2)
        lo = u[k]
        if what == "W":
            return self._tab["W"][k] + self._panel_w(k, lo, v, 0)
        if what == "N1":
            return self._tab["N1"][k] + self._panel_w(k, lo, v, 1)
        return self._tab["M"][k] + self._panel_M(k, lo, v)

    # public pieces

    def w(self, u):
        """Weight density at u in [0, ell]."""
        u = np.asarray(u, dtype=float)
        if self.kind == "unit":
            return np.ones_like(u)
        if self.kind == "uniform":
            return np.full_like(u, 1.0 / self.ell)
        if self.kind == "futures":
            r = self.r
            return r * np.exp(-r * u) / -math.expm1(-r * self.ell)
        return np.interp(u, self._tab["u"], self._tab["v"])

    def W(self, u):
        """Cumulative weight int_0^u w."""
        u = np.asarray(u, dtype=float)
        if self.kind == "unit":
            return u.copy()
        if self.kind == "uniform":
            return u / self.ell
        if self.kind == "futures":
            r = self.r
            return np.expm1(-r * u) / math.expm1(-r * self.ell)
        return self._tab_eval(u, "W")

    def N1(self, u):
        """First moment int_0^u s w(s) ds."""
        u = np.asarray(u, dtype=float)
        if self.kind == "unit":
            return 0.5 * u * u
        if self.kind == "uniform":
            return 0.5 * u * u / self.ell
        if self.kind == "futures":
            r = self.r
            kappa = r / -math.expm1(-r * self.ell)
            # int_0^u s exp(-r s) ds = (1 - exp(-r u)(1 + r u)) / r^2
            return kappa * (-np.expm1(-r * u) - r * u * np.exp(-r * u)) / (r * r)
        return self._tab_eval(u, "N1")

    def M(self, u):
        """Double integral int_0^u W(s) ds."""
        u = np.asarray(u, dtype=float)
        if self.kind == "unit":
            return 0.5 * u * u
        if self.kind == "uniform":
            return 0.5 * u * u / self.ell
        if self.kind == "futures":
            r = self.r
            return (u + np.expm1(-r * u) / r) / -math.expm1(-r * self.ell)
        return self._tab_eval(u, "M")

    @property
    def W_ell(self):
        """Total weight W(ell)."""
        return float(self.W(self.ell))

    @property
    def sup_w(self):
        """Upper bound c of the weight density."""
        if self.kind == "unit":
            return 1.0
        if self.kind == "uniform":
            return 1.0 / self.ell
        if self.kind == "futures":
            return self.r / -math.expm1(-self.r * self.ell)
        return float(np.max(self._tab["v"]))

    def with_ell(self, ell):
        """Same family on a different delivery length."""
        if self.kind == "tabulated":
            raise ParameterError("a tabulated weight is tied to its table length")
        return WeightSpec(self.kind, ell, self.r)

    def to_dict(self):
        d = {"kind": self.kind, "ell": self.ell}
        if self.r is not None:
            d["r"] = self.r
        if self.table is not None:
            d["table"] = [list(map(float, self.table[0])), list(map(float, self.table[1]))]
        return d

    @classmethod
    def from_dict(cls, d):
        table = d.get("table")
        return cls(d["kind"], d["ell"], d.get("r"), tuple(table) if table is not None else None)


@dataclass(frozen=True)
class ContractSpec:
    """Swap delivering over [T1, T2] with a settlement weight.

    Parameters
    ----------
    T1, T2 : float
        Delivery start and end in calendar time, 0 <= T1 < T2.
    weight : WeightSpec
        Weight with ell = T2 - T1.
    """

    T1: float
    T2: float
    weight: WeightSpec

    def __post_init__(self):
        if not (self.T2 > self.T1 >= 0.0):
            raise DomainError(f"contract needs 0 <= T1 < T2, got T1={self.T1}, T2={self.T2}")
        if not math.isclose(self.weight.ell, self.T2 - self.T1, rel_tol=1e-10, abs_tol=1e-12):
            raise DomainError("weight length ell must equal T2 - T1")

    @classmethod
    def make(cls, T1, T2, kind="uniform", r=None):
        return cls(float(T1), float(T2), WeightSpec(kind, float(T2) - float(T1), r))

    @property
    def ell(self):
        return self.T2 - self.T1


def w_cumulative(w, u):
    """W(u) = int_0^u w(v) dv."""
    if np.any(np.asarray(u) < 0):
        raise DomainError("w_cumulative needs u >= 0")
    out = w.W(u)
    return float(out) if np.ndim(out) == 0 else out


def kernel_q(w, x, y):
    """q(x, y) = (W(ell) - W(y - x)) on the closed band 0 <= y - x <= ell."""
    v = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    inside = (v >= 0.0) & (v <= w.ell)
    out = np.where(inside, w.W_ell - w.W(np.clip(v, 0.0, w.ell)), 0.0)
    return float(out) if np.ndim(out) == 0 else out


def _pieces(g):
    """Cells of g as (left, right, left value, slope), tail included."""
    left = np.concatenate(([0.0], g.knots))
    right = np.concatenate((g.knots, [np.inf]))
    vals = g.nodal_values
    slopes = np.concatenate((g.slopes, [0.0]))
    return left, right, vals, slopes


def _band(w, g, x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0):
        raise DomainError("delivery functionals need x >= 0")
    a, b, va, d = _pieces(g)
    lo = np.maximum(a[None, :], x[:, None])
    hi = np.minimum(b[None, :], x[:, None] + w.ell)
    active = hi > lo
    vlo = np.clip(lo - x[:, None], 0.0, w.ell)
    vhi = np.clip(hi - x[:, None], 0.0, w.ell)
    return x, a, va, d, lo, hi, vlo, vhi, active


def eval_D_direct(w, g, x):
    """(D g)(x) by integrating w(y - x) g(y) over each cell in closed form."""
    x, a, va, d, lo, hi, vlo, vhi, active = _band(w, g, x)
    c0 = va[None, :] + d[None, :] * (x[:, None] - a[None, :])
    terms = c0 * (w.W(vhi) - w.W(vlo)) + d[None, :] * (w.N1(vhi) - w.N1(vlo))
    return np.sum(np.where(active, terms, 0.0), axis=1)


def eval_D_at(w, g, x):
    """(D g)(x) = W(ell) g(x) + int q(x, y) g'(y) dy without building D g.

    Vectorized over x.
    """
    xs, a, va, d, lo, hi, vlo, vhi, active = _band(w, g, x)
    Wl = w.W_ell
    terms = d[None, :] * (Wl * (hi - lo) - (w.M(vhi) - w.M(vlo)))
    out = Wl * evaluate(g, xs) + np.sum(np.where(active, terms, 0.0), axis=1)
    return float(out[0]) if np.ndim(x) == 0 else out


def delivery_grid(ell, knots, panels=8, extra_knots=None):
    """Knots of g, their ell-translates and extra points, refined."""
    knots = np.asarray(knots, dtype=float)
    extra = np.empty(0) if extra_knots is None else np.atleast_1d(np.asarray(extra_knots, dtype=float))
    base = merge_knots(knots, knots - ell, extra)
    return refine_knots(base, panels)


def apply_D(w, g, panels=8, extra_knots=None):
    """D g interpolated at the nodes of a refinement grid.

    The output grid is the union of the knots of g, their ell-translates and
    ``extra_knots``, each cell split into ``panels`` pieces. Node values
    are exact; D g is constant beyond the last knot of g.
    """
    grid = delivery_grid(w.ell, g.knots, panels, extra_knots)
    vals = eval_D_direct(w, g, np.concatenate(([0.0], grid)))
    return Curve.from_nodal(grid, vals, g.alpha_tilde)


def swap_price(g, contract, t):
    """F(t, T1, T2) = (D g)(T1 - t) for the curve g observed at time t."""
    if t > contract.T1:
        raise DomainError(f"valuation time t={t} lies after delivery start T1={contract.T1}")
    return eval_D_at(contract.weight, g, contract.T1 - t)


def op_norm_bound(w, alpha_tilde):
    """Bound W(l) + sqrt(W(l)^2 (2 + int_0^l 1/alpha) + 2 c^2 l^2) on ||D||."""
    Wl, c, ell = w.W_ell, w.sup_w, w.ell
    inv = float(AlphaWeight(alpha_tilde).inv_integral(ell))
    return Wl + math.sqrt(Wl * Wl * (2.0 + inv) + 2.0 * c * c * ell * ell)


def dual_D_apply_h(w, u, alpha_tilde=1.0, knots=None, panels=8):
    """Adjoint of D applied to the representer h_u.

    The exact dual is x -> W(l) h_u(x) + int_0^x q(u, z)/alpha(z) dz. It is
    returned as its orthogonal projection onto a grid built from ``knots``,
    u and u + l (refined by ``panels``). For curves g on ``knots``,
    <g, result> equals (D g)(u) up to round-off.
    """
    u = float(u)
    if u < 0.0:
        raise DomainError("dual_D_apply_h needs u >= 0")
    base = merge_knots(np.empty(0) if knots is None else knots, [u, u + w.ell])
    grid = refine_knots(base, panels)
    left = np.concatenate(([0.0], grid[:-1]))
    Wl = w.W_ell
    # alpha times the derivative is W(l) on [0, u] plus q(u, .) on [u, u+l]
    below = np.clip(np.minimum(grid, u) - left, 0.0, None)
    lo = np.maximum(left, u)
    hi = np.minimum(grid, u + w.ell)
    band = np.where(hi > lo, Wl * (hi - lo) - (w.M(np.clip(hi - u, 0, w.ell)) - w.M(np.clip(lo - u, 0, w.ell))), 0.0)
    return projected_representer(Wl, Wl * below + band, grid, alpha_tilde)


def dual_general(op, g, knots=None):
    """Adjoint T* g of a linear operator on the curves of a grid.

    For each node x of the grid the value <g, T h_x> is computed with h_x
    projected onto the grid; the result is the curve through these values.
    It satisfies <T f, g> = <f, T* g> for every f on the grid.

    Parameters
    ----------
    op : callable
        Linear map Curve -> Curve.
    g : Curve
    knots : array_like, optional
        Working grid, by default the knots of g.

    Raises
    ------
    OperatorError
        If ``op`` fails on one of the grid representers.
    """
    knots = g.knots if knots is None else merge_knots(knots)
    nodes = np.concatenate(([0.0], knots))
    vals = np.empty(nodes.size)
    for i, x in enumerate(nodes):
        hx = h_curve(x, g.alpha_tilde, knots=knots, refine=False)
        try:
            image = op(hx)
        except Exception as exc:  # noqa: BLE001 - reported to the caller
            raise OperatorError(f"operator failed on the representer at x={x:g}: {exc}") from exc
        if not isinstance(image, Curve):
            raise OperatorError("operator must map curves to curves")
        _same_alpha(g, image)
        vals[i] = inner_product(g, image)
    return Curve.from_nodal(knots, vals, g.alpha_tilde)
