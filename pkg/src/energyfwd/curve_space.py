"""Forward curves as elements of the weighted space H_alpha.

A curve g on the half line is stored as its value at zero together with
a piecewise-constant derivative on a finite grid of knots, with zero
derivative beyond the last knot.  The space carries the inner product

    <f, g> = f(0) g(0) + int_0^inf alpha(x) f'(x) g'(x) dx,

with alpha(x) = exp(alpha_tilde * x).  For piecewise-constant derivatives
every cell integral closes in elementary functions, so inner products and
norms are exact.

Point evaluation is represented by the curve h_x with

    h_x(y) = 1 + int_0^{min(x, y)} alpha(u)^{-1} du,    <g, h_x> = g(x).

Its derivative is not piecewise constant.  :func:`h_curve` returns the
orthogonal projection of h_x onto the curves living on a chosen grid;
inside that grid the reproducing identity holds to round-off.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, NumericRangeError

__all__ = [
    "AlphaWeight", "Curve", "Basis", "inner_product", "norm", "evaluate",
    "h_curve", "shift", "exp_curve", "project", "gram_schmidt", "grid_basis",
    "linear_combination", "merge_knots", "refine_knots", "cell_weights",
]


@dataclass(frozen=True)
class AlphaWeight:
    """Exponential weight alpha(x) = exp(alpha_tilde * x).

    Attributes
    ----------
    alpha_tilde : float
        Positive growth rate of the weight, in 1/time.
    """

    alpha_tilde: float

    def __post_init__(self):
        a = self.alpha_tilde
        if not (isinstance(a, (int, float, np.floating)) and math.isfinite(a) and a > 0):
            raise ConfigurationError(f"alpha_tilde must be a positive finite number, got {a!r}")

    def __call__(self, x):
        return np.exp(self.alpha_tilde * np.asarray(x, dtype=float))

    @property
    def k_sq(self):
        """int_0^inf 1/alpha = 1/alpha_tilde."""
        return 1.0 / self.alpha_tilde

    @property
    def k1(self):
        """Constant of the exponential norm bound, sqrt(5 + 4 k^2)."""
        return math.sqrt(5.0 + 4.0 * self.k_sq)

    @property
    def shift_bound_sq(self):
        """Bound c_S^2 = 2 max(1, k^2) on the squared shift operator norm."""
        return 2.0 * max(1.0, self.k_sq)

    def inv_integral(self, x):
        """int_0^x 1/alpha(u) du."""
        a = self.alpha_tilde
        return -np.expm1(-a * np.asarray(x, dtype=float)) / a

    def delta_norm_sq(self, x):
        """Squared norm of point evaluation at x, 1 + int_0^x 1/alpha."""
        return 1.0 + self.inv_integral(x)


def _check_alpha(a):
    AlphaWeight(a)
    return float(a)


def cell_weights(knots, alpha_tilde):
    """A_i = int over cell i of alpha, for cells (x_{i-1}, x_i], x_0 = 0."""
    knots = np.asarray(knots, dtype=float)
    if knots.size == 0:
        return np.empty(0)
    a = alpha_tilde
    left = np.concatenate(([0.0], knots[:-1]))
    return np.exp(a * left) * np.expm1(a * (knots - left)) / a


def _as_knots(knots):
    k = np.array(knots, dtype=float).ravel()
    if k.size:
        if not np.all(np.isfinite(k)):
            raise DomainError("knots must be finite")
        if k[0] <= 0.0:
            raise DomainError("knots must be strictly positive")
        if np.any(np.diff(k) <= 0.0):
            raise DomainError("knots must be strictly increasing (duplicates are rejected)")
    return k


@dataclass(frozen=True, eq=False)
class Curve:
    """Element of H_alpha with piecewise-constant derivative.

    Parameters
    ----------
    f0 : float
        Value at time-to-maturity zero.
    knots : array_like
        Strictly increasing positive knots x_1 < ... < x_N. May be empty,
        which gives a constant curve.
    slopes : array_like
        Derivative d_i on (x_{i-1}, x_i]; the derivative vanishes beyond x_N.
    alpha_tilde : float
        Rate of the exponential weight of the ambient space.
    """

    f0: float
    knots: np.ndarray
    slopes: np.ndarray
    alpha_tilde: float = 1.0
    _nodal: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        knots = _as_knots(self.knots)
        slopes = np.array(self.slopes, dtype=float).ravel()
        if slopes.shape != knots.shape:
            raise DomainError(
                f"need one slope per knot, got {slopes.size} slopes for {knots.size} knots")
        if not np.all(np.isfinite(slopes)) or not math.isfinite(self.f0):
            raise DomainError("curve values must be finite")
        knots.setflags(write=False)
        slopes.setflags(write=False)
        object.__setattr__(self, "f0", float(self.f0))
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "alpha_tilde", _check_alpha(self.alpha_tilde))
        widths = np.diff(np.concatenate(([0.0], knots)))
        nodal = np.concatenate(([self.f0], self.f0 + np.cumsum(slopes * widths)))
        nodal.setflags(write=False)
        object.__setattr__(self, "_nodal", nodal)

    # construction helpers

    @classmethod
    def constant(cls, c, alpha_tilde=1.0):
        return cls(float(c), [], [], alpha_tilde)

    @classmethod
    def zero(cls, alpha_tilde=1.0):
        return cls(0.0, [], [], alpha_tilde)

    @classmethod
    def from_nodal(cls, knots, values, alpha_tilde=1.0):
        """Piecewise-linear curve through (0, values[0]), (x_i, values[i])."""
        knots = _as_knots(knots)
        values = np.asarray(values, dtype=float)
        if values.shape != (knots.size + 1,):
            raise DomainError("need a value at zero and at every knot")
        widths = np.diff(np.concatenate(([0.0], knots)))
        return cls(values[0], knots, np.diff(values) / widths, alpha_tilde)

    @classmethod
    def from_function(cls, fn, knots, alpha_tilde=1.0):
        """Interpolate fn at 0 and at the knots."""
        knots = _as_knots(knots)
        nodes = np.concatenate(([0.0], knots))
        return cls.from_nodal(knots, np.asarray(fn(nodes), dtype=float), alpha_tilde)

    @classmethod
    def from_coords(cls, coords, knots, alpha_tilde=1.0):
        """Inverse of :meth:`coords`."""
        knots = _as_knots(knots)
        coords = np.asarray(coords, dtype=float)
        A = cell_weights(knots, alpha_tilde)
        return cls(coords[0], knots, coords[1:] / np.sqrt(A), alpha_tilde)

    # basic data

    @property
    def weight(self):
        return AlphaWeight(self.alpha_tilde)

    @property
    def nodes(self):
        """Grid nodes including zero."""
        return np.concatenate(([0.0], self.knots))

    @property
    def nodal_values(self):
        """Curve values at :attr:`nodes`."""
        return self._nodal

    @property
    def last_knot(self):
        return float(self.knots[-1]) if self.knots.size else 0.0

    def __call__(self, x):
        return evaluate(self, x)

    def __repr__(self):
        return (f"Curve(f0={self.f0:.6g}, n_knots={self.knots.size}, "
                f"alpha_tilde={self.alpha_tilde:g})")

    def slopes_on(self, knots):
        """Derivative of this curve on the cells of a finer grid."""
        knots = np.asarray(knots, dtype=float)
        idx = np.searchsorted(self.knots, knots, side="left")
        padded = np.concatenate((self.slopes, [0.0]))
        return padded[idx]

    def on_grid(self, knots):
        """Same function re-expressed on the union of its knots and ``knots``."""
        grid = merge_knots(self.knots, knots)
        return Curve(self.f0, grid, self.slopes_on(grid), self.alpha_tilde)

    def coords(self, knots=None):
        """Coordinates in the orthonormal grid basis of ``knots``.

        The first coordinate is f0; the others are d_i sqrt(A_i). The
        Euclidean dot product of coordinates equals the H_alpha inner
        product. ``knots`` must contain the knots of the curve.
        """
        if knots is None:
            knots = self.knots
        knots = np.asarray(knots, dtype=float)
        if self.knots.size and not np.all(np.isin(self.knots, knots)):
            raise DomainError("coordinate grid must contain the knots of the curve")
        A = cell_weights(knots, self.alpha_tilde)
        return np.concatenate(([self.f0], self.slopes_on(knots) * np.sqrt(A)))

    # arithmetic

    def _binary(self, other, sign):
        if not isinstance(other, Curve):
            return NotImplemented
        _same_alpha(self, other)
        grid = merge_knots(self.knots, other.knots)
        slopes = self.slopes_on(grid) + sign * other.slopes_on(grid)
        return Curve(self.f0 + sign * other.f0, grid, slopes, self.alpha_tilde)

    def __add__(self, other):
        return self._binary(other, 1.0)

    def __sub__(self, other):
        return self._binary(other, -1.0)

    def __mul__(self, c):
        if isinstance(c, Curve):
            return NotImplemented
        c = float(c)
        return Curve(c * self.f0, self.knots, c * self.slopes, self.alpha_tilde)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def to_dict(self):
        return {
            "alpha_tilde": self.alpha_tilde,
            "f0": self.f0,
            "knots": [float(v) for v in self.knots],
            "slopes": [float(v) for v in self.slopes],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["f0"], d.get("knots", []), d.get("slopes", []), d["alpha_tilde"])

    def same_as(self, other):
        """Exact equality of all stored fields."""
        return (self.alpha_tilde == other.alpha_tilde and self.f0 == other.f0
                and np.array_equal(self.knots, other.knots)
                and np.array_equal(self.slopes, other.slopes))


def _same_alpha(f, g):
    if f.alpha_tilde != g.alpha_tilde:
        raise ConfigurationError(
            f"curves live in different spaces (alpha_tilde {f.alpha_tilde} vs {g.alpha_tilde})")


def merge_knots(*grids):
    """Sorted union of knot arrays."""
    arrays = [np.asarray(g, dtype=float).ravel() for g in grids if g is not None]
    if not arrays:
        return np.empty(0)
    out = np.unique(np.concatenate(arrays))
    return out[out > 0.0]


def refine_knots(knots, panels=8, max_width=None):
    """Split every cell of the grid (starting at 0) into equal panels.

    Parameters
    ----------
    knots : array_like
        Base grid, strictly increasing positive.
    panels : int
        Minimum number of sub-cells per cell.
    max_width : float, optional
        Additional cap on the sub-cell width.
    """
    knots = merge_knots(knots)
    if knots.size == 0:
        return knots
    left = np.concatenate(([0.0], knots[:-1]))
    widths = knots - left
    counts = np.full(knots.size, max(int(panels), 1))
    if max_width is not None:
        counts = np.maximum(counts, np.ceil(widths / max_width).astype(int))
    # round-off slivers between nearly equal knots are not subdivided
    counts[widths < 1e-10 * np.maximum(1.0, knots)] = 1
    pieces = [lo + (hi - lo) * np.arange(1, n + 1) / n
              for lo, hi, n in zip(left, knots, counts)]
    out = np.concatenate(pieces)
    out[np.cumsum(counts) - 1] = knots  # keep the base knots bit-exact
    return out


def inner_product(f, g):
    """Exact H_alpha inner product of two curves."""
    _same_alpha(f, g)
    grid = merge_knots(f.knots, g.knots)
    A = cell_weights(grid, f.alpha_tilde)
    return float(f.f0 * g.f0 + np.sum(f.slopes_on(grid) * g.slopes_on(grid) * A))


def norm(g):
    """H_alpha norm of a curve."""
    A = cell_weights(g.knots, g.alpha_tilde)
    # hypot rescales, so tiny or huge curves do not under- or overflow
    return math.hypot(g.f0, *(np.abs(g.slopes) * np.sqrt(A)).tolist())


def evaluate(g, x):
    """Value g(x); scalars in, float out, arrays in, arrays out."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(np.isnan(xa)):
        raise DomainError("curves are defined on x >= 0")
    out = np.interp(xa, g.nodes, g.nodal_values)
    if np.ndim(out) == 0:
        return float(out)
    return out


def h_curve(x, alpha_tilde=1.0, knots=None, tol=1e-8, refine=True):
    """Representer of point evaluation at x, projected onto a grid.

    The grid consists of ``knots`` below x, the point x itself and, when
    ``refine`` is set, a uniform refinement of width sqrt(24 tol / (5 alpha_tilde))
    so that point values of the result match h_x within ``tol``.
    For every curve g whose knots lie on that grid,
    <g, h_curve(x)> = g(x) up to round-off.

    Parameters
    ----------
    x : float
        Evaluation point, x >= 0.
    alpha_tilde : float
    knots : array_like, optional
        Grid on which the reproducing property must hold exactly.
    tol : float
        Pointwise accuracy target of the refinement.
    refine : bool
        Switch off to project onto ``knots`` and x only.
    """
    x = float(x)
    if x < 0.0:
        raise DomainError("h_curve needs x >= 0")
    a = _check_alpha(alpha_tilde)
    if x == 0.0:
        return Curve.constant(1.0, a)
    given = np.empty(0) if knots is None else np.asarray(knots, dtype=float)
    below = merge_knots(given[given < x], [x])
    if refine:
        below = refine_knots(below, panels=1, max_width=math.sqrt(4.8 * tol / a))
    # knots above x carry zero slope; keeping them leaves the grid intact
    base = merge_knots(below, given[given > x])
    A = cell_weights(base, a)
    widths = np.diff(np.concatenate(([0.0], base)))
    return Curve(1.0, base, np.where(base <= x, widths / A, 0.0), a)


def projected_representer(f0, cell_integrals, knots, alpha_tilde):
    """Grid curve whose slopes are alpha-weighted cell averages.

    ``cell_integrals[i]`` must hold int over cell i of alpha(y) phi'(y) for
    a function phi with phi(0) = f0. The result is the orthogonal
    projection of phi onto the curves on ``knots``.
    """
    A = cell_weights(knots, alpha_tilde)
    return Curve(f0, knots, np.asarray(cell_integrals, dtype=float) / A, alpha_tilde)


def shift(g, x):
    """Musiela shift (S_x g)(y) = g(x + y); exact."""
    x = float(x)
    if x < 0.0:
        raise DomainError("shift needs x >= 0")
    if x == 0.0:
        return g
    keep = g.knots > x
    knots, slopes = g.knots[keep] - x, g.slopes[keep]
    # knots one ulp apart can coincide after the subtraction; the
    # collapsed cell has zero width and is dropped
    if knots.size > 1 and np.any(np.diff(knots) <= 0.0):
        live = np.concatenate(([True], np.diff(knots) > 0.0))
        knots, slopes = knots[live], slopes[live]
    return Curve(evaluate(g, x), knots, slopes, g.alpha_tilde)


def exp_curve(g, panels=8):
    """Pointwise exponential, interpolated on a refinement of g's grid.

    Raises
    ------
    NumericRangeError
        If exp overflows double precision.
    """
    grid = refine_knots(g.knots, panels)
    vals = evaluate(g, np.concatenate(([0.0], grid)))
    if np.max(vals) > 709.0:
        raise NumericRangeError("exp of the curve overflows double precision")
    return Curve.from_nodal(grid, np.exp(vals), g.alpha_tilde)


def linear_combination(coeffs, curves):
    """sum_k coeffs[k] * curves[k] on the union grid."""
    curves = list(curves)
    if not curves:
        raise DomainError("need at least one curve")
    a = curves[0].alpha_tilde
    for c in curves[1:]:
        _same_alpha(curves[0], c)
    coeffs = np.asarray(coeffs, dtype=float)
    grid = merge_knots(*[c.knots for c in curves])
    f0 = float(np.dot(coeffs, [c.f0 for c in curves]))
    slopes = np.zeros(grid.size)
    for ck, c in zip(coeffs, curves):
        if ck != 0.0:
            slopes += ck * c.slopes_on(grid)
    return Curve(f0, grid, slopes, a)


class Basis:
    """Ordered orthonormal family e_1, ..., e_n in H_alpha.

    Parameters
    ----------
    elements : sequence of Curve
    check : bool
        Verify orthonormality within ``tol``.
    """

    def __init__(self, elements, check=True, tol=1e-10):
        self.elements = list(elements)
        if check and self.elements:
            G = gram_matrix(self.elements)
            err = np.max(np.abs(G - np.eye(len(self.elements))))
            if err > tol:
                raise DomainError(f"basis is not orthonormal (max Gram error {err:.3g})")

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, k):
        return self.elements[k]

    def __iter__(self):
        return iter(self.elements)

    def coefficients(self, g, n=None):
        n = len(self) if n is None else n
        return np.array([inner_product(g, e) for e in self.elements[:n]])


def gram_matrix(curves):
    """Matrix of pairwise inner products, computed on a common grid."""
    for c in curves:
        _same_alpha(curves[0], c)
    grid = merge_knots(*[c.knots for c in curves])
    X = np.array([c.coords(grid) for c in curves])
    return X @ X.T


def project(g, basis, n):
    """Truncated expansion sum_{k<=n} <g, e_k> e_k."""
    if not 1 <= n <= len(basis):
        raise DomainError(f"projection order {n} outside 1..{len(basis)}")
    coef = basis.coefficients(g, n)
    return linear_combination(coef, basis.elements[:n])


def gram_schmidt(curves, drop_tol=1e-12):
    """Orthonormalize curves under <.,.>_alpha (modified, two passes).

    Curves that are numerically dependent on earlier ones are dropped.
    """
    curves = list(curves)
    a = curves[0].alpha_tilde
    grid = merge_knots(*[c.knots for c in curves])
    X = np.array([c.coords(grid) for c in curves])
    out = []
    for v in X:
        scale = np.linalg.norm(v)
        w = v.copy()
        for _ in range(2):
            for q in out:
                w -= np.dot(q, w) * q
        nw = np.linalg.norm(w)
        if nw > drop_tol * max(scale, 1e-300):
            out.append(w / nw)
    return Basis([Curve.from_coords(q, grid, a) for q in out], check=False)


def grid_basis(knots, alpha_tilde=1.0):
    """Orthonormal basis of all curves on a grid.

    The constant 1 followed by one ramp per cell with slope 1/sqrt(A_i).
    """
    knots = _as_knots(knots)
    A = cell_weights(knots, alpha_tilde)
    out = [Curve.constant(1.0, alpha_tilde)]
    for i in range(knots.size):
        s = np.zeros(knots.size)
        s[i] = 1.0 / math.sqrt(A[i])
        out.append(Curve(0.0, knots, s, alpha_tilde))
    return Basis(out, check=False)
