"""Swap quotes in, curves out: quote parsing, curve fitting and curve files.

Curves are fitted in the orthonormal coordinates of the grid basis, where
the squared norm of the derivative part, int alpha (g')^2, is the squared
length of the slope coordinates.  Swap prices are linear in these
coordinates, so a fit is one linear least-squares solve.
"""

import csv
import io
import json
import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from .curve_space import Curve, grid_basis, merge_knots, norm, refine_knots
from .delivery_operators import ContractSpec, WeightSpec, eval_D_at, swap_price
from .errors import DomainError, QuoteParseError, SchemaError

__all__ = ["Quote", "QuoteSet", "parse_quotes", "FitReport", "fit_curve", "default_fit_knots",
           "save_curve", "load_curve", "curve_to_json", "curve_from_json", "quotes_from_curve",
           "CURVE_SCHEMA"]

CURVE_SCHEMA = "energyfwd.curve/1"
_STYLES = {"uniform": "uniform", "forward": "uniform", "futures": "futures", "unit": "unit"}


@dataclass(frozen=True)
class Quote:
    """One swap quote: delivery [T1, T2] priced at time t."""

    t: float
    T1: float
    T2: float
    style: str
    price: float
    r: float = None

    @property
    def contract(self):
        return ContractSpec(self.T1, self.T2, WeightSpec(self.style, self.T2 - self.T1, self.r))


@dataclass
class QuoteSet:
    quotes: list = field(default_factory=list)

    def __post_init__(self):
        ts = {q.t for q in self.quotes}
        if len(ts) > 1:
            raise DomainError(f"quote set mixes valuation times {sorted(ts)}")

    def __len__(self):
        return len(self.quotes)

    def __iter__(self):
        return iter(self.quotes)

    @property
    def t(self):
        return self.quotes[0].t if self.quotes else 0.0

    @property
    def prices(self):
        return np.array([q.price for q in self.quotes], dtype=float)

    @property
    def contracts(self):
        return [q.contract for q in self.quotes]


def _open_text(source):
    if hasattr(source, "read"):
        return source, False
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        return open(source, newline=""), True
    if isinstance(source, str) and "\n" in source:
        return io.StringIO(source), False
    raise DomainError(f"quote file not found: {source}")


def _number(row, key, line, required=True):
    raw = (row.get(key) or "").strip()
    if not raw:
        if required:
            raise QuoteParseError(f"missing value for {key!r}", line)
        return None
    try:
        v = float(raw)
    except ValueError:
        raise QuoteParseError(f"{key}={raw!r} is not a number", line) from None
    if not math.isfinite(v):
        raise QuoteParseError(f"{key}={raw!r} is not finite", line)
    return v


def parse_quotes(source):
    """Read a CSV with header t,T1,T2,style,r,price (r optional).

    ``style`` is one of uniform (alias forward), futures (needs r) or unit.

    Raises
    ------
    QuoteParseError
        With the offending line number, for malformed rows, T2 <= T1,
        mixed valuation times or unknown styles.
    """
    fh, close = _open_text(source)
    try:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [k for k in ("t", "T1", "T2", "style", "price") if k not in header]
        if missing:
            raise QuoteParseError(f"header lacks columns {missing}", 1)
        reader.fieldnames = header
        quotes = []
        for row in reader:
            line = reader.line_num
            if not any((v or "").strip() for v in row.values() if isinstance(v, str)):
                continue
            t = _number(row, "t", line)
            T1, T2 = _number(row, "T1", line), _number(row, "T2", line)
            price = _number(row, "price", line)
            r = _number(row, "r", line, required=False) if "r" in header else None
            style = (row.get("style") or "").strip().lower()
            if style not in _STYLES:
                raise QuoteParseError(f"unknown style {style!r}", line)
            style = _STYLES[style]
            if not T2 > T1:
                raise QuoteParseError(f"rejected row: T2={T2} must exceed T1={T1}", line)
            if T1 < t:
                raise QuoteParseError(f"rejected row: delivery start T1={T1} before valuation time t={t}", line)
            if style == "futures" and r is None:
                raise QuoteParseError("futures style needs a rate r", line)
            if quotes and t != quotes[0].t:
                raise QuoteParseError(f"valuation time {t} differs from {quotes[0].t}", line)
            quotes.append(Quote(t, T1, T2, style, price, r if style == "futures" else None))
        return QuoteSet(quotes)
    finally:
        if close:
            fh.close()


def write_quotes(quotes, path):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t", "T1", "T2", "style", "r", "price"])
        for q in quotes:
            # repr of a Python float round-trips exactly
            wr.writerow([repr(float(q.t)), repr(float(q.T1)), repr(float(q.T2)), q.style,
                         "" if q.r is None else repr(float(q.r)), repr(float(q.price))])


def default_fit_knots(quotes, fill=4):
    """Delivery boundaries T1 - t, T2 - t, each gap split into ``fill`` cells."""
    t = quotes.t
    base = merge_knots([q.T1 - t for q in quotes], [q.T2 - t for q in quotes])
    return refine_knots(base, fill)


@dataclass
class FitReport:
    residuals: np.ndarray
    rank: int
    n_knots: int
    smoothness: float
    norm: float
    exact: bool

    @property
    def max_abs_residual(self):
        return float(np.max(np.abs(self.residuals))) if self.residuals.size else 0.0

    def to_dict(self):
        return {"residuals": [float(v) for v in self.residuals], "max_abs_residual": self.max_abs_residual,
                "rank": self.rank, "n_knots": self.n_knots, "smoothness": self.smoothness,
                "norm": self.norm, "exact": self.exact}


def _design(quotes, knots, alpha_tilde):
    basis = grid_basis(knots, alpha_tilde)
    t = quotes.t
    A = np.empty((len(quotes), len(basis)))
    for i, q in enumerate(quotes):
        w = q.contract.weight
        A[i] = [eval_D_at(w, e, q.T1 - t) for e in basis]
    return A


def fit_curve(quotes, knots=None, smoothness=0.0, alpha_tilde=1.0, fill=4):
    """Curve minimizing sum (swap_price - quote)^2 + smoothness int alpha (g')^2.

    With smoothness = 0 the limit of this problem is solved: among all
    curves on the grid that reprice the quotes exactly (in the least
    squares sense when that is impossible), the one with the smallest
    int alpha (g')^2.  A single flat quote therefore gives a constant.

    Returns
    -------
    Curve, FitReport
    """
    if len(quotes) == 0:
        raise DomainError("cannot fit a curve to an empty quote set")
    if smoothness < 0:
        raise DomainError("smoothness weight must be nonnegative")
    knots = default_fit_knots(quotes, fill) if knots is None else merge_knots(knots)
    A = _design(quotes, knots, alpha_tilde)
    p = quotes.prices
    rank = int(np.linalg.matrix_rank(A))
    if smoothness > 0:
        P = np.sqrt(smoothness) * np.eye(A.shape[1])[1:]
        c, *_ = np.linalg.lstsq(np.vstack([A, P]), np.concatenate([p, np.zeros(P.shape[0])]), rcond=None)
    else:
        # limit of the penalized problem: f0 is free, the slope part has
        # minimum norm among least-squares solutions
        a0, A1 = A[:, 0], A[:, 1:]
        proj = np.eye(len(p)) - np.outer(a0, a0) / np.dot(a0, a0)
        s, *_ = np.linalg.lstsq(proj @ A1, proj @ p, rcond=None)
        f0 = np.dot(a0, p - A1 @ s) / np.dot(a0, a0)
        c = np.concatenate(([f0], s))
        if rank < len(quotes):
            warnings.warn(f"quotes are linearly dependent (rank {rank} < {len(quotes)}); "
                          "returning the minimum-norm least-squares curve", RuntimeWarning, stacklevel=2)
    g = Curve.from_coords(c, knots, alpha_tilde)
    res = np.array([swap_price(g, q.contract, q.t) - q.price for q in quotes])
    return g, FitReport(res, rank, knots.size, float(smoothness), norm(g), smoothness == 0 and rank == len(quotes))


def quotes_from_curve(g, rows, t=0.0):
    """Exact quotes of g for rows (T1, T2, style[, r])."""
    out = []
    for row in rows:
        T1, T2, style = float(row[0]), float(row[1]), row[2]
        r = float(row[3]) if len(row) > 3 and row[3] is not None else None
        q = Quote(float(t), T1, T2, style, 0.0, r)
        out.append(Quote(float(t), T1, T2, style, float(swap_price(g, q.contract, t)), r))
    return QuoteSet(out)


def curve_to_json(g):
    return {"schema": CURVE_SCHEMA, **g.to_dict()}


def curve_from_json(d):
    """Curve from a JSON object; a ``schema`` field, when present, must match."""
    if not isinstance(d, dict):
        raise SchemaError("curve JSON must be an object")
    schema = d.get("schema", CURVE_SCHEMA)
    if schema != CURVE_SCHEMA:
        raise SchemaError(f"unsupported curve schema {schema!r}, expected {CURVE_SCHEMA!r}", schema)
    for key in ("alpha_tilde", "f0", "knots", "slopes"):
        if key not in d:
            raise SchemaError(f"curve JSON lacks field {key!r}", CURVE_SCHEMA)
    try:
        return Curve(float(d["f0"]), np.asarray(d["knots"], dtype=float),
                     np.asarray(d["slopes"], dtype=float), float(d["alpha_tilde"]))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid curve field: {exc}", CURVE_SCHEMA) from exc


def save_curve(g, path):
    """Write g as JSON; floats are written with round-trip precision."""
    with open(path, "w") as fh:
        json.dump(curve_to_json(g), fh, indent=1)


def load_curve(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
    return curve_from_json(d)
