"""Covariance operators on H_alpha and their two-curve block versions.

A covariance operator is stored by a finite eigen-expansion
Q u = sum_k lambda_k <e_k, u> e_k.  A block covariance couples two such
operators through the matrix C[k, m] = <Q12 e_k^(1), e_m^(2)>, so that in
eigen coordinates the joint covariance of (X1, X2) is

    [[diag(lambda1), C], [C^T, diag(lambda2)]].

The volatility operators sigma(s) = nu(s) (a Id + sum_j <., u_j> psi_j)
also live here since they are applied to eigenfunctions throughout.
"""

from dataclasses import dataclass, field

import numpy as np

from .curve_space import (
    Basis, Curve, evaluate, gram_schmidt, h_curve, inner_product,
    linear_combination, merge_knots, norm, shift,
)
from .errors import DomainError, InvalidBlockError, UnsupportedModelError
from .quadrature import time_integral

__all__ = [
    "CovOp", "BlockCov", "SigmaSpec", "BlockReport", "RegressionOperator",
    "apply_cov", "sqrt_cov", "pseudo_inverse", "validate_block", "cross_cov_field",
    "regression_operator", "conditional_expectation", "qt_block",
]

PINV_CUTOFF = 1e-12
DEFAULT_RANK = 16


class CovOp:
    """Positive semidefinite trace-class operator by eigenpairs.

    Parameters
    ----------
    lambdas : array_like
        Eigenvalues; sorted descending on construction.
    curves : sequence of Curve
        Orthonormal eigenfunctions.
    check : bool
        Reject negative eigenvalues and non-orthonormal eigenfunctions.
    """

    def __init__(self, lambdas, curves, check=True):
        lam = np.asarray(lambdas, dtype=float).ravel()
        curves = list(curves)
        if lam.size != len(curves):
            raise DomainError("need one eigenfunction per eigenvalue")
        if not np.all(np.isfinite(lam)):
            raise DomainError("eigenvalues must be finite")
        order = np.argsort(-lam, kind="stable")
        self.lambdas = lam[order]
        self.lambdas.setflags(write=False)
        self.basis = Basis([curves[i] for i in order], check=check)
        if check and np.any(self.lambdas < 0.0):
            raise DomainError("covariance eigenvalues must be nonnegative")
        self.alpha_tilde = curves[0].alpha_tilde if curves else None

    @classmethod
    def from_curves(cls, lambdas, curves):
        """Orthonormalize ``curves`` by Gram-Schmidt and attach ``lambdas``."""
        basis = gram_schmidt(curves)
        if len(basis) != len(curves):
            raise DomainError("eigenfunction candidates are linearly dependent")
        return cls(lambdas, basis.elements)

    @property
    def rank(self):
        return self.lambdas.size

    @property
    def eigenfunctions(self):
        return self.basis.elements

    def __len__(self):
        return self.rank

    @property
    def trace(self):
        """sum lambda_k, which equals ||Q^{1/2}||_HS^2."""
        return float(np.sum(self.lambdas))

    @property
    def knots(self):
        return merge_knots(*[e.knots for e in self.eigenfunctions])

    def apply(self, g):
        coef = self.lambdas * self.basis.coefficients(g)
        return linear_combination(coef, self.eigenfunctions)

    def quad_form(self, g):
        """<Q g, g>."""
        c = self.basis.coefficients(g)
        return float(np.sum(self.lambdas * c * c))

    def eigen_at(self, x):
        """Matrix E[k, i] = e_k(x_i)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.array([evaluate(e, x) for e in self.eigenfunctions])

    def truncate(self, n=DEFAULT_RANK):
        """Keep the n leading eigenpairs; see :meth:`truncation_error`."""
        n = min(n, self.rank)
        return CovOp(self.lambdas[:n], self.eigenfunctions[:n], check=False)

    def truncation_error(self, n=DEFAULT_RANK):
        """Trace of the discarded part, sum_{k>n} lambda_k."""
        return float(np.sum(self.lambdas[n:]))

    def spectral(self, fn):
        """Operator fn(Q) by spectral calculus on the stored eigenpairs."""
        return CovOp(fn(self.lambdas), self.eigenfunctions, check=False)

    def to_dict(self):
        return {"lambdas": [float(v) for v in self.lambdas],
                "curves": [e.to_dict() for e in self.eigenfunctions]}

    @classmethod
    def from_dict(cls, d, check=True):
        return cls(d["lambdas"], [Curve.from_dict(c) for c in d["curves"]], check=check)


def apply_cov(Q, g):
    """Q g = sum_k lambda_k <e_k, g> e_k."""
    return Q.apply(g)


def sqrt_cov(Q):
    """Q^{1/2}: same eigenfunctions, eigenvalues sqrt(lambda_k)."""
    return Q.spectral(lambda lam: np.sqrt(np.maximum(lam, 0.0)))


def _pinv_values(lam):
    lam = np.asarray(lam, dtype=float)
    top = np.max(lam) if lam.size else 0.0
    out = np.zeros_like(lam)
    if top > 0.0:
        keep = lam > PINV_CUTOFF * top
        out[keep] = 1.0 / lam[keep]
    return out


def pseudo_inverse(Q):
    """Moore-Penrose inverse; eigenvalues below 1e-12 lambda_max map to 0."""
    return Q.spectral(_pinv_values)


def _kernel_mask(lam):
    top = np.max(lam) if lam.size else 0.0
    return lam <= PINV_CUTOFF * top if top > 0 else np.ones(lam.shape, bool)


@dataclass
class SigmaSpec:
    """Volatility operator sigma(s) = nu(s) (a Id + sum_j <., u_j> psi_j).

    Parameters
    ----------
    nu : float or callable
        Deterministic scalar time factor nu(s).
    identity_scale : float
        Coefficient a of the identity part.
    rank_terms : list of (Curve, Curve)
        Pairs (psi_j, u_j) of the finite-rank part.
    """

    nu: object = 1.0
    identity_scale: float = 1.0
    rank_terms: list = field(default_factory=list)

    @classmethod
    def identity(cls, scale=1.0, nu=1.0):
        return cls(nu, scale, [])

    @classmethod
    def zero(cls):
        return cls(0.0, 0.0, [])

    def nu_at(self, s):
        """nu evaluated on an array of times."""
        s = np.asarray(s, dtype=float)
        if callable(self.nu):
            return np.broadcast_to(np.asarray(self.nu(s), dtype=float), s.shape).astype(float)
        return np.full(s.shape, float(self.nu))

    def apply(self, h):
        """Time-free part a h + sum_j <h, u_j> psi_j."""
        out = h * self.identity_scale
        for psi, u in self.rank_terms:
            out = out + psi * inner_product(h, u)
        return out

    def adjoint(self, h):
        out = h * self.identity_scale
        for psi, u in self.rank_terms:
            out = out + u * inner_product(h, psi)
        return out

    @property
    def op_norm_bound(self):
        """|a| + sum_j ||psi_j|| ||u_j||, for the time-free part."""
        return abs(self.identity_scale) + sum(norm(p) * norm(u) for p, u in self.rank_terms)

    def nu_max(self, t0, t1, n=257):
        """max |nu| on [t0, t1] (sampled for callables)."""
        if not callable(self.nu):
            return abs(float(self.nu))
        return float(np.max(np.abs(self.nu_at(np.linspace(t0, t1, n)))))

    @property
    def is_identity(self):
        return not self.rank_terms and not callable(self.nu) and float(self.nu) == 1.0 \
            and self.identity_scale == 1.0

    def noise_curves(self, Q):
        """sigma applied to each eigenfunction of Q (time factor excluded)."""
        return [self.apply(e) for e in Q.eigenfunctions]

    def to_dict(self):
        if callable(self.nu):
            raise DomainError("a callable time factor cannot be serialized")
        return {"nu": float(self.nu), "identity_scale": self.identity_scale,
                "rank_terms": [{"psi": p.to_dict(), "u": u.to_dict()} for p, u in self.rank_terms]}

    @classmethod
    def from_dict(cls, d):
        nu = d.get("nu", 1.0)
        if isinstance(nu, dict):
            # piecewise-linear table {"times": [...], "values": [...]}
            ts = np.asarray(nu["times"], dtype=float)
            vs = np.asarray(nu["values"], dtype=float)
            nu = _TableNu(ts, vs)
        terms = [(Curve.from_dict(t["psi"]), Curve.from_dict(t["u"])) for t in d.get("rank_terms", [])]
        return cls(nu, float(d.get("identity_scale", 1.0)), terms)


class _TableNu:
    def __init__(self, ts, vs):
        self.ts, self.vs = ts, vs

    def __call__(self, s):
        return np.interp(s, self.ts, self.vs)


@dataclass
class BlockCov:
    """Joint covariance of two H_alpha valued variables.

    Parameters
    ----------
    Q1, Q2 : CovOp
        Marginal covariances.
    C : ndarray, shape (n1, n2)
        Cross block, C[k, m] = <Q12 e_k^(1), e_m^(2)>.
    """

    Q1: CovOp
    Q2: CovOp
    C: np.ndarray

    def __post_init__(self):
        self.C = np.asarray(self.C, dtype=float)
        if self.C.shape != (self.Q1.rank, self.Q2.rank):
            raise DomainError(f"cross block must have shape {(self.Q1.rank, self.Q2.rank)}")

    @property
    def matrix(self):
        """Assembled joint covariance in eigen coordinates."""
        return np.block([[np.diag(self.Q1.lambdas), self.C],
                         [self.C.T, np.diag(self.Q2.lambdas)]])

    def cross_apply(self, u):
        """Q12 u, an element of the second space."""
        c1 = self.Q1.basis.coefficients(u)
        return linear_combination(self.C.T @ c1, self.Q2.eigenfunctions)

    def to_dict(self):
        return {"q1": self.Q1.to_dict(), "q2": self.Q2.to_dict(), "c_matrix": self.C.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(CovOp.from_dict(d["q1"], check=False), CovOp.from_dict(d["q2"], check=False),
                   np.asarray(d["c_matrix"], dtype=float))


@dataclass
class BlockReport:
    """Outcome of :func:`validate_block`."""

    valid: bool
    spectral_norm: float
    min_eig: float
    reasons: list = field(default_factory=list)

    def to_dict(self):
        return {"valid": bool(self.valid), "spectral_norm": float(self.spectral_norm),
                "min_eig": float(self.min_eig), "reasons": list(self.reasons)}


def validate_block(B, tol=1e-10):
    """Check that a block covariance is positive semidefinite.

    Accepts iff both marginals are PSD, the cross block vanishes on kernel
    modes of either marginal, and the whitened cross matrix
    C[k, m] / sqrt(lambda1_k lambda2_m) has spectral norm at most 1 + tol.
    """
    reasons = []
    l1, l2 = np.asarray(B.Q1.lambdas), np.asarray(B.Q2.lambdas)
    for name, lam in (("Q1", l1), ("Q2", l2)):
        if lam.size and np.min(lam) < -PINV_CUTOFF * max(np.max(np.abs(lam)), 1e-300):
            reasons.append(f"marginal {name} is not positive semidefinite (eigenvalue {np.min(lam):.3g})")
    k1, k2 = _kernel_mask(l1), _kernel_mask(l2)
    cmax = max(np.max(l1, initial=0.0), np.max(l2, initial=0.0))
    ctol = PINV_CUTOFF * max(cmax, 1e-300)
    if np.any(np.abs(B.C[k1, :]) > ctol):
        reasons.append("range condition: cross block acts on the kernel of Q1")
    if np.any(np.abs(B.C[:, k2]) > ctol):
        reasons.append("range condition: cross block reaches outside the range of Q2")
    r1 = np.where(k1, 0.0, 1.0 / np.sqrt(np.where(k1, 1.0, np.abs(l1))))
    r2 = np.where(k2, 0.0, 1.0 / np.sqrt(np.where(k2, 1.0, np.abs(l2))))
    M = r1[:, None] * B.C * r2[None, :]
    snorm = float(np.linalg.norm(M, 2)) if M.size else 0.0
    if snorm > 1.0 + tol:
        reasons.append(f"contraction condition fails: whitened cross block has norm {snorm:.6g} > 1")
    min_eig = float(np.min(np.linalg.eigvalsh(B.matrix)))
    return BlockReport(not reasons, snorm, min_eig, reasons)


def cross_cov_field(B, t, x, y):
    """t <Q12 h_x, h_y> = t sum_{k,m} C[k, m] e_k^(1)(x) e_m^(2)(y)."""
    if t < 0:
        raise DomainError("cross_cov_field needs t >= 0")
    E1 = B.Q1.eigen_at(x)
    E2 = B.Q2.eigen_at(y)
    out = t * np.einsum("ki,km,mi->i", E1, B.C, E2) if np.ndim(x) else \
        t * float(E1[:, 0] @ B.C @ E2[:, 0])
    return out


@dataclass
class RegressionOperator:
    """Regression of X2 on X1 in eigen coordinates.

    Attributes
    ----------
    matrix : ndarray, shape (n2, n1)
        B with (B c)_m = sum_k C[k, m] c_k / lambda1_k.
    residual_cov : ndarray, shape (n2, n2)
        Covariance of Z = X2 - B X1, diag(lambda2) - C^T Q1^+ C.
    block : BlockCov
    """

    matrix: np.ndarray
    residual_cov: np.ndarray
    block: BlockCov

    def apply(self, x1):
        """B x1 for a curve x1 of the first space."""
        c1 = self.block.Q1.basis.coefficients(x1)
        return linear_combination(self.matrix @ c1, self.block.Q2.eigenfunctions)


def regression_operator(B, tol=1e-10):
    """Regression operator B = Q12 Q1^+ and the residual covariance.

    Raises
    ------
    InvalidBlockError
        If the cross block acts on the kernel of Q1 (the range of Q12^* is
        not inside the range of Q1), or the residual covariance fails to be
        positive semidefinite.
    """
    l1 = np.asarray(B.Q1.lambdas)
    k1 = _kernel_mask(l1)
    ctol = PINV_CUTOFF * max(np.max(l1, initial=0.0), np.max(B.Q2.lambdas, initial=0.0), 1e-300)
    if np.any(np.abs(B.C[k1, :]) > ctol):
        raise InvalidBlockError(
            "range condition violated: the range of Q12^* must lie in the range of Q1 "
            "(necessary condition on the cross block)")
    inv1 = _pinv_values(l1)
    Bm = B.C.T * inv1[None, :]
    QZ = np.diag(B.Q2.lambdas) - Bm @ B.C
    QZ = 0.5 * (QZ + QZ.T)
    ev = np.linalg.eigvalsh(QZ) if QZ.size else np.zeros(0)
    if ev.size and np.min(ev) < -tol * max(1.0, np.max(B.Q2.lambdas)):
        raise InvalidBlockError(
            f"residual covariance is not positive semidefinite (eigenvalue {np.min(ev):.3g}); "
            "the block is not a valid covariance")
    return RegressionOperator(Bm, QZ, B)


def conditional_expectation(B, x1, gaussian=True):
    """E[X2 | X1 = x1] = B x1 in the jointly Gaussian model."""
    if not gaussian:
        raise UnsupportedModelError(
            "conditional expectation by the regression operator is only available for Gaussian blocks")
    return regression_operator(B).apply(x1)


def _dual_shift_coeffs(s, x, grid, Q1, Q2, alpha):
    """<S_s^* h_x, e_k> for both eigenbases via the general dual."""
    from .delivery_operators import dual_general

    hx = h_curve(x, alpha, knots=merge_knots(grid, grid - s), refine=False)
    dual = dual_general(lambda f: shift(f, s), hx, knots=grid)
    c1 = np.array([inner_product(dual, e) for e in Q1.eigenfunctions])
    c2 = np.array([inner_product(dual, e) for e in Q2.eigenfunctions])
    return c1, c2


def qt_block(B, t, probe_x, probe_y, route="dual", n=32):
    """Entries <int_0^t S_s Q_ij S_s^* ds h_x, h_y> of the accumulated block.

    Returns a 2x2 array: [0, 0] with Q1, [1, 1] with Q2, [1, 0] the cross
    covariance Cov(g1(t, x), g2(t, y)) and [0, 1] = Cov(g2(t, x), g1(t, y)).

    Parameters
    ----------
    route : {'dual', 'point'}
        'dual' builds S_s^* h_x with :func:`dual_general` and takes inner
        products with the eigenfunctions; 'point' uses
        <S_s^* h_x, e> = e(x + s) directly.
    """
    if t <= 0:
        raise DomainError("qt_block needs t > 0")
    Q1, Q2, C = B.Q1, B.Q2, B.C
    grid = merge_knots(Q1.knots, Q2.knots)
    alpha = Q1.alpha_tilde
    bps = np.concatenate((grid - probe_x, grid - probe_y))

    def integrand(svec):
        out = np.empty((svec.size, 2, 2))
        for i, s in enumerate(svec):
            if route == "dual":
                a1, a2 = _dual_shift_coeffs(s, probe_x, grid, Q1, Q2, alpha)
                b1, b2 = _dual_shift_coeffs(s, probe_y, grid, Q1, Q2, alpha)
            else:
                a1 = Q1.eigen_at(probe_x + s)[:, 0]
                a2 = Q2.eigen_at(probe_x + s)[:, 0]
                b1 = Q1.eigen_at(probe_y + s)[:, 0]
                b2 = Q2.eigen_at(probe_y + s)[:, 0]
            out[i, 0, 0] = np.sum(Q1.lambdas * a1 * b1)
            out[i, 1, 1] = np.sum(Q2.lambdas * a2 * b2)
            out[i, 1, 0] = a1 @ C @ b2
            out[i, 0, 1] = b1 @ C @ a2
        return out

    return time_integral(integrand, 0.0, t, bps, n=n, check=False)
