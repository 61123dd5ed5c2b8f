"""Option pricing on delivery-period swaps and fixed-delivery forwards.

In the arithmetic Gaussian model the swap price at exercise is
F(tau) = m(g) + xi X with X standard normal, where m(g) = (D g)(T1 - t) and

    xi^2 = int_t^tau sum_k lambda_k a_k(s)^2 ds,   a_k(s) = nu(s) (D sigma e_k)(T1 - s).

Everything here reduces to laws of this kind (one or two dimensional) or,
for NIG noise, to the cumulant of int a(s) dL(s).
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .curve_space import AlphaWeight, evaluate
from .delivery_operators import ContractSpec, eval_D_at, op_norm_bound, swap_price
from .errors import DomainError, InvalidBlockError, ParameterError, UnsupportedModelError
from .covariance import validate_block
from .quadrature import expect_normal, expect_normal_2d, panel_nodes, time_integral

__all__ = [
    "Call", "Put", "TablePayoff", "ConstantPayoff", "Spread", "PricingRequest",
    "GaussianLaw1D", "GaussianLaw2D", "m_of_g", "xi_squared", "gaussian_law",
    "price_call_gaussian", "price_put_gaussian", "price_european_gaussian",
    "delta_gateaux", "calendar_law", "price_calendar_spread", "log_forward_variance",
    "black76", "price_call_black76", "nig_cumulant", "nig_call_curve", "price_call_nig",
    "sigma12_integral", "margrabe_variance", "price_margrabe", "quanto_law",
    "price_quanto", "lipschitz_certificate",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
NEG_VAR_TOL = 1e-12


# payoffs: callables on arrays with the list of kinks and a Lipschitz constant

@dataclass(frozen=True)
class Call:
    K: float

    def __call__(self, x):
        return np.maximum(np.asarray(x, dtype=float) - self.K, 0.0)

    @property
    def kinks(self):
        return (self.K,)

    lipschitz = 1.0


@dataclass(frozen=True)
class Put:
    K: float

    def __call__(self, x):
        return np.maximum(self.K - np.asarray(x, dtype=float), 0.0)

    @property
    def kinks(self):
        return (self.K,)

    lipschitz = 1.0


@dataclass(frozen=True)
class ConstantPayoff:
    c: float = 1.0

    def __call__(self, x):
        return np.full(np.shape(x), float(self.c))

    kinks = ()
    lipschitz = 0.0


@dataclass(frozen=True)
class TablePayoff:
    """Piecewise-linear payoff through (xs, ys), extended linearly.

    Linear extension keeps the payoff of linear growth, which is what the
    pricing formulas need.
    """

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        if xs.size < 2 or np.any(np.diff(xs) <= 0):
            raise DomainError("payoff table needs at least two increasing abscissae")
        if len(self.ys) != xs.size:
            raise DomainError("payoff table needs one value per abscissa")
        object.__setattr__(self, "xs", tuple(float(v) for v in self.xs))
        object.__setattr__(self, "ys", tuple(float(v) for v in self.ys))

    def __call__(self, x):
        xs, ys = np.asarray(self.xs), np.asarray(self.ys)
        x = np.asarray(x, dtype=float)
        lo = ys[0] + (x - xs[0]) * (ys[1] - ys[0]) / (xs[1] - xs[0])
        hi = ys[-1] + (x - xs[-1]) * (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        return np.where(x < xs[0], lo, np.where(x > xs[-1], hi, np.interp(x, xs, ys)))

    @property
    def kinks(self):
        return self.xs[1:-1] if len(self.xs) > 2 else ()

    @property
    def lipschitz(self):
        return float(np.max(np.abs(np.diff(self.ys) / np.diff(self.xs))))


@dataclass(frozen=True)
class Spread:
    """Two-argument payoff max(x - y - K, 0)."""

    K: float = 0.0

    def __call__(self, x, y):
        return np.maximum(np.asarray(x) - np.asarray(y) - self.K, 0.0)

    def y_kinks(self, x):
        return (x - self.K,)


def _kinks(p):
    return tuple(getattr(p, "kinks", ()))


@dataclass
class PricingRequest:
    """Contract(s), times, rate and payoff of a pricing call.

    Parameters
    ----------
    contract : ContractSpec
    t, tau : float
        Valuation and exercise time, t <= tau <= T1.
    r : float
        Continuously compounded rate used for discounting exp(-r (tau - t)).
    payoff : callable, optional
        Defaults to Call(K).
    K : float, optional
    contract2 : ContractSpec, optional
        Second contract for spreads and quantos.
    """

    contract: ContractSpec
    t: float = 0.0
    tau: float = 0.0
    r: float = 0.0
    payoff: object = None
    K: float = None
    contract2: ContractSpec = None

    def __post_init__(self):
        if self.payoff is None:
            if self.K is None:
                raise DomainError("pricing request needs a payoff or a strike K")
            self.payoff = Call(self.K)
        T1 = self.contract.T1 if self.contract2 is None else min(self.contract.T1, self.contract2.T1)
        if not self.t <= self.tau:
            raise DomainError(f"need t <= tau, got t={self.t}, tau={self.tau}")
        if self.tau > T1 + 1e-12:
            raise DomainError(f"exercise time tau={self.tau} must satisfy tau <= T1={T1}")

    @property
    def disc(self):
        return math.exp(-self.r * (self.tau - self.t))


@dataclass
class GaussianLaw1D:
    mean: float
    var: float

    def __post_init__(self):
        self.var = _clamp_var(self.var)

    @property
    def sd(self):
        return math.sqrt(self.var)

    def expect(self, fn, kinks=(), n=64):
        return expect_normal(fn, self.mean, self.sd, kinks, n)


@dataclass
class GaussianLaw2D:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        c = np.asarray(self.cov, dtype=float)
        c = 0.5 * (c + c.T)
        w, V = np.linalg.eigh(c)
        if np.min(w) < -NEG_VAR_TOL * max(1.0, np.max(np.abs(w))):
            warnings.warn(f"2x2 covariance has eigenvalue {np.min(w):.3g}; clamped at 0",
                          RuntimeWarning, stacklevel=3)
        if np.min(w) < 0:
            c = (V * np.maximum(w, 0.0)) @ V.T
        self.cov = c

    @property
    def corr(self):
        d = np.sqrt(np.diag(self.cov))
        return float(self.cov[0, 1] / (d[0] * d[1])) if d[0] > 0 and d[1] > 0 else 0.0

    def expect(self, fn, x_kinks=(), y_kinks=None, n=64):
        return expect_normal_2d(fn, self.mean, self.cov, x_kinks, y_kinks, n)


def _clamp_var(v):
    v = float(v)
    if v < 0.0:
        if v < -NEG_VAR_TOL:
            warnings.warn(f"negative variance {v:.3g} from quadrature; clamped at 0",
                          RuntimeWarning, stacklevel=3)
        return 0.0
    return v


# noise loadings a_k(s) of the delivery functional and of point evaluation

def _swap_loadings(sigma, Q, contract, s):
    """Array (len(s), K): nu(s) (D sigma e_k)(T1 - s)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    nu = sigma.nu_at(s)
    x = np.maximum(contract.T1 - s, 0.0)
    cols = [eval_D_at(contract.weight, phi, x) for phi in sigma.noise_curves(Q)]
    return nu[:, None] * np.array(cols).reshape(len(cols), s.size).T


def _point_loadings(sigma, Q, T, s):
    """Array (len(s), K): nu(s) (sigma e_k)(T - s)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    nu = sigma.nu_at(s)
    x = np.maximum(T - s, 0.0)
    cols = [evaluate(phi, x) for phi in sigma.noise_curves(Q)]
    return nu[:, None] * np.array(cols).reshape(len(cols), s.size).T


def _nu_breaks(sigma):
    ts = getattr(sigma.nu, "ts", None)
    return () if ts is None else tuple(ts)


def _swap_breaks(sigma, Q, contract):
    kn = np.concatenate([phi.knots for phi in sigma.noise_curves(Q)] + [np.empty(0)])
    return np.concatenate((contract.T1 - kn, contract.T1 + contract.ell - kn, _nu_breaks(sigma)))


def _point_breaks(sigma, Q, T):
    kn = np.concatenate([phi.knots for phi in sigma.noise_curves(Q)] + [np.empty(0)])
    return np.concatenate((T - kn, _nu_breaks(sigma)))


def m_of_g(g, contract, t):
    """Forward swap price (D g)(T1 - t)."""
    return swap_price(g, contract, t)


def xi_squared(sigma, Q, contract, t, tau, n=32):
    """Variance int_t^tau sum_k lambda_k a_k(s)^2 ds of the swap at exercise."""
    if not t <= tau <= contract.T1 + 1e-12:
        raise DomainError(f"need t <= tau <= T1, got t={t}, tau={tau}, T1={contract.T1}")
    lam = np.asarray(Q.lambdas)

    def integrand(s):
        a = _swap_loadings(sigma, Q, contract, s)
        return a * a @ lam

    return _clamp_var(time_integral(integrand, t, tau, _swap_breaks(sigma, Q, contract), n=n))


def gaussian_law(g, sigma, Q, req):
    """Law of F(tau) = m(g) + xi X."""
    return GaussianLaw1D(m_of_g(g, req.contract, req.t),
                         xi_squared(sigma, Q, req.contract, req.t, req.tau))


def price_call_gaussian(m, xi, K, disc=1.0):
    """disc [xi phi(d) + (m - K) Phi(d)], d = (m - K) / xi."""
    if not xi > 0.0:
        return disc * max(m - K, 0.0)
    d = (m - K) / xi
    return disc * (xi * math.exp(-0.5 * d * d) / _SQRT_2PI + (m - K) * float(ndtr(d)))


def price_put_gaussian(m, xi, K, disc=1.0):
    """disc [xi phi(d) - (m - K) Phi(-d)], d = (m - K) / xi."""
    if not xi > 0.0:
        return disc * max(K - m, 0.0)
    d = (m - K) / xi
    return disc * (xi * math.exp(-0.5 * d * d) / _SQRT_2PI - (m - K) * float(ndtr(-d)))


def price_european_gaussian(g, sigma, Q, req, method="auto", n=64):
    """disc E[p(m(g) + xi X)].

    Parameters
    ----------
    method : {'auto', 'quadrature'}
        'auto' uses the closed forms for Call and Put; 'quadrature' always
        integrates the payoff against the normal density, splitting the
        line at the payoff kinks.
    """
    law = gaussian_law(g, sigma, Q, req)
    return _price_law(law, req.payoff, req.disc, method, n)


def _price_law(law, payoff, disc, method="auto", n=64):
    if method == "auto" and isinstance(payoff, Call):
        return price_call_gaussian(law.mean, law.sd, payoff.K, disc)
    if method == "auto" and isinstance(payoff, Put):
        return price_put_gaussian(law.mean, law.sd, payoff.K, disc)
    return disc * law.expect(payoff, _kinks(payoff), n)


def delta_gateaux(g, h, sigma, Q, req, n=64):
    """Derivative of the price along the curve direction h.

    Equals disc m(h) Phi(d) for calls and disc m(h) E[p(m + xi X) X] / xi
    in general.  With xi = 0 a call gives disc m(h) 1{m > K}; other
    payoffs raise DomainError.
    """
    law = gaussian_law(g, sigma, Q, req)
    mh = m_of_g(h, req.contract, req.t)
    p, disc = req.payoff, req.disc
    if law.sd == 0.0:
        if isinstance(p, Call):
            return disc * mh * float(law.mean > p.K)
        if isinstance(p, Put):
            return -disc * mh * float(law.mean < p.K)
        raise DomainError("delta of a general payoff is undefined for xi = 0")
    if isinstance(p, Call):
        return disc * mh * float(ndtr((law.mean - p.K) / law.sd))
    if isinstance(p, Put):
        return -disc * mh * float(ndtr((p.K - law.mean) / law.sd))
    z = lambda x: (x - law.mean) / law.sd  # noqa: E731
    e = law.expect(lambda x: p(x) * z(x), _kinks(p), n)
    return disc * mh * e / law.sd


def calendar_law(g, sigma, Q, contracts, t, tau, n=32):
    """Joint law of two swap prices on the same curve at tau."""
    c1, c2 = contracts
    lam = np.asarray(Q.lambdas)

    def integrand(s):
        a1 = _swap_loadings(sigma, Q, c1, s)
        a2 = _swap_loadings(sigma, Q, c2, s)
        out = np.empty((s.size, 2, 2))
        out[:, 0, 0] = a1 * a1 @ lam
        out[:, 1, 1] = a2 * a2 @ lam
        out[:, 0, 1] = out[:, 1, 0] = a1 * a2 @ lam
        return out

    bps = np.concatenate((_swap_breaks(sigma, Q, c1), _swap_breaks(sigma, Q, c2)))
    cov = time_integral(integrand, t, tau, bps, n=n)
    return GaussianLaw2D([m_of_g(g, c1, t), m_of_g(g, c2, t)], cov)


def price_calendar_spread(g, sigma, Q, contracts, req, payoff=None, n=64):
    """disc E[p(F1(tau), F2(tau))] for two swaps on one curve.

    The default payoff is Spread(K) = max(F1 - F2 - K, 0) with K from req.
    """
    if payoff is None:
        payoff = Spread(0.0 if req.K is None else req.K)
    for c in contracts:
        if req.tau > c.T1 + 1e-12:
            raise DomainError(f"exercise time tau={req.tau} must satisfy tau <= T1={c.T1}")
    law = calendar_law(g, sigma, Q, contracts, req.t, req.tau)
    yk = payoff.y_kinks if hasattr(payoff, "y_kinks") else None
    return req.disc * law.expect(payoff, getattr(payoff, "x_kinks", ()), yk, n)


def log_forward_variance(sigma, Q, T, t, tau, n=32):
    """v^2 = int_t^tau sum_k lambda_k (nu(s) (sigma e_k)(T - s))^2 ds."""
    if not t <= tau <= T + 1e-12:
        raise DomainError(f"need t <= tau <= T, got t={t}, tau={tau}, T={T}")
    lam = np.asarray(Q.lambdas)

    def integrand(s):
        a = _point_loadings(sigma, Q, T, s)
        return a * a @ lam

    return _clamp_var(time_integral(integrand, t, tau, _point_breaks(sigma, Q, T), n=n))


def black76(f, K, v, disc=1.0):
    """disc [f Phi(d1) - K Phi(d2)] with total log-variance v^2."""
    if f <= 0 or K <= 0:
        raise DomainError("Black-76 needs positive forward and strike")
    if not v > 0:
        return disc * max(f - K, 0.0)
    d1 = (math.log(f / K) + 0.5 * v * v) / v
    return disc * (f * float(ndtr(d1)) - K * float(ndtr(d1 - v)))


def price_call_black76(f, T, tau, t, r, K, sigma, Q):
    """Call on the fixed-delivery forward f(t, T) in the geometric model."""
    v2 = log_forward_variance(sigma, Q, T, t, tau)
    return black76(f, K, math.sqrt(v2), math.exp(-r * (tau - t)))


# NIG noise: L(t) = B(U(t)) with U inverse Gaussian

def _sigma_tilde_sq_nodes(sigma, Q, contract, t, tau, n=32):
    s, w = panel_nodes(t, tau, _swap_breaks(sigma, Q, contract), n)
    a = _swap_loadings(sigma, Q, contract, s)
    return a * a @ np.asarray(Q.lambdas), w


def nig_cumulant(theta, s2, w, ig_delta, ig_gamma):
    """log E[exp(theta int a dL)] = -delta int (sqrt(gamma^2 - theta^2 a^2) - gamma) ds.

    ``theta`` may be complex; s2 and w are the nodes and weights of
    sigma_tilde^2 over [t, tau].
    """
    theta = np.asarray(theta, dtype=complex)
    g2 = ig_gamma * ig_gamma
    root = np.sqrt(g2 - theta[..., None] ** 2 * s2)
    return -ig_delta * np.sum(w * (root - ig_gamma), axis=-1)


def _admissible(sigma_max, ig_gamma):
    return ig_gamma / sigma_max if sigma_max > 0 else np.inf


def nig_call_curve(m, s2, w, ig_delta, ig_gamma, K, damping=None, n_fft=4096, disc=1.0):
    """Call prices on a strike grid centred at K by damped Fourier inversion.

    With X = int a dL and k = K - m,

        E[(X - k)^+] = e^{-ak} / pi int_0^inf Re[e^{-iuk} phi(a + iu) / (a + iu)^2] du

    for a > 0, while a < 0 gives the put E[(k - X)^+].  The default damping
    takes the sign that keeps e^{-ak} <= 1 (put plus parity for strikes
    below the forward), with |a| = min(1.5 / sd(X), half the strip width).

    Returns
    -------
    strikes, prices : ndarray
        prices[n_fft // 2] is the price at strike K.
    """
    s_max = math.sqrt(float(np.max(s2))) if np.size(s2) else 0.0
    var = float(np.dot(w, s2)) * ig_delta / ig_gamma
    upper = _admissible(s_max, ig_gamma)
    if var <= 0.0:
        ks = K + np.zeros(1)
        return ks, disc * np.maximum(m - ks, 0.0)
    if damping is None:
        a = min(1.5 / math.sqrt(var), 0.5 * upper)
        if K < m:
            a = -a
    else:
        a = float(damping)
        if not (0.0 < abs(a) < upper):
            raise ParameterError(
                f"damping a={a:g} outside the admissible strip 0 < |a| < {upper:g} of the NIG cumulant")
    du = 2.0 * math.pi * abs(a) / 40.0
    dk = 2.0 * math.pi / (n_fft * du)
    u = du * np.arange(n_fft)
    k0 = (K - m) - 0.5 * n_fft * dk
    z = a + 1j * u
    phi = np.exp(nig_cumulant(z, s2, w, ig_delta, ig_gamma))
    simpson = np.where(np.arange(n_fft) % 2 == 0, 2.0, 4.0) / 3.0
    simpson[0] = 1.0 / 3.0
    vals = np.exp(-1j * u * k0) * phi / (z * z) * simpson * du
    ks = k0 + dk * np.arange(n_fft)
    prices = np.exp(-a * ks) / math.pi * np.real(np.fft.fft(vals))
    if a < 0:
        # put to call, E[X] = 0
        prices = prices - ks
    return m + ks, disc * prices


def price_call_nig(g, sigma, Q, ig_delta, ig_gamma, req, damping=None, n_fft=4096):
    """Call on the swap price under NIG noise by Fourier inversion."""
    if not (ig_delta > 0 and ig_gamma > 0):
        raise ParameterError("NIG parameters must be positive")
    K = req.payoff.K if isinstance(req.payoff, Call) else req.K
    if K is None or not isinstance(req.payoff, Call):
        raise UnsupportedModelError("the Fourier pricer handles call payoffs only")
    m = m_of_g(g, req.contract, req.t)
    s2, w = _sigma_tilde_sq_nodes(sigma, Q, req.contract, req.t, req.tau)
    _, prices = nig_call_curve(m, s2, w, ig_delta, ig_gamma, K, damping, n_fft, req.disc)
    return float(prices[n_fft // 2]) if prices.size > 1 else float(prices[0])


# two commodities

def _check_block(block):
    rep = validate_block(block)
    if not rep.valid:
        raise InvalidBlockError("; ".join(rep.reasons))


def sigma12_integral(sigmas, block, T, t, tau, n=32):
    """int_t^tau sum_{k,m} C[k, m] b1_k(s) b2_m(s) ds with b_i point loadings at T - s."""
    _check_block(block)
    s1, s2 = sigmas
    bps = np.concatenate((_point_breaks(s1, block.Q1, T), _point_breaks(s2, block.Q2, T)))

    def integrand(s):
        b1 = _point_loadings(s1, block.Q1, T, s)
        b2 = _point_loadings(s2, block.Q2, T, s)
        return np.einsum("ik,km,im->i", b1, block.C, b2)

    return time_integral(integrand, t, tau, bps, n=n)


def margrabe_variance(sigmas, block, T, t, tau):
    """Sigma^2 = int sigma1^2 - 2 sigma12 + sigma2^2 ds of log(f1 / f2)."""
    v1 = log_forward_variance(sigmas[0], block.Q1, T, t, tau)
    v2 = log_forward_variance(sigmas[1], block.Q2, T, t, tau)
    return _clamp_var(v1 - 2.0 * sigma12_integral(sigmas, block, T, t, tau) + v2)


def price_margrabe(f1, f2, Sigma2, disc=1.0):
    """Exchange option disc E[(f1(tau) - f2(tau))^+] for lognormal forwards."""
    if f1 <= 0 or f2 <= 0:
        raise DomainError("Margrabe needs positive forwards")
    if Sigma2 < 0:
        raise DomainError("total spread variance must be nonnegative")
    S = math.sqrt(Sigma2)
    if S == 0.0:
        return disc * max(f1 - f2, 0.0)
    dp = (math.log(f1 / f2) + 0.5 * Sigma2) / S
    return disc * (f1 * float(ndtr(dp)) - f2 * float(ndtr(dp - S)))


def quanto_law(g1, g2, block, contracts, t, tau, sigmas=None, general_sigma=False, n=32):
    """Joint law of the two swap prices in the bivariate Gaussian model."""
    from .covariance import SigmaSpec

    if sigmas is None:
        sigmas = (SigmaSpec.identity(), SigmaSpec.identity())
    if not general_sigma and not all(s.is_identity for s in sigmas):
        raise UnsupportedModelError(
            "quanto pricing uses identity volatilities; pass general_sigma=True for SigmaSpec pairs")
    _check_block(block)
    c1, c2 = contracts
    s1, s2 = sigmas
    bps = np.concatenate((_swap_breaks(s1, block.Q1, c1), _swap_breaks(s2, block.Q2, c2)))

    def integrand(s):
        a1 = _swap_loadings(s1, block.Q1, c1, s)
        a2 = _swap_loadings(s2, block.Q2, c2, s)
        return np.einsum("ik,km,im->i", a1, block.C, a2)

    cov12 = time_integral(integrand, t, tau, bps, n=n)
    v1 = xi_squared(s1, block.Q1, c1, t, tau)
    v2 = xi_squared(s2, block.Q2, c2, t, tau)
    return GaussianLaw2D([m_of_g(g1, c1, t), m_of_g(g2, c2, t)], [[v1, cov12], [cov12, v2]])


def price_quanto(g1, g2, block, contracts, payoffs, req, sigmas=None, general_sigma=False, n=64):
    """disc E[p(F1(tau)) q(F2(tau))] with (F1, F2) jointly Gaussian."""
    for c in contracts:
        if req.tau > c.T1 + 1e-12:
            raise DomainError(f"exercise time tau={req.tau} must satisfy tau <= T1={c.T1}")
    p, q = payoffs
    law = quanto_law(g1, g2, block, contracts, req.t, req.tau, sigmas, general_sigma)
    if isinstance(q, ConstantPayoff):
        return q.c * _price_law(GaussianLaw1D(law.mean[0], law.cov[0, 0]), p, req.disc, "quadrature", n)
    return req.disc * law.expect(lambda x, y: p(x) * q(y), _kinks(p), _kinks(q), n)


@dataclass
class LipschitzCertificate:
    """Constant C with |V(g) - V(g~)| <= C ||g - g~|| and its ingredients."""

    C: float
    C_P: float
    c: float
    K: float
    trace: float
    tau: float
    parts: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.C)


def lipschitz_certificate(sigma, Q, tau, lip_p, contract, alpha_tilde=None, t=0.0, disc=1.0):
    """Stability constant C = C_P sqrt(2c) exp(2 c K^2 tr(Q) tau).

    c = 2 max(1, 1/alpha_tilde) bounds the squared shift norm, K bounds
    the operator norm of sigma(s) on [t, tau] and C_P = disc L_p
    sqrt(1 + 1/alpha_tilde) ||D|| bounds the payoff functional.
    """
    a = Q.alpha_tilde if alpha_tilde is None else alpha_tilde
    aw = AlphaWeight(a)
    c = aw.shift_bound_sq
    K = sigma.op_norm_bound * sigma.nu_max(t, tau)
    dnorm = op_norm_bound(contract.weight, a)
    C_P = disc * lip_p * math.sqrt(1.0 + aw.k_sq) * dnorm
    tr = Q.trace
    expo = 2.0 * c * K * K * tr * (tau - t)
    C = C_P * math.sqrt(2.0 * c) * math.exp(expo)
    return LipschitzCertificate(C, C_P, c, K, tr, tau,
                                {"delivery_norm": dnorm, "exponent": expo})
