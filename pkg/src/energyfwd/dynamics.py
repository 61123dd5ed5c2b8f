"""Simulation of the forward curve dynamics in mild form.

The curve solves g(s) = S_{s-t} g(t) + int_t^s S_{s-u} sigma(u) dL(u) with S
the Musiela shift.  Shifts are exact on the curve representation, so a
time step only has to insert noise: over [t_j, t_j + dt] the increment
nu(u*) sum_k xi_k sigma(e_k) is added at the insertion time u* (the step
midpoint by default) and then transported.

Storing every simulated curve of 10^5 paths is wasteful, so paths are
recorded through probes, linear functionals of the curve:

* ForwardProbe(T): the fixed-maturity forward g(t, T - t);
* SwapProbe(contract): the swap price (D g(t))(T1 - t);
* TenorProbe(x): the value at fixed time-to-maturity, g(t, x).

A noise curve phi inserted at u contributes phi(T - u), (D phi)(T1 - u)
and phi(x + t - u) to these at any later record time t, which makes the
first two probes incremental.  Full curves can be rebuilt for the first
``keep_paths`` paths, whose increments are stored.

Random numbers come from one Philox stream per block of paths, keyed by
the master seed and the block index, so results do not depend on how the
blocks are scheduled.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .covariance import CovOp, SigmaSpec, regression_operator, validate_block
from .curve_space import Curve, evaluate, exp_curve, linear_combination, merge_knots, refine_knots, shift
from .delivery_operators import ContractSpec, eval_D_at
from .errors import DomainError, InvalidBlockError, NumericRangeError, ParameterError, UnsupportedModelError

__all__ = [
    "NoiseSpec", "SimPlan", "ForwardProbe", "SwapProbe", "TenorProbe", "PathSet",
    "simulate_mild", "simulate_geometric", "simulate_bivariate", "drift_mu",
    "schwartz_curve", "sample_inverse_gaussian",
]


@dataclass
class NoiseSpec:
    """Driving noise: Gaussian, or Brownian motion time-changed by an
    inverse Gaussian subordinator (NIG).

    Parameters
    ----------
    kind : {'gaussian', 'nig'}
    cov : CovOp or BlockCov
    ig_delta, ig_gamma : float
        Subordinator parameters; U(1) has mean ig_delta / ig_gamma and
        variance ig_delta / ig_gamma**3.
    """

    kind: str = "gaussian"
    cov: object = None
    ig_delta: float = None
    ig_gamma: float = None

    def __post_init__(self):
        self.kind = str(self.kind).lower()
        if self.kind not in ("gaussian", "nig"):
            raise ParameterError(f"unknown noise kind {self.kind!r}")
        if self.kind == "nig":
            if not (self.ig_delta and self.ig_delta > 0 and self.ig_gamma and self.ig_gamma > 0):
                raise ParameterError("NIG noise needs positive ig_delta and ig_gamma")

    @property
    def subordinator_mean(self):
        """E[U(1)]; 1 for Gaussian noise."""
        return 1.0 if self.kind == "gaussian" else self.ig_delta / self.ig_gamma


@dataclass
class SimPlan:
    """Time grid, path count and random seed of a simulation.

    Parameters
    ----------
    t0, t1 : float
        Start and end time, t1 > t0.
    n_steps, n_paths : int
    seed : int
    model : {'arithmetic', 'geometric'}
    scheme : {'midpoint', 'euler'}
        'midpoint' inserts the step noise at the step midpoint with nu
        taken there; 'euler' inserts it at the end of the step with nu
        taken at the start (shift first, then add the increment).
    record : {'all', 'final'}
        Record probes at every step or only at t0 and t1.
    chunk_size : int
        Paths per random stream block; part of the reproducibility key.
    workers : int
        Threads used for the blocks; results do not depend on it.
    keep_paths : int
        Number of leading paths whose increments are kept for rebuilding
        full curves.
    """

    t0: float = 0.0
    t1: float = 1.0
    n_steps: int = 50
    n_paths: int = 10000
    seed: int = 0
    model: str = "arithmetic"
    scheme: str = "midpoint"
    record: str = "all"
    chunk_size: int = 8192
    workers: int = 1
    keep_paths: int = 0

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise DomainError("simulation needs t1 > t0")
        if self.n_steps < 1 or self.n_paths < 1:
            raise DomainError("n_steps and n_paths must be positive")
        self.model = str(self.model).lower()
        if self.model not in ("arithmetic", "geometric"):
            raise ParameterError(f"unknown model {self.model!r}")
        if self.scheme not in ("midpoint", "euler"):
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if self.record not in ("all", "final"):
            raise ParameterError(f"unknown record mode {self.record!r}")

    @property
    def dt(self):
        return (self.t1 - self.t0) / self.n_steps

    @property
    def step_times(self):
        return self.t0 + self.dt * np.arange(self.n_steps + 1)

    @property
    def insert_times(self):
        t = self.step_times[:-1]
        return t + (0.5 * self.dt if self.scheme == "midpoint" else self.dt)

    @property
    def nu_times(self):
        """Times at which the time factor nu is evaluated for each step."""
        if self.scheme == "midpoint":
            return self.insert_times
        return self.step_times[:-1]

    @property
    def record_index(self):
        if self.record == "all":
            return np.arange(self.n_steps + 1)
        return np.array([0, self.n_steps])


@dataclass(frozen=True)
class ForwardProbe:
    """Fixed-maturity forward g(t, T - t)."""

    T: float
    leg: int = 0

    @property
    def label(self):
        return f"forward[T={self.T:g}]" + (f"@{self.leg}" if self.leg else "")


@dataclass(frozen=True)
class SwapProbe:
    """Swap price F(t, T1, T2)."""

    contract: ContractSpec
    leg: int = 0

    @property
    def label(self):
        c = self.contract
        return f"swap[{c.T1:g},{c.T2:g}]" + (f"@{self.leg}" if self.leg else "")


@dataclass(frozen=True)
class TenorProbe:
    """Curve value at fixed time-to-maturity x."""

    x: float
    leg: int = 0

    @property
    def label(self):
        return f"tenor[x={self.x:g}]" + (f"@{self.leg}" if self.leg else "")


@dataclass
class PathSet:
    """Recorded probe values of a simulation.

    Attributes
    ----------
    times : ndarray
        Record times.
    probes : list
    values : ndarray, shape (n_paths, n_times, n_probes)
        Probe values (forward prices; exponentiated in the geometric model).
        NaN where a probe has expired.
    model : str
    """

    times: np.ndarray
    probes: list
    values: np.ndarray
    model: str
    plan: SimPlan
    _rebuild: object = field(default=None, repr=False)

    @property
    def labels(self):
        return [p.label for p in self.probes]

    @property
    def n_paths(self):
        return self.values.shape[0]

    def _index(self, probe):
        if isinstance(probe, int):
            return probe
        if isinstance(probe, str):
            return self.labels.index(probe)
        return self.probes.index(probe)

    def probe(self, probe):
        """Array (n_paths, n_times) for one probe (label, index or object)."""
        return self.values[:, :, self._index(probe)]

    def terminal(self, probe=0):
        return self.values[:, -1, self._index(probe)]

    def mean(self, probe=0):
        return np.mean(self.probe(probe), axis=0)

    def stderr(self, probe=0):
        return np.std(self.probe(probe), axis=0, ddof=1) / math.sqrt(self.n_paths)

    def curve(self, path, step=-1):
        """Full curve of a kept path at a record index."""
        if self._rebuild is None:
            raise DomainError("full curves need plan.keep_paths > 0")
        return self._rebuild(path, step)

    def to_csv(self, path, max_paths=None):
        """Write rows (path_id, step, time, probe_x, value)."""
        n = self.n_paths if max_paths is None else min(self.n_paths, max_paths)
        steps = self.plan.record_index
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["path_id", "step", "time", "probe_x", "value"])
            for p in range(n):
                for j, (st, t) in enumerate(zip(steps, self.times)):
                    for k, pr in enumerate(self.probes):
                        v = self.values[p, j, k]
                        if np.isnan(v):
                            continue
                        wr.writerow([p, int(st), repr(float(t)), _probe_x(pr, t), repr(float(v))])


def _probe_x(pr, t):
    if isinstance(pr, TenorProbe):
        return repr(float(pr.x))
    if isinstance(pr, ForwardProbe):
        return repr(float(pr.T - t))
    return repr(float(pr.contract.T1 - t))


def sample_inverse_gaussian(rng, mean, shape, size):
    """Inverse Gaussian draws by the transformation with two roots.

    Parameters
    ----------
    mean, shape : float
        Mean mu and shape lambda; the variance is mu**3 / lambda.
    """
    nu = rng.standard_normal(size)
    u = rng.random(size)
    z = mean * nu * nu / (2.0 * shape)
    # smaller root of the quadratic, written without cancellation
    x = mean / (1.0 + z + np.sqrt(z * (z + 2.0)))
    return np.where(u <= mean / (mean + x), x, mean * mean / x)


# samplers return the standardized increments xi (n, K) for one step

class _DiagSampler:
    def __init__(self, lambdas):
        self.sd = np.sqrt(np.maximum(np.asarray(lambdas, dtype=float), 0.0))
        self.K = self.sd.size

    def __call__(self, rng, n, dt):
        return rng.standard_normal((n, self.K)) * (self.sd * math.sqrt(dt))


class _NIGSampler(_DiagSampler):
    def __init__(self, lambdas, delta, gamma):
        super().__init__(lambdas)
        self.delta, self.gamma = delta, gamma

    def __call__(self, rng, n, dt):
        z = rng.standard_normal((n, self.K))
        dd = self.delta * dt
        du = sample_inverse_gaussian(rng, dd / self.gamma, dd * dd, n)
        return z * self.sd * np.sqrt(du)[:, None]


class _FactorSampler:
    def __init__(self, cov):
        w, V = np.linalg.eigh(0.5 * (cov + cov.T))
        self.L = V * np.sqrt(np.maximum(w, 0.0))
        self.K = cov.shape[0]

    def __call__(self, rng, n, dt):
        return (rng.standard_normal((n, self.K)) @ self.L.T) * math.sqrt(dt)


class _RegressionSampler:
    """X2 increments as B X1 + W with W independent of X1."""

    def __init__(self, block):
        reg = regression_operator(block)
        self.sd1 = np.sqrt(block.Q1.lambdas)
        self.B = reg.matrix
        self.W = _FactorSampler(reg.residual_cov)
        self.n1 = self.sd1.size
        self.K = self.n1 + self.B.shape[0]

    def __call__(self, rng, n, dt):
        x1 = rng.standard_normal((n, self.n1)) * (self.sd1 * math.sqrt(dt))
        x2 = x1 @ self.B.T + self.W(rng, n, dt)
        return np.hstack([x1, x2])


@dataclass
class _Leg:
    g0: Curve
    phis: list
    sigma: SigmaSpec
    lambdas: np.ndarray
    cols: slice
    geometric: bool


def _functional(probe, leg, curves, t_insert, t_record):
    """Values of the probe functional of S_{t_record - t_insert} phi."""
    if isinstance(probe, ForwardProbe):
        x = probe.T - t_insert
        if x < 0:
            return np.zeros(len(curves))
        return np.array([evaluate(c, x) for c in curves])
    if isinstance(probe, SwapProbe):
        c = probe.contract
        x = c.T1 - t_insert
        if x < 0:
            return np.zeros(len(curves))
        return np.array([eval_D_at(c.weight, f, x) for f in curves])
    x = probe.x + t_record - t_insert
    return np.array([evaluate(c, x) for c in curves])


def _expired(probe, t):
    if isinstance(probe, ForwardProbe):
        return t > probe.T + 1e-12
    if isinstance(probe, SwapProbe):
        return t > probe.contract.T1 + 1e-12
    return False


class _Engine:
    def __init__(self, legs, sampler, plan, probes):
        self.legs, self.sampler, self.plan, self.probes = legs, sampler, plan, list(probes)
        for p in self.probes:
            if p.leg >= len(legs):
                raise DomainError(f"probe {p.label} refers to a missing leg")
            if legs[p.leg].geometric and isinstance(p, SwapProbe):
                raise UnsupportedModelError(
                    "swap probes are not linear in the log curve; use tenor probes and "
                    "integrate the exponentiated values instead")
        self._prepare()

    def _prepare(self):
        plan = self.plan
        dt = plan.dt
        ts, us, vs = plan.step_times, plan.insert_times, plan.nu_times
        rec = plan.record_index
        self.rec_times = ts[rec]
        P, n = len(self.probes), plan.n_steps
        self.incremental = [k for k, p in enumerate(self.probes) if not isinstance(p, TenorProbe)]
        self.tenor = [k for k, p in enumerate(self.probes) if isinstance(p, TenorProbe)]
        # initial values and drift at every record time
        self.base = np.zeros((rec.size, P))
        for k, p in enumerate(self.probes):
            leg = self.legs[p.leg]
            for j, tr in enumerate(self.rec_times):
                if _expired(p, tr):
                    self.base[j, k] = np.nan
                    continue
                init = _functional(p, leg, [leg.g0], plan.t0, tr)[0]
                drift = 0.0
                if leg.geometric:
                    for i in range(n):
                        if us[i] <= tr + 1e-12:
                            nu = float(leg.sigma.nu_at(vs[i]))
                            vals = _functional(p, leg, leg.phis, us[i], tr)
                            drift -= 0.5 * nu * nu * np.sum(leg.lambdas * vals * vals) * dt
                self.base[j, k] = init + drift
        # per-step weights for incremental probes, (n, K, P_inc), nu folded in
        K = self.sampler.K
        self.w_inc = np.zeros((n, K, len(self.incremental)))
        for q, k in enumerate(self.incremental):
            p = self.probes[k]
            leg = self.legs[p.leg]
            for i in range(n):
                nu = float(leg.sigma.nu_at(vs[i]))
                self.w_inc[i, leg.cols, q] = nu * _functional(p, leg, leg.phis, us[i], us[i])
        # tenor weights per (record, step)
        self.w_ten = np.zeros((rec.size, n, K, len(self.tenor)))
        for q, k in enumerate(self.tenor):
            p = self.probes[k]
            leg = self.legs[p.leg]
            for j, tr in enumerate(self.rec_times):
                for i in range(n):
                    if us[i] <= tr + 1e-12:
                        nu = float(leg.sigma.nu_at(vs[i]))
                        self.w_ten[j, i, leg.cols, q] = nu * _functional(p, leg, leg.phis, us[i], tr)
        # insertion steps completed before each record time
        self.done = np.array([np.sum(us <= tr + 1e-12) for tr in self.rec_times])

    def _chunk(self, c):
        plan = self.plan
        start = c * plan.chunk_size
        m = min(plan.chunk_size, plan.n_paths - start)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(plan.seed, spawn_key=(c,))))
        n, rec = plan.n_steps, self.rec_times.size
        out = np.empty((m, rec, len(self.probes)))
        out[:] = self.base[None, :, :]
        running = np.zeros((m, len(self.incremental)))
        need_hist = bool(self.tenor) or plan.keep_paths > start
        hist = np.empty((n, m, self.sampler.K)) if need_hist else None
        j = 1
        for i in range(n):
            xi = self.sampler(rng, m, plan.dt)
            if need_hist:
                hist[i] = xi
            if self.incremental:
                running += xi @ self.w_inc[i]
            while j < rec and self.done[j] == i + 1:
                if self.incremental:
                    out[:, j, self.incremental] += running
                j += 1
        if self.tenor:
            for jr in range(1, rec):
                d = self.done[jr]
                acc = np.einsum("imk,ikq->mq", hist[:d], self.w_ten[jr, :d])
                out[:, jr, self.tenor] += acc
        kept = hist[:, : max(0, min(m, plan.keep_paths - start)), :] if need_hist else None
        return out, kept

    def run(self):
        plan = self.plan
        n_chunks = -(-plan.n_paths // plan.chunk_size)
        if plan.workers > 1 and n_chunks > 1:
            with ThreadPoolExecutor(plan.workers) as ex:
                results = list(ex.map(self._chunk, range(n_chunks)))
        else:
            results = [self._chunk(c) for c in range(n_chunks)]
        values = np.concatenate([r[0] for r in results], axis=0)
        kept = [r[1] for r in results if r[1] is not None and r[1].shape[1] > 0]
        kept = np.concatenate(kept, axis=1) if kept else None
        return values, kept


def _rebuilder(engine, kept, leg_index, drift_curves):
    plan = engine.plan
    leg = engine.legs[leg_index]
    us, vs = plan.insert_times, plan.nu_times

    def rebuild(path, step):
        if kept is None or path >= kept.shape[1]:
            raise DomainError(f"path {path} was not kept (keep_paths={plan.keep_paths})")
        tr = engine.rec_times[step]
        curves = [shift(leg.g0, tr - plan.t0)]
        coef = [1.0]
        for i in range(plan.n_steps):
            if us[i] > tr + 1e-12:
                break
            lag = tr - us[i]
            nu = float(leg.sigma.nu_at(vs[i]))
            for k, phi in enumerate(leg.phis):
                curves.append(shift(phi, lag))
                coef.append(nu * kept[i, path, leg.cols][k])
            if leg.geometric:
                curves.append(shift(drift_curves(vs[i]), lag))
                coef.append(plan.dt)
        g = linear_combination(coef, curves)
        return exp_curve(g) if leg.geometric else g

    return rebuild


def _default_probes(probes):
    return [TenorProbe(0.0)] if probes is None else list(probes)


def simulate_mild(g0, sigma, noise, plan, probes=None):
    """Simulate the arithmetic model g(s) = S g(t) + int S sigma dL.

    Parameters
    ----------
    g0 : Curve
        Curve at plan.t0.
    sigma : SigmaSpec
    noise : NoiseSpec
        Gaussian or NIG noise with a CovOp.
    plan : SimPlan
    probes : list, optional
        Probes to record; defaults to the spot value g(t, 0).

    Returns
    -------
    PathSet
    """
    if plan.model == "geometric":
        return simulate_geometric(g0, sigma, noise, plan, probes)
    Q = noise.cov
    if not isinstance(Q, CovOp):
        raise DomainError("simulate_mild needs a CovOp; use simulate_bivariate for blocks")
    if noise.kind == "nig":
        sampler = _NIGSampler(Q.lambdas, noise.ig_delta, noise.ig_gamma)
    else:
        sampler = _DiagSampler(Q.lambdas)
    leg = _Leg(g0, sigma.noise_curves(Q), sigma, np.asarray(Q.lambdas), slice(0, Q.rank), False)
    eng = _Engine([leg], sampler, plan, _default_probes(probes))
    values, kept = eng.run()
    return PathSet(eng.rec_times, eng.probes, values, "arithmetic", plan,
                   _rebuilder(eng, kept, 0, None) if kept is not None else None)


def drift_mu_at(sigma, Q, t, x):
    """mu(t, x) = -1/2 nu(t)^2 sum_k lambda_k (sigma e_k)(x)^2, vectorized in x."""
    nu = float(sigma.nu_at(t))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    vals = np.array([evaluate(c, x) for c in sigma.noise_curves(Q)])
    return -0.5 * nu * nu * np.sum(np.asarray(Q.lambdas)[:, None] * vals * vals, axis=0)


def drift_mu(sigma, Q, t, panels=8):
    """Drift of the log curve making fixed-maturity forwards martingales.

    Returned as the curve interpolating mu(t, .) on a refinement of the
    grid of the noise curves.
    """
    phis = sigma.noise_curves(Q)
    grid = refine_knots(merge_knots(*[p.knots for p in phis]), panels)
    vals = drift_mu_at(sigma, Q, t, np.concatenate(([0.0], grid)))
    return Curve.from_nodal(grid, vals, Q.alpha_tilde)


def _exp_prices(values):
    """exp of simulated log prices; overflow is an error, not inf."""
    with np.errstate(over="ignore"):
        out = np.exp(values)
    if not np.all(np.isfinite(out[np.isfinite(values)])):
        raise NumericRangeError("exp of the simulated log forward curve overflows double precision")
    return out


def simulate_geometric(g0_tilde, sigma, noise, plan, probes=None):
    """Simulate g = exp(g_tilde) with the martingale drift on g_tilde.

    Probe values are forward prices exp(g_tilde); rebuilt curves are
    exponentiated as well.

    Raises
    ------
    UnsupportedModelError
        For NIG noise: the drift condition is only available for Wiener noise.
    """
    if noise.kind != "gaussian":
        raise UnsupportedModelError("the geometric model is only supported with Gaussian noise")
    Q = noise.cov
    leg = _Leg(g0_tilde, sigma.noise_curves(Q), sigma, np.asarray(Q.lambdas), slice(0, Q.rank), True)
    eng = _Engine([leg], _DiagSampler(Q.lambdas), plan, _default_probes(probes))
    values, kept = eng.run()
    reb = None
    if kept is not None:
        reb = _rebuilder(eng, kept, 0, lambda t: drift_mu(sigma, Q, t))
    return PathSet(eng.rec_times, eng.probes, _exp_prices(values), "geometric", plan, reb)


def simulate_bivariate(g0, sigmas, block, plan, probes=None, route="joint"):
    """Simulate two curves driven by correlated noises with a block covariance.

    Parameters
    ----------
    g0 : pair of Curve
    sigmas : pair of SigmaSpec
    block : BlockCov
        Must pass :func:`validate_block`.
    plan : SimPlan
        plan.model applies to both legs.
    probes : pair of lists
        Probes for the first and the second curve.
    route : {'joint', 'regression'}
        'joint' factorizes the assembled block matrix; 'regression' draws
        the second increment as B times the first plus an independent
        residual.

    Returns
    -------
    (PathSet, PathSet)
    """
    report = validate_block(block)
    if not report.valid:
        raise InvalidBlockError("; ".join(report.reasons))
    n1 = block.Q1.rank
    geo = plan.model == "geometric"
    legs = [
        _Leg(g0[0], sigmas[0].noise_curves(block.Q1), sigmas[0], np.asarray(block.Q1.lambdas), slice(0, n1), geo),
        _Leg(g0[1], sigmas[1].noise_curves(block.Q2), sigmas[1], np.asarray(block.Q2.lambdas),
             slice(n1, n1 + block.Q2.rank), geo),
    ]
    if route == "joint":
        sampler = _FactorSampler(block.matrix)
    elif route == "regression":
        sampler = _RegressionSampler(block)
    else:
        raise ParameterError(f"unknown route {route!r}")
    p1, p2 = (None, None) if probes is None else probes
    p1, p2 = _default_probes(p1), _default_probes(p2)
    all_probes = [_with_leg(p, 0) for p in p1] + [_with_leg(p, 1) for p in p2]
    eng = _Engine(legs, sampler, plan, all_probes)
    values, kept = eng.run()
    if geo:
        values = _exp_prices(values)
    model = plan.model
    a = len(p1)
    r0 = _rebuilder(eng, kept, 0, lambda t: drift_mu(sigmas[0], block.Q1, t)) if kept is not None else None
    r1 = _rebuilder(eng, kept, 1, lambda t: drift_mu(sigmas[1], block.Q2, t)) if kept is not None else None
    return (PathSet(eng.rec_times, p1, values[:, :, :a], model, plan, r0),
            PathSet(eng.rec_times, p2, values[:, :, a:], model, plan, r1))


def _with_leg(p, leg):
    if isinstance(p, ForwardProbe):
        return ForwardProbe(p.T, leg)
    if isinstance(p, SwapProbe):
        return SwapProbe(p.contract, leg)
    return TenorProbe(p.x, leg)


def schwartz_log_forward(x, x0, rho, theta, sigma_s):
    """Log forward of the exponential mean-reverting spot model."""
    x = np.asarray(x, dtype=float)
    e = np.exp(-rho * x)
    return e * x0 + theta * (1.0 - e) + sigma_s ** 2 * -np.expm1(-2.0 * rho * x) / (4.0 * rho)


def schwartz_curve(x0, rho, theta, sigma_s, alpha_tilde=1.0, knots=None, tol=1e-12, panels=256):
    """Forward curve of the exponential Ornstein-Uhlenbeck spot model.

    f(0, x) = exp(e^{-rho x} x0 + theta (1 - e^{-rho x}) + sigma_s^2 (1 - e^{-2 rho x}) / (4 rho)),
    interpolated at ``knots`` (default: ``panels`` cells, geometrically
    graded, up to where the curve is flat to ``tol``).
    """
    if not rho > 0:
        raise DomainError("mean reversion rho must be positive")
    if knots is None:
        x_max = math.log(1.0 / tol) / rho
        knots = x_max * (np.expm1(np.linspace(0, 3, panels + 1)[1:]) / math.expm1(3))
    return Curve.from_function(lambda x: np.exp(schwartz_log_forward(x, x0, rho, theta, sigma_s)),
                               knots, alpha_tilde)
