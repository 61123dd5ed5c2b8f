"""Command line front end.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.  Results go to
stdout as JSON with --json and as a plain table otherwise.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .config import load_config
from .covariance import validate_block
from .curve_space import evaluate, grid_basis, norm
from .delivery_operators import ContractSpec, WeightSpec
from .dynamics import ForwardProbe, NoiseSpec, SimPlan, TenorProbe, simulate_mild
from .errors import (
    ConfigurationError, DomainError, EnergyFwdError, NumericRangeError, NumericalFailure, OperatorError,
)
from .market_io import fit_curve, load_curve, parse_quotes, save_curve
from .montecarlo import mc_european, mc_calendar_spread, mc_quanto
from .pricing import (
    Call, ConstantPayoff, Put, PricingRequest, TablePayoff, delta_gateaux, gaussian_law, m_of_g,
    margrabe_variance, price_call_nig, price_calendar_spread, price_european_gaussian, price_margrabe,
    price_quanto, quanto_law, calendar_law, Spread,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _common(p):
    p.add_argument("--config", help="JSON config (default: $ENERGYFWD_CONFIG)")
    p.add_argument("--json", action="store_true", help="emit JSON")
    p.add_argument("--seed", type=int, help="override the config seed")


def _contract_args(p, suffix="", required=True):
    p.add_argument(f"--T1{suffix}", type=float, required=required)
    p.add_argument(f"--T2{suffix}", type=float, required=required)
    p.add_argument(f"--style{suffix}", default="uniform", choices=["uniform", "futures", "unit"])
    p.add_argument(f"--rw{suffix}", type=float, help="rate of the futures-style weight")


def build_parser():
    parser = _Parser(prog="energyfwd", description="Energy forward curves, swaps and options.")
    parser.add_argument("--version", action="version", version=f"energyfwd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("curve-fit", help="fit a curve to swap quotes")
    _common(p)
    p.add_argument("--quotes", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--smoothness", type=float)
    p.add_argument("--fill", type=int)

    p = sub.add_parser("curve-show", help="print curve values and norm")
    _common(p)
    p.add_argument("--curve", required=True)
    p.add_argument("--x", type=_floats, default=None, help="comma separated maturities")

    p = sub.add_parser("price", help="price an option")
    p.add_argument("kind", choices=["call", "put", "custom", "spread", "margrabe", "quanto", "nig"])
    _common(p)
    p.add_argument("--curve", required=True)
    p.add_argument("--curve2")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--tau", type=float, required=True)
    _contract_args(p, required=False)
    _contract_args(p, "b", required=False)
    p.add_argument("--T", type=float, help="fixed delivery time (margrabe)")
    p.add_argument("--K", type=float)
    p.add_argument("--K2", type=float, help="strike of the second call (quanto)")
    p.add_argument("--table", help="custom payoff as x:y,x:y,...")
    p.add_argument("--r", type=float, help="discount rate")
    p.add_argument("--cov")
    p.add_argument("--block")
    p.add_argument("--ig-delta", type=float)
    p.add_argument("--ig-gamma", type=float)
    p.add_argument("--damping", type=float)
    p.add_argument("--mc", action="store_true", help="add a Monte Carlo estimate")
    p.add_argument("--paths", type=int)

    p = sub.add_parser("delta", help="directional deltas of a call or put")
    _common(p)
    p.add_argument("--curve", required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--tau", type=float, required=True)
    _contract_args(p)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--put", action="store_true")
    p.add_argument("--r", type=float)
    p.add_argument("--cov")
    p.add_argument("--directions", default="eigen",
                   help="'eigen', 'grid' or comma separated curve files")

    p = sub.add_parser("simulate", help="simulate the curve and dump probe paths")
    _common(p)
    p.add_argument("--curve", required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--paths", type=int)
    p.add_argument("--x", type=_floats, default=[0.0], help="tenor probes")
    p.add_argument("--maturities", type=_floats, default=[], help="fixed-maturity probes")
    p.add_argument("--model", choices=["arithmetic", "geometric"], default="arithmetic")
    p.add_argument("--noise", choices=["gaussian", "nig"], default="gaussian")
    p.add_argument("--cov")
    p.add_argument("--out", help="CSV path for the paths")
    p.add_argument("--dump-paths", type=int, default=100, help="paths written to the CSV")

    p = sub.add_parser("cov-validate", help="check a block covariance")
    _common(p)
    p.add_argument("--block", required=True)
    return parser


def _config(args):
    over = {"seed": args.seed}
    for key in ("cov", "block"):
        if getattr(args, key, None):
            over[key] = getattr(args, key)
    for key, attr in (("r", "r"), ("smoothness", "smoothness"), ("fill", "fill"), ("damping", "damping"),
                      ("ig_delta", "ig_delta"), ("ig_gamma", "ig_gamma"), ("n_paths", "paths"),
                      ("n_steps", "steps")):
        if getattr(args, attr, None) is not None:
            over[key] = getattr(args, attr)
    cfg = load_config(args.config, over)
    # file paths given on the command line are relative to the working directory
    for key in ("cov", "block"):
        if getattr(args, key, None):
            setattr(cfg, key, _read_json(getattr(args, key)))
    return cfg


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc


def _contract(args, suffix=""):
    T1, T2 = getattr(args, "T1" + suffix), getattr(args, "T2" + suffix)
    if T1 is None or T2 is None:
        raise DomainError(f"--T1{suffix} and --T2{suffix} are required")
    style = getattr(args, "style" + suffix)
    r = getattr(args, "rw" + suffix)
    if style == "futures" and r is None:
        raise DomainError(f"--style{suffix} futures needs --rw{suffix}")
    return ContractSpec(T1, T2, WeightSpec(style, T2 - T1, r if style == "futures" else None))


def _need(value, what):
    if value is None:
        raise DomainError(f"{what} is required")
    return value


def _table_payoff(text):
    try:
        pts = [tuple(float(v) for v in item.split(":")) for item in text.split(",")]
    except ValueError:
        raise DomainError(f"bad payoff table {text!r}, expected x:y,x:y,...") from None
    xs, ys = zip(*pts)
    return TablePayoff(xs, ys)


def delta_report(curve, directions, sigma, Q, req):
    """One row per direction: label, m(h), delta and a degenerate-variance flag.

    Parameters
    ----------
    directions : list of (label, Curve)
    """
    law = gaussian_law(curve, sigma, Q, req)
    rows = []
    for label, h in directions:
        rows.append({"label": label, "m_h": m_of_g(h, req.contract, req.t),
                     "delta": delta_gateaux(curve, h, sigma, Q, req), "degenerate": law.sd == 0.0})
    return rows


def _directions(spec, curve, Q):
    if spec == "eigen":
        if Q is None:
            raise DomainError("eigen directions need a covariance")
        return [(f"e{k + 1}", e) for k, e in enumerate(Q.eigenfunctions)]
    if spec == "grid":
        return [(f"b{k}", e) for k, e in enumerate(grid_basis(curve.knots, curve.alpha_tilde))]
    return [(p, load_curve(p)) for p in spec.split(",")]


def _cmd_curve_fit(args, cfg):
    quotes = parse_quotes(args.quotes)
    g, rep = fit_curve(quotes, smoothness=cfg.smoothness, alpha_tilde=cfg.alpha_tilde, fill=cfg.fill)
    save_curve(g, args.out)
    out = rep.to_dict()
    out["out"] = args.out
    return out


def _cmd_curve_show(args, cfg):
    g = load_curve(args.curve)
    xs = args.x if args.x is not None else list(g.nodes)
    return {"alpha_tilde": g.alpha_tilde, "n_knots": int(g.knots.size), "norm": norm(g),
            "values": [{"x": float(x), "g": float(evaluate(g, x))} for x in xs]}


def _cmd_price(args, cfg):
    g = load_curve(args.curve)
    kind = args.kind
    r = cfg.r
    if kind == "margrabe":
        block = _need(cfg.block_cov(), "--block")
        g2 = load_curve(_need(args.curve2, "--curve2"))
        T = _need(args.T, "--T")
        if args.tau > T:
            raise DomainError(f"exercise time tau={args.tau} must satisfy tau <= T={T}")
        sig = (cfg.sigma_spec(), cfg.sigma_spec(True))
        f1, f2 = evaluate(g, T - args.t), evaluate(g2, T - args.t)
        S2 = margrabe_variance(sig, block, T, args.t, args.tau)
        disc = math.exp(-r * (args.tau - args.t))
        return {"price": price_margrabe(f1, f2, S2, disc), "diagnostics": {"f1": f1, "f2": f2, "Sigma2": S2}}

    contract = _contract(args)
    sigma = cfg.sigma_spec()
    if kind in ("call", "put", "nig", "custom"):
        if kind == "custom":
            payoff = _table_payoff(_need(args.table, "--table"))
        else:
            K = _need(args.K, "--K")
            payoff = Put(K) if kind == "put" else Call(K)
        req = PricingRequest(contract, args.t, args.tau, r, payoff=payoff)
        Q = _need(cfg.covariance(), "a covariance (--cov or config 'cov')")
        law = gaussian_law(g, sigma, Q, req)
        diag = {"xi2": law.var, "m": law.mean}
        if kind == "nig":
            d, gm = _need(cfg.ig_delta, "--ig-delta"), _need(cfg.ig_gamma, "--ig-gamma")
            price = price_call_nig(g, sigma, Q, d, gm, req, damping=cfg.damping, n_fft=cfg.n_fft)
            noise = NoiseSpec("nig", Q, d, gm)
        else:
            price = price_european_gaussian(g, sigma, Q, req)
            noise = NoiseSpec("gaussian", Q)
        out = {"price": price, "xi2": law.var, "m": law.mean, "diagnostics": diag}
        if args.mc:
            mc = mc_european(g, sigma, noise, req, cfg.n_paths, cfg.n_steps, cfg.seed,
                             chunk_size=cfg.chunk_size, workers=cfg.workers)
            out["mc"] = mc.to_dict()
            out["stderr"] = mc.stderr
        return out

    contract2 = _contract(args, "b")
    req = PricingRequest(contract, args.t, args.tau, r, K=args.K if args.K is not None else 0.0,
                         contract2=contract2)
    if kind == "spread":
        Q = _need(cfg.covariance(), "a covariance (--cov or config 'cov')")
        payoff = Spread(req.K)
        price = price_calendar_spread(g, sigma, Q, (contract, contract2), req, payoff)
        law = calendar_law(g, sigma, Q, (contract, contract2), args.t, args.tau)
        out = {"price": price, "diagnostics": {"m": law.mean.tolist(), "covariances": law.cov.tolist()}}
        if args.mc:
            mc = mc_calendar_spread(g, sigma, NoiseSpec("gaussian", Q), (contract, contract2), req, payoff,
                                    cfg.n_paths, cfg.n_steps, cfg.seed, chunk_size=cfg.chunk_size,
                                    workers=cfg.workers)
            out["mc"] = mc.to_dict()
            out["stderr"] = mc.stderr
        return out
    # quanto
    block = _need(cfg.block_cov(), "--block")
    g2 = load_curve(_need(args.curve2, "--curve2"))
    payoffs = (Call(_need(args.K, "--K")), ConstantPayoff() if args.K2 is None else Call(args.K2))
    price = price_quanto(g, g2, block, (contract, contract2), payoffs, req)
    law = quanto_law(g, g2, block, (contract, contract2), args.t, args.tau)
    out = {"price": price, "diagnostics": {"m": law.mean.tolist(), "covariances": law.cov.tolist()}}
    if args.mc:
        mc = mc_quanto(g, g2, block, (contract, contract2), payoffs, req, None, cfg.n_paths, cfg.n_steps,
                       cfg.seed, chunk_size=cfg.chunk_size, workers=cfg.workers)
        out["mc"] = mc.to_dict()
        out["stderr"] = mc.stderr
    return out


def _cmd_delta(args, cfg):
    g = load_curve(args.curve)
    contract = _contract(args)
    req = PricingRequest(contract, args.t, args.tau, cfg.r, payoff=Put(args.K) if args.put else Call(args.K))
    Q = _need(cfg.covariance(), "a covariance (--cov or config 'cov')")
    rows = delta_report(g, _directions(args.directions, g, Q), cfg.sigma_spec(), Q, req)
    return {"rows": rows}


def _cmd_simulate(args, cfg):
    g = load_curve(args.curve)
    Q = _need(cfg.covariance(), "a covariance (--cov or config 'cov')")
    if args.noise == "nig":
        noise = NoiseSpec("nig", Q, _need(cfg.ig_delta, "--ig-delta"), _need(cfg.ig_gamma, "--ig-gamma"))
    else:
        noise = NoiseSpec("gaussian", Q)
    plan = SimPlan(0.0, args.t1, cfg.n_steps, cfg.n_paths, cfg.seed, model=args.model,
                   chunk_size=cfg.chunk_size, workers=cfg.workers)
    probes = [TenorProbe(x) for x in args.x] + [ForwardProbe(T) for T in args.maturities]
    ps = simulate_mild(g, cfg.sigma_spec(), noise, plan, probes)
    if args.out:
        ps.to_csv(args.out, max_paths=args.dump_paths)
    summary = []
    for k, p in enumerate(ps.probes):
        v = ps.terminal(k)
        with np.errstate(over="ignore"):
            sd = float(np.std(v, ddof=1))
        if not (np.all(np.isfinite(v)) and math.isfinite(sd)):
            raise NumericalFailure(f"probe {p.label}: simulated values overflow double precision")
        summary.append({"probe": p.label, "mean": float(np.mean(v)), "sd": sd,
                        "stderr": sd / math.sqrt(v.size)})
    return {"model": args.model, "n_paths": plan.n_paths, "n_steps": plan.n_steps, "seed": plan.seed,
            "terminal": summary, "out": args.out}


def _cmd_cov_validate(args, cfg):
    block = cfg.block_cov()
    return validate_block(block).to_dict()


_COMMANDS = {
    "curve-fit": _cmd_curve_fit, "curve-show": _cmd_curve_show, "price": _cmd_price,
    "delta": _cmd_delta, "simulate": _cmd_simulate, "cov-validate": _cmd_cov_validate,
}


def _table(obj, indent=""):
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not all(isinstance(x, (int, float)) for x in v):
                lines.append(f"{indent}{k}:")
                lines.extend(_table(v, indent + "  "))
            else:
                lines.append(f"{indent}{k:<20} {_fmt(v)}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, dict):
                lines.append(indent + "  ".join(f"{k}={_fmt(v)}" for k, v in item.items()))
            else:
                lines.append(f"{indent}{_fmt(item)}")
    return lines


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def run(argv=None, stdout=None, stderr=None):
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return 1
    except SystemExit as exc:
        # --help and --version
        return 0 if exc.code in (0, None) else 1
    try:
        cfg = _config(args)
        out = _COMMANDS[args.command](args, cfg)
    except (NumericRangeError, OperatorError, NumericalFailure, FloatingPointError,
            np.linalg.LinAlgError, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return 2
    except (EnergyFwdError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    out = _jsonable(out)
    if args.json:
        json.dump(out, stdout, indent=2)
        stdout.write("\n")
    else:
        stdout.write("\n".join(_table(out)) + "\n")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
