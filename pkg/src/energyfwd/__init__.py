"""Energy forward curves in the weighted space H_alpha.

Curves, delivery-period swap operators, covariance operators, simulation of
the mild forward dynamics and option pricing under Gaussian and NIG noise.
"""

from .curve_space import (
    AlphaWeight, Basis, Curve, evaluate, exp_curve, gram_schmidt, grid_basis,
    h_curve, inner_product, norm, project, shift,
)
from .delivery_operators import (
    ContractSpec, WeightSpec, apply_D, dual_D_apply_h, dual_general, eval_D_at,
    kernel_q, op_norm_bound, swap_price, w_cumulative,
)
from .covariance import (
    BlockCov, CovOp, SigmaSpec, qt_block, regression_operator, validate_block,
)
from .dynamics import (
    ForwardProbe, NoiseSpec, SimPlan, SwapProbe, TenorProbe, drift_mu, schwartz_curve,
    simulate_bivariate, simulate_geometric, simulate_mild,
)
from .pricing import (
    Call, Put, PricingRequest, TablePayoff, delta_gateaux, lipschitz_certificate,
    price_call_black76, price_call_gaussian, price_call_nig, price_calendar_spread,
    price_european_gaussian, price_margrabe, price_quanto, xi_squared,
)
from .market_io import fit_curve, load_curve, parse_quotes, save_curve

__version__ = "0.1.0"

__all__ = [
    "AlphaWeight", "Basis", "Curve", "evaluate", "exp_curve", "gram_schmidt", "grid_basis",
    "h_curve", "inner_product", "norm", "project", "shift",
    "ContractSpec", "WeightSpec", "apply_D", "dual_D_apply_h", "dual_general", "eval_D_at",
    "kernel_q", "op_norm_bound", "swap_price", "w_cumulative",
    "BlockCov", "CovOp", "SigmaSpec", "qt_block", "regression_operator", "validate_block",
    "ForwardProbe", "NoiseSpec", "SimPlan", "SwapProbe", "TenorProbe", "drift_mu", "schwartz_curve",
    "simulate_bivariate", "simulate_geometric", "simulate_mild",
    "Call", "Put", "PricingRequest", "TablePayoff", "delta_gateaux", "lipschitz_certificate",
    "price_call_black76", "price_call_gaussian", "price_call_nig", "price_calendar_spread",
    "price_european_gaussian", "price_margrabe", "price_quanto", "xi_squared",
    "fit_curve", "load_curve", "parse_quotes", "save_curve",
]
