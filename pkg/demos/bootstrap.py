"""Fit a curve to a strip of swap quotes and store it.

Quotes are generated from a known curve, written to CSV, read back and
fitted. The fitted curve reprices every quote and converges to the true
curve as the strip gets finer.
"""

import tempfile
from pathlib import Path

import numpy as np

from energyfwd import Curve, fit_curve, load_curve, norm, parse_quotes, save_curve
from energyfwd.market_io import quotes_from_curve, write_quotes

true = Curve.from_function(lambda x: 40.0 + 2.0 * np.sin(1.3 * x) - 0.3 * x, np.linspace(0.1, 5.0, 40))

for n in (4, 8, 16, 32):
    edges = np.linspace(0.0, 5.0, n + 1)
    rows = [(a, b, "uniform") for a, b in zip(edges[:-1], edges[1:])]
    g, rep = fit_curve(quotes_from_curve(true, rows))
    print(f"{n:3d} quotes: max residual {rep.max_abs_residual:.1e}, |g - true| = {norm(g - true):.4f}")

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    rows = [(0.0, 0.25, "uniform"), (0.25, 0.5, "uniform"), (0.5, 1.0, "futures", 0.05), (1.0, 2.0, "unit")]
    write_quotes(quotes_from_curve(true, rows), tmp / "quotes.csv")
    print((tmp / "quotes.csv").read_text())

    g, rep = fit_curve(parse_quotes(tmp / "quotes.csv"), smoothness=1e-3)
    print(f"smoothed fit: residuals {np.round(rep.residuals, 6)}")
    save_curve(g, tmp / "curve.json")
    print("reload is exact:", load_curve(tmp / "curve.json").same_as(g))
