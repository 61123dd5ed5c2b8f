import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings

from energyfwd import Curve, norm, swap_price
from energyfwd.errors import DomainError, QuoteParseError, SchemaError
from energyfwd.market_io import (CURVE_SCHEMA, Quote, QuoteSet, curve_from_json, curve_to_json,
                                 default_fit_knots, fit_curve, load_curve, parse_quotes, quotes_from_curve,
                                 save_curve, write_quotes)

from _support import curves, forward_curve, random_curve

HEADER = "t,T1,T2,style,r,price\n"


def strip(n, span=4.0, style="uniform", r=None):
    edges = np.linspace(0.0, span, n + 1)
    return [(a, b, style) if r is None else (a, b, style, r) for a, b in zip(edges[:-1], edges[1:])]


class TestParse:
    def test_examples(self):
        assert len(parse_quotes(io.StringIO(HEADER))) == 0
        qs = parse_quotes(io.StringIO(HEADER + "0,1,1.25,uniform,,41.5\n"))
        assert len(qs) == 1 and qs.quotes[0] == Quote(0.0, 1.0, 1.25, "uniform", 41.5, None)
        qs = parse_quotes(HEADER + "0,1,2,forward,,40\n0,1,2,futures,0.05,40\n0,2,3,UNIT,,12\n")
        assert [q.style for q in qs] == ["uniform", "futures", "unit"]
        assert qs.quotes[1].r == 0.05 and qs.quotes[0].r is None

    def test_header_without_rate(self):
        qs = parse_quotes(io.StringIO("t,T1,T2,style,price\n0,1,2,uniform,40\n"))
        assert qs.prices.tolist() == [40.0]

    @pytest.mark.parametrize("row, needle", [
        ("0,2,1,uniform,,40", "T2=1.0 must exceed"),
        ("0,1,1,uniform,,40", "must exceed"),
        ("0,1,2,uniform,,abc", "not a number"),
        ("0,1,2,weekly,,40", "unknown style"),
        ("0,1,2,futures,,40", "needs a rate"),
        ("0.5,0.2,1,uniform,,40", "before valuation"),
        ("0,1,2,uniform,,nan", "not finite"),
        ("0,1,,uniform,,40", "missing value"),
    ])
    def test_errors_name_the_line(self, row, needle):
        src = HEADER + "0,1,2,uniform,,40\n\n" + row + "\n"
        with pytest.raises(QuoteParseError, match=needle) as exc:
            parse_quotes(io.StringIO(src))
        assert exc.value.line == 4
        assert str(exc.value).startswith("line 4:")

    def test_header_and_times(self):
        with pytest.raises(QuoteParseError, match="header"):
            parse_quotes(io.StringIO("a,b\n1,2\n"))
        with pytest.raises(QuoteParseError, match="valuation time"):
            parse_quotes(io.StringIO(HEADER + "0,1,2,uniform,,40\n0.1,1,2,uniform,,40\n"))
        with pytest.raises(DomainError):
            QuoteSet([Quote(0.0, 1.0, 2.0, "uniform", 1.0), Quote(0.1, 1.0, 2.0, "uniform", 1.0)])
        with pytest.raises(DomainError):
            parse_quotes("/nonexistent/quotes.csv")

    def test_write_round_trip(self, tmp_path):
        qs = quotes_from_curve(forward_curve(), strip(5) + [(0.5, 1.7, "futures", 0.04)], t=0.0)
        path = tmp_path / "q.csv"
        write_quotes(qs, path)
        back = parse_quotes(path)
        assert back.quotes == qs.quotes


class TestFit:
    def test_flat_quote_gives_constant(self):
        qs = QuoteSet([Quote(0.0, 1.0, 1.25, "uniform", 42.0)])
        g, rep = fit_curve(qs)
        assert np.all(g.slopes == 0.0) or np.max(np.abs(g.slopes)) <= 1e-12
        assert g.f0 == pytest.approx(42.0, rel=1e-14)
        assert rep.max_abs_residual <= 1e-12 and rep.exact

    def test_two_quotes(self):
        qs = QuoteSet([Quote(0.0, 0.5, 1.0, "uniform", 40.0), Quote(0.0, 1.0, 2.0, "futures", 44.0, 0.05)])
        g, rep = fit_curve(qs)
        for q in qs:
            assert abs(swap_price(g, q.contract, 0.0) - q.price) <= 1e-8
        assert np.allclose(rep.residuals, [swap_price(g, q.contract, 0.0) - q.price for q in qs], atol=0)

    def test_round_trip_and_convergence(self):
        g_true = forward_curve()
        errs = []
        for n in (2, 4, 8, 16, 32):
            qs = quotes_from_curve(g_true, strip(n, 5.0))
            g, rep = fit_curve(qs)
            assert rep.max_abs_residual <= 1e-8
            for q in qs:
                assert abs(swap_price(g, q.contract, 0.0) - q.price) <= 1e-8
            errs.append(norm(g - g_true))
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_overlapping_cascade(self):
        g_true = forward_curve()
        rows = strip(12, 1.0) + strip(4, 1.0, "futures", 0.03) + [(0.0, 1.0, "uniform"), (1.0, 2.0, "unit")]
        qs = quotes_from_curve(g_true, rows)
        # the year quote is the mean of the twelve months
        with pytest.warns(RuntimeWarning, match="rank 17 < 18"):
            g, rep = fit_curve(qs)
        assert rep.max_abs_residual <= 1e-8

    def test_dependent_quotes_warn(self):
        qs = QuoteSet([Quote(0.0, 0.0, 1.0, "uniform", 40.0)] * 2 + [Quote(0.0, 1.0, 2.0, "uniform", 41.0)])
        with pytest.warns(RuntimeWarning, match="linearly dependent"):
            g, rep = fit_curve(qs)
        assert rep.rank == 2 and not rep.exact
        assert rep.max_abs_residual <= 1e-8

    def test_smoothness_tradeoff(self):
        qs = quotes_from_curve(forward_curve(), strip(8, 4.0))
        fits = [fit_curve(qs, smoothness=s) for s in (0.0, 1e-4, 1e-1, 10.0)]
        slope_norms = [norm(g - Curve.constant(g.f0)) for g, _ in fits]
        res = [rep.max_abs_residual for _, rep in fits]
        assert all(b <= a * (1 + 1e-9) for a, b in zip(slope_norms, slope_norms[1:]))
        assert all(b >= a - 1e-12 for a, b in zip(res, res[1:]))
        with pytest.raises(DomainError):
            fit_curve(qs, smoothness=-1.0)
        with pytest.raises(DomainError):
            fit_curve(QuoteSet([]))

    def test_deterministic(self):
        qs = quotes_from_curve(forward_curve(), strip(10, 4.0))
        a, _ = fit_curve(qs, smoothness=1e-3)
        b, _ = fit_curve(qs, smoothness=1e-3)
        assert a.f0 == b.f0 and np.array_equal(a.knots, b.knots) and np.array_equal(a.slopes, b.slopes)

    def test_default_knots(self):
        qs = quotes_from_curve(forward_curve(), [(1.0, 1.5, "uniform")], t=0.2)
        k = default_fit_knots(qs, fill=2)
        assert np.allclose(k, [0.4, 0.8, 1.05, 1.3])


class TestPersistence:
    def test_bit_faithful(self, tmp_path):
        rng = np.random.default_rng(60)
        for i in range(10):
            g = random_curve(rng, alpha=float(rng.uniform(0.2, 3.0)), n=20)
            path = tmp_path / f"c{i}.json"
            save_curve(g, path)
            h = load_curve(path)
            assert h.f0 == g.f0 and h.alpha_tilde == g.alpha_tilde
            assert np.array_equal(h.knots, g.knots) and np.array_equal(h.slopes, g.slopes)
            assert norm(h) == norm(g)

    @settings(max_examples=50, deadline=None)
    @given(curves())
    def test_json_round_trip(self, g):
        h = curve_from_json(json.loads(json.dumps(curve_to_json(g))))
        assert h.same_as(g) and norm(h) == norm(g)

    def test_schema_errors(self, tmp_path):
        d = curve_to_json(forward_curve())
        assert d["schema"] == CURVE_SCHEMA
        bad = dict(d)
        del bad["alpha_tilde"]
        with pytest.raises(SchemaError, match="alpha_tilde") as exc:
            curve_from_json(bad)
        assert exc.value.version == CURVE_SCHEMA
        with pytest.raises(SchemaError) as exc:
            curve_from_json({**d, "schema": "energyfwd.curve/99"})
        assert exc.value.version == "energyfwd.curve/99"
        with pytest.raises(SchemaError):
            curve_from_json([1, 2])
        with pytest.raises(SchemaError):
            curve_from_json({**d, "knots": "abc"})
        p = tmp_path / "broken.json"
        p.write_text("{not json")
        with pytest.raises(SchemaError):
            load_curve(p)
        # no schema field is read as the current version
        plain = {k: v for k, v in d.items() if k != "schema"}
        assert curve_from_json(plain).same_as(forward_curve())
        assert math.isfinite(norm(curve_from_json(plain)))
