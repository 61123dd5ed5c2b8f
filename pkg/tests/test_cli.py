import io
import json
import math

import numpy as np
import pytest
from scipy.stats import norm as normal

from energyfwd import BlockCov, CovOp, Curve, NoiseSpec, SigmaSpec, validate_block
from energyfwd.cli import delta_report, run
from energyfwd.market_io import fit_curve, load_curve, parse_quotes, quotes_from_curve, save_curve, write_quotes
from energyfwd.montecarlo import mc_european
from energyfwd.pricing import (Call, PricingRequest, TablePayoff, delta_gateaux, gaussian_law, m_of_g,
                               price_european_gaussian)

from _support import contract, forward_curve, random_block, random_curve, smooth_cov


@pytest.fixture
def ws(tmp_path, monkeypatch):
    """Working directory with a curve, a covariance, a block and a config."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("ENERGYFWD_CONFIG", raising=False)
    save_curve(forward_curve(), "c.json")
    save_curve(forward_curve(10.0, 0.5), "c2.json")
    Q1, Q2 = smooth_cov((0.5, 0.2, 0.08)), smooth_cov((0.3, 0.1), offset=2)
    (tmp_path / "cov.json").write_text(json.dumps(Q1.to_dict()))
    B = random_block(np.random.default_rng(70), Q1, Q2, 0.8)
    (tmp_path / "b.json").write_text(json.dumps(B.to_dict()))
    bad = BlockCov(Q1, Q2, 1.5 * B.C)
    (tmp_path / "bad.json").write_text(json.dumps(bad.to_dict()))
    (tmp_path / "cfg.json").write_text(json.dumps({"cov": "cov.json", "r": 0.03, "n_paths": 20000,
                                                   "n_steps": 10, "seed": 7}))
    return tmp_path


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(argv):
    code, out, err = call(argv + ["--json"])
    assert code == 0, err
    return json.loads(out)


def lib_cov(ws):
    return CovOp.from_dict(json.loads((ws / "cov.json").read_text()))


PRICE = ["price", "call", "--curve", "c.json", "--t", "0", "--tau", "0.25", "--T1", "0.5", "--T2", "0.75",
         "--K", "40", "--config", "cfg.json"]


class TestPrice:
    def test_call_matches_library_bitwise(self, ws):
        out = call_json(PRICE)
        g, Q = load_curve("c.json"), lib_cov(ws)
        req = PricingRequest(contract(0.5, 0.75), 0.0, 0.25, 0.03, K=40.0)
        law = gaussian_law(g, SigmaSpec.identity(), Q, req)
        assert out["price"] == price_european_gaussian(g, SigmaSpec.identity(), Q, req)
        assert out["xi2"] == law.var and out["m"] == law.mean

    def test_custom_and_put(self, ws):
        out = call_json(["price", "custom", "--curve", "c.json", "--tau", "0.25", "--T1", "0.5", "--T2", "0.75",
                         "--table", "38:2,40:0,42:1", "--config", "cfg.json"])
        g, Q = load_curve("c.json"), lib_cov(ws)
        req = PricingRequest(contract(0.5, 0.75), 0.0, 0.25, 0.03, payoff=TablePayoff((38, 40, 42), (2, 0, 1)))
        assert out["price"] == price_european_gaussian(g, SigmaSpec.identity(), Q, req)
        put = call_json(PRICE[:1] + ["put"] + PRICE[2:])
        c = call_json(PRICE)
        assert c["price"] - put["price"] == pytest.approx(math.exp(-0.03 * 0.25) * (c["m"] - 40.0), abs=1e-12)

    def test_tau_beyond_T1(self, ws):
        argv = list(PRICE)
        argv[argv.index("--tau") + 1] = "0.6"
        code, out, err = call(argv)
        assert code == 1 and out == ""
        assert "tau" in err and "T1" in err

    def test_usage_errors(self, ws):
        code, _, err = call(PRICE + ["--bogus"])
        assert code == 1 and "usage" in err
        code, _, err = call(["price", "call", "--curve", "c.json", "--tau", "0.25", "--T1", "0.5", "--T2", "0.75",
                             "--config", "cfg.json"])
        assert code == 1 and "--K" in err
        code, _, err = call(["price", "call", "--curve", "missing.json", "--tau", "0.25", "--T1", "0.5",
                             "--T2", "0.75", "--K", "40", "--config", "cfg.json"])
        assert code == 1
        assert call(["--version"])[0] == 0

    def test_mc_seed_reproducible(self, ws):
        a = call_json(PRICE + ["--mc"])
        b = call_json(PRICE + ["--mc"])
        c = call_json(PRICE + ["--mc", "--seed", "8"])
        assert a["mc"] == b["mc"] and a["mc"] != c["mc"]
        g, Q = load_curve("c.json"), lib_cov(ws)
        req = PricingRequest(contract(0.5, 0.75), 0.0, 0.25, 0.03, K=40.0)
        lib = mc_european(g, SigmaSpec.identity(), NoiseSpec("gaussian", Q), req, 20000, 10, 7)
        assert a["mc"]["price"] == lib.price and a["stderr"] == lib.stderr

    def test_env_config(self, ws, monkeypatch):
        monkeypatch.setenv("ENERGYFWD_CONFIG", str(ws / "cfg.json"))
        argv = [a for a in PRICE if a not in ("--config", "cfg.json")]
        assert call_json(argv)["price"] == call_json(PRICE)["price"]
        monkeypatch.delenv("ENERGYFWD_CONFIG")
        code, _, err = call(argv)
        assert code == 1 and "covariance" in err

    def test_two_leg_kinds(self, ws):
        base = ["--curve", "c.json", "--tau", "0.4", "--T1", "0.5", "--T2", "0.75", "--T1b", "0.75",
                "--T2b", "1.0", "--config", "cfg.json"]
        spread = call_json(["price", "spread"] + base + ["--K", "0.1"])
        assert spread["price"] > 0
        quanto = call_json(["price", "quanto", "--curve2", "c2.json", "--block", "b.json", "--K", "40"] + base)
        assert quanto["price"] > 0
        marg = call_json(["price", "margrabe", "--curve", "c.json", "--curve2", "c2.json", "--block", "b.json",
                          "--T", "1.0", "--tau", "0.5", "--config", "cfg.json"])
        assert marg["price"] >= 0
        nig = call_json(PRICE[:1] + ["nig"] + PRICE[2:] + ["--ig-delta", "2", "--ig-gamma", "2"])
        assert nig["price"] > 0

    def test_table_output(self, ws):
        code, out, _ = call(PRICE)
        assert code == 0 and out.startswith("price")


class TestOtherCommands:
    def test_cov_validate(self, ws):
        out = call_json(["cov-validate", "--block", "b.json"])
        rep = validate_block(BlockCov.from_dict(json.loads((ws / "b.json").read_text())))
        assert out["valid"] is True
        assert out["spectral_norm"] == rep.spectral_norm and out["min_eig"] == rep.min_eig
        bad = call_json(["cov-validate", "--block", "bad.json"])
        assert bad["valid"] is False

    def test_curve_fit_and_show(self, ws):
        rows = [(0.0, 0.25, "uniform"), (0.25, 0.5, "uniform"), (0.5, 1.0, "futures", 0.05)]
        write_quotes(quotes_from_curve(forward_curve(), rows), "q.csv")
        out = call_json(["curve-fit", "--quotes", "q.csv", "--out", "fit.json"])
        g, rep = fit_curve(parse_quotes("q.csv"))
        h = load_curve("fit.json")
        assert h.same_as(g) and out["max_abs_residual"] == rep.max_abs_residual
        show = call_json(["curve-show", "--curve", "fit.json", "--x", "0,0.3"])
        assert show["values"][0]["g"] == g.f0
        (ws / "bad.csv").write_text("t,T1,T2,style,r,price\n0,2,1,uniform,,40\n")
        code, _, err = call(["curve-fit", "--quotes", "bad.csv", "--out", "x.json"])
        assert code == 1 and "line 2" in err

    def test_simulate(self, ws):
        argv = ["simulate", "--curve", "c.json", "--t1", "0.5", "--paths", "2000", "--steps", "5", "--x", "0,0.5",
                "--config", "cfg.json", "--out", "paths.csv"]
        a, b = call_json(argv), call_json(argv)
        assert a == b and len(a["terminal"]) == 2
        assert (ws / "paths.csv").read_text().count("\n") > 10

    def test_delta_rows(self, ws):
        out = call_json(["delta", "--curve", "c.json", "--tau", "0.25", "--T1", "0.5", "--T2", "0.75", "--K", "40",
                         "--config", "cfg.json"])
        g, Q = load_curve("c.json"), lib_cov(ws)
        req = PricingRequest(contract(0.5, 0.75), 0.0, 0.25, 0.03, K=40.0)
        law = gaussian_law(g, SigmaSpec.identity(), Q, req)
        phi = normal.cdf((law.mean - 40.0) / law.sd)
        assert [r["label"] for r in out["rows"]] == ["e1", "e2", "e3"]
        for r, e in zip(out["rows"], Q.eigenfunctions):
            assert r["m_h"] == m_of_g(e, req.contract, 0.0)
            assert r["delta"] == pytest.approx(req.disc * r["m_h"] * phi, rel=1e-12)
            assert r["degenerate"] is False


class TestDeltaReport:
    def test_zero_direction_and_sum_rule(self):
        Q, g = smooth_cov(), forward_curve()
        c = contract(1.0, 1.25)
        req = PricingRequest(c, 0.0, 0.5, 0.0, payoff=Call(m_of_g(g, c, 0.0)))
        rng = np.random.default_rng(71)
        h1, h2 = random_curve(rng), random_curve(rng)
        rows = delta_report(g, [("h1", h1), ("h2", h2), ("sum", h1 + h2)], SigmaSpec.identity(), Q, req)
        assert rows[2]["delta"] == pytest.approx(rows[0]["delta"] + rows[1]["delta"], rel=1e-12, abs=1e-14)
        # falls from 1 to 0 on [0, 0.5] and stays at 0 over the delivery window
        vanish = Curve(1.0, [0.5], [-2.0])
        zero = delta_report(g, [("z", vanish)], SigmaSpec.identity(), Q, req)[0]
        assert zero["m_h"] == 0.0 and zero["delta"] == 0.0
        flat = delta_report(g, [("h", h1)], SigmaSpec.zero(), Q, req)[0]
        assert flat["degenerate"] is True
        assert rows[0]["delta"] == delta_gateaux(g, h1, SigmaSpec.identity(), Q, req)


class TestExitCodes:
    @pytest.mark.parametrize("slope", [800.0, 2000.0])
    def test_numerical_failure_exit_code(self, ws, slope):
        # exp(400) is finite but its square is not; exp(1000) overflows outright
        save_curve(Curve(0.0, [1.0], [slope]), "huge.json")
        code, out, err = call(["simulate", "--curve", "huge.json", "--t1", "0.5", "--paths", "100", "--steps", "2",
                               "--model", "geometric", "--x", "0.5", "--config", "cfg.json"])
        assert code == 2 and "numerical failure" in err and out == ""
