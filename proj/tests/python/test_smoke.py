import json
import math

import numpy as np
import pytest

import fcns


def base_states():
    return fcns.EndStates(v_plus=2.0, u_minus=1.0, u_plus=0.0, mu=1.0)


def test_pressure():
    law = fcns.PressureLaw(1e-2, 1.0)
    assert fcns.p_eval(law, 2.0) == pytest.approx(1e-2)
    assert law.v_minus() == pytest.approx(1.01)
    d1, d2 = law.derivatives(1.5)
    assert d2 / d1**2 == pytest.approx(2.0 / law(1.5), rel=1e-12)
    with pytest.raises(fcns.DomainError):
        law(1.0)
    with pytest.raises(ValueError):
        fcns.PressureLaw(1e-2, 0.5)


def test_limit_profile():
    lp = fcns.LimitProfile(base_states())
    assert lp.speed == pytest.approx(1.0)
    assert lp.p_minus == pytest.approx(1.0)
    x = np.linspace(0.1, 5.0, 7)
    assert np.all(np.abs(lp.w(x)) < 1e-12)
    assert np.all(lp.w(-x) == 1.0)
    assert lp.v(0.0) == pytest.approx(1.0)
    with pytest.raises(fcns.InvalidEndStates):
        fcns.EndStates(v_plus=2.0, u_minus=0.0, u_plus=1.0)


def test_eps_profile_and_zones():
    es = base_states()
    law = fcns.PressureLaw(1e-2, 1.0)
    assert fcns.eps_speed(law, es) == pytest.approx(1.0, rel=1e-14)
    assert fcns.eps_speed_printed(law, es) == pytest.approx(math.sqrt(0.99))
    p = fcns.eps_profile(law, es, n=4001)
    assert p.v_at_origin == 1.0 + 0.1
    assert p.ode_residual() < 1e-8
    assert np.all(np.diff(p.theta_samples) > 0)
    assert len(p.x) == len(p.v_samples) == 4001
    assert p.v_interp(0.0) == pytest.approx(1.1, rel=1e-8)
    z = fcns.three_zone(p)
    assert z["x_min"] < 0 < z["sup_err_free"]
    assert fcns.fit_loglog_slope([1e-2, 1e-4], [1e-1, 1e-2]) == pytest.approx(0.5)


def test_hypotheses_and_oracle():
    r2 = fcns.validate_hypotheses(base_states())
    assert abs(r2["h3_residual"]) < 1e-6 and r2["h4_ok"]
    r3 = fcns.validate_hypotheses(fcns.EndStates(v_plus=3.0), X=20.0, n=2001)
    assert r3["h3_residual"] == pytest.approx(0.75, abs=1e-3)
    fb = fcns.free_boundary_oracle(base_states(), h=0.02, dt=2e-3, T=0.2)
    assert fb["status"] == "converged"
    assert fb["x_err"] < 0.02 and fb["p_err"] < 0.05


def test_short_stability_run():
    p = fcns.eps_profile(fcns.PressureLaw(1e-2, 1.0), base_states())
    r = fcns.stability(p, T=0.3, h=0.05)
    assert r["min_v"] > 1.0
    assert r["t"][0] == 0.0 and r["t"][-1] == pytest.approx(0.3)
    assert len(r["sup_dev_v"]) == len(r["t"])


def test_scenario_runner(tmp_path):
    assert "free-boundary" in fcns.scenarios()
    cfg = fcns.resolve_config("converge", epsilons=[1e-2, 1e-3], gamma=1)
    assert cfg["zone_k"] == 2 and cfg["epsilons"] == [1e-2, 1e-3]
    with pytest.raises(fcns.ConfigError):
        fcns.resolve_config("simulate", epsilon=1e-2, gamma=0.5)
    with pytest.raises(fcns.ConfigError):
        fcns.resolve_config("profile", bogus=1)
    code, log = fcns.run_scenario("profile", tmp_path)
    assert code == 0, log
    header = (tmp_path / "profile.csv").read_text().splitlines()[0]
    assert header == "x,v,u,w,p"
    meta = json.loads((tmp_path / "profile.meta.json").read_text())
    assert meta["scenario"] == "profile"
    code, _ = fcns.run_scenario("free-boundary", tmp_path / "fb", v_plus=3.0, oracle_tw=True)
    assert code == 4
