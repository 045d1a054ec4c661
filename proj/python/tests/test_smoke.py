import math

import pytest

import caes


def test_coefficients_and_state():
    cfg = caes.huntorf_config()
    co = caes.compute_coefficients(cfg, 60.0)
    assert co.dt == 60.0
    assert co.a2 == pytest.approx(0.0010395, rel=0.01)
    s = caes.state_from_pT(50e5, 300.0, cfg)
    assert caes.ideal_gas_residual(s, cfg) < 1e-12
    assert s.m_s == pytest.approx(50e5 * cfg.V_s / (cfg.R * 300.0), rel=1e-12)


def test_simulate_mass_bookkeeping():
    cfg = caes.huntorf_config()
    co = caes.compute_coefficients(cfg, 60.0)
    s0 = caes.state_from_pT(50e5, 300.0, cfg)
    tr = caes.simulate(s0, [caes.StepMode.charge(40.0)] * 30, cfg, co)
    assert len(tr.states) == 30
    assert tr.states[-1].m_s == pytest.approx(s0.m_s + 30 * 60 * 40.0, rel=1e-12)
    assert tr.states[-1].p_s > s0.p_s


def test_idle_stays_near_rest():
    cfg = caes.huntorf_config()
    co = caes.compute_coefficients(cfg, 60.0)
    s0 = caes.state_from_pT(50e5, cfg.T_RW, cfg)
    tr = caes.simulate(s0, [caes.StepMode.idle()] * 10, cfg, co)
    assert tr.states[-1].T_s == pytest.approx(cfg.T_RW, abs=1e-9)


def test_errors_become_value_error():
    cfg = caes.huntorf_config()
    with pytest.raises(ValueError):
        caes.compute_coefficients(cfg, 0.0)
    with pytest.raises(ValueError):
        caes.find_scenario("C9")


def test_compare_with_self_is_zero():
    cfg = caes.huntorf_config()
    co = caes.compute_coefficients(cfg, 60.0)
    tr = caes.simulate(caes.state_from_pT(50e5, 300.0, cfg), [caes.StepMode.discharge(100.0)] * 20, cfg, co)
    r = caes.compare_states(tr.states, tr.states)
    assert r.mape_p == 0.0 and r.mae_T == 0.0
    assert len(caes.table_scenarios()) == 17


def test_small_schedule_matches_prices():
    cfg = caes.huntorf_config()
    prices = caes.PriceSeries(1200.0, [20.0, 90.0])
    sol = caes.solve_schedule(cfg, prices, caes.ScheduleModel.model2_milp)
    assert sol.status in ("optimal", "gap-terminated")
    assert len(sol.alpha) == 2
    assert sol.objective == pytest.approx(caes.schedule_profit(cfg, prices, sol.P_ch, sol.P_dch), rel=1e-6)
    rep = caes.verify_schedule(sol, cfg)
    assert len(rep.states) >= 2
    assert math.isfinite(rep.worst_excursion)


def test_flat_prices_equal_to_costs_give_idle_oracle():
    cfg = caes.huntorf_config()
    sol = caes.oracle_enumerate(cfg, caes.PriceSeries(1200.0, [3.0, 3.0, 3.0]), 3)
    assert sol.objective == 0.0
    assert sol.alpha == [0, 0, 0] and sol.beta == [0, 0, 0]
