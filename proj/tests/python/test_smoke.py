"""End-to-end smoke tests for the python bindings."""

import math

import pytest

import pvbsim


def steady_means(records, window_s=1.0):
    return {s.name: s.mean for s in pvbsim.steady_state_summary(records, window_s)}


def test_calibrated_array_hits_nameplate():
    params = pvbsim.PvParams.calibrated(165e3, 600)
    mpp = pvbsim.true_mpp(params, pvbsim.EnvConditions(1000.0, 25.0))
    assert mpp.power_w == pytest.approx(165e3, rel=5e-3)
    assert 250.0 < mpp.voltage_v < 400.0


def test_dark_array_is_dead():
    params = pvbsim.PvParams.calibrated(165e3, 600)
    env = pvbsim.EnvConditions(0.0, 25.0)
    assert pvbsim.pv_current(params, env, 100.0) == 0.0
    assert pvbsim.true_mpp(params, env).power_w == 0.0


def test_dispatch_examples():
    grid = pvbsim.GridRequest()
    grid.p_request_kw = 105.0
    res = pvbsim.dispatch(165.0, 50.0, grid, 0.60)
    assert res.dispatch.p_bat_ref_kw == pytest.approx(-10.0)
    assert res.dispatch.p_grid_set_kw == pytest.approx(105.0)
    assert res.dispatch.case_label == pvbsim.CaseLabel.Case1
    balance = (res.dispatch.p_pv_ref_kw + res.dispatch.p_bat_ref_kw
               - res.dispatch.p_grid_set_kw - 50.0)
    assert abs(balance) < 1e-9


def test_case1_preset_reproduces_power_flows():
    result = pvbsim.run(pvbsim.case_preset(1))
    assert result.summary.completed
    means = steady_means(result.records)
    assert means["p_pv_kw"] == pytest.approx(165.0, rel=0.02)
    assert means["p_grid_kw"] == pytest.approx(105.0, rel=0.02)
    assert means["p_bat_kw"] == pytest.approx(-10.0, abs=1.0)
    assert all(abs(r.balance_residual_kw) <= 0.165 for r in result.records)


def test_case5_imports_and_recovers():
    result = pvbsim.run(pvbsim.case_preset(5))
    means = steady_means(result.records)
    assert means["p_grid_kw"] == pytest.approx(-35.0, abs=1.5)
    assert means["p_bat_kw"] == pytest.approx(-10.0, abs=1.0)


def test_scenario_text_round_trip():
    scenario = pvbsim.case_preset(3)
    text = pvbsim.serialize_scenario(scenario)
    assert pvbsim.parse_scenario(text) == scenario


def test_parse_errors_surface_as_value_errors():
    with pytest.raises(ValueError):
        pvbsim.parse_scenario("[meta]\nduratoin = 1\n")
    with pytest.raises(ValueError):
        pvbsim.parse_scenario("[meta]\nduration = 1\n[battery]\n"
                              "soc_min = 0.95\nsoc_max = 0.2\n")


def test_battery_authority():
    params = pvbsim.BatteryParams()
    state = pvbsim.BatteryState()
    state.soc = 0.95
    nxt = pvbsim.battery_advance(state, params, -10.0, 1.0)
    assert nxt.p_bat_kw == 0.0


def test_csv_export(tmp_path):
    result = pvbsim.run(pvbsim.case_preset(2))
    out = tmp_path / "case2.csv"
    pvbsim.write_csv_file(str(out), result.records)
    header = out.read_text().splitlines()[0]
    assert header.startswith("t_s,irradiance_w_m2,p_pv_kw")


def test_dq_transform_alignment():
    theta = 0.7
    a = 10.0 * math.cos(theta)
    b = 10.0 * math.cos(theta - 2.0 * math.pi / 3.0)
    c = 10.0 * math.cos(theta + 2.0 * math.pi / 3.0)
    i_d, i_q = pvbsim.dq_transform(a, b, c, theta)
    assert i_d == pytest.approx(10.0, abs=1e-9)
    assert i_q == pytest.approx(0.0, abs=1e-9)
