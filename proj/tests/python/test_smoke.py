"""Smoke tests for the python bindings against the bundled feeder data."""

import os
from pathlib import Path

import numpy as np
import pytest

import voltvar


DATA = Path(os.environ.get("VOLTVAR_DATA", Path(__file__).resolve().parents[2] / "data"))


@pytest.fixture(scope="module")
def feeder16():
    return voltvar.FeederNetwork.from_json_file(str(DATA / "feeder16.json"))


@pytest.fixture(scope="module")
def gm16(feeder16):
    return voltvar.graph_matrices(feeder16)


def test_network_loads(feeder16):
    assert feeder16.n == 15
    assert feeder16.n_lines == 15
    assert not feeder16.meshed
    np.testing.assert_allclose(feeder16.injections_p(), -0.1)
    np.testing.assert_allclose(feeder16.q_upper(), 0.1)


def test_graph_matrices_are_consistent(gm16):
    X = np.asarray(gm16.X)
    B = np.asarray(gm16.B)
    assert X.shape == (15, 15)
    np.testing.assert_allclose(X, X.T, atol=1e-14)
    assert np.max(np.abs(B @ X - np.eye(15))) < 1e-8
    assert np.min(np.linalg.eigvalsh(X)) > 0
    np.testing.assert_allclose(np.asarray(gm16.slack_gain), 1.0, atol=1e-10)


def test_baseline_and_linear_flow(feeder16, gm16):
    vbar = voltvar.baseline_voltage(gm16, feeder16.injections_p(), feeder16.loads_qc(), 1.0)
    assert vbar.min() < 0.95
    v = voltvar.solve_lindistflow(
        gm16, feeder16.injections_p(), feeder16.loads_qc(), np.zeros(15), 1.0
    )
    np.testing.assert_allclose(v, vbar)


def test_ac_flow_flat_case(feeder16):
    sol = voltvar.solve_acpf(feeder16, np.zeros(15), np.zeros(15), 1.0)
    assert sol.converged
    assert sol.iterations == 1
    np.testing.assert_allclose(sol.v_mag, 1.0, atol=1e-12)


def test_stability_reports(feeder16, gm16):
    droop = voltvar.make_droop(
        np.full(15, 0.5), feeder16.q_lower(), feeder16.q_upper(), feeder16.targets()
    )
    rep = voltvar.analyze(droop, gm16)
    assert not rep.stable
    assert rep.droop_pd_ok is False

    bound = voltvar.scaled_epsilon_bound(gm16.X, np.full(15, 0.2))
    assert abs(bound - 0.63) < 0.02

    scaled = voltvar.make_scaled(
        gm16.X, np.full(15, 0.2), 0.3, feeder16.q_lower(), feeder16.q_upper(), feeder16.targets()
    )
    assert voltvar.analyze(scaled, gm16).stable


def test_closed_loop_matches_centralized(feeder16, gm16):
    scaled = voltvar.make_scaled(
        gm16.X, np.full(15, 0.2), 0.3, feeder16.q_lower(), feeder16.q_upper(), feeder16.targets()
    )
    res = voltvar.run_closed_loop(feeder16, gm16, scaled, voltvar.Plant.Linear, 200, 1e-8)
    assert res.converged
    assert res.iterations <= 50

    vbar = voltvar.baseline_voltage(gm16, feeder16.injections_p(), feeder16.loads_qc(), 1.0)
    prob = voltvar.make_qp(
        gm16,
        feeder16.targets() - vbar,
        np.full(15, 0.2),
        feeder16.q_lower(),
        feeder16.q_upper(),
        voltvar.Objective.Weighted,
    )
    opt = voltvar.solve_qp(prob, 1e-12)
    assert np.max(np.abs(res.state.q - opt.q)) < 1e-6
    assert abs(res.trace[-1].mismatch_norm - voltvar.qp_mismatch_norm(prob, opt.q)) < 1e-4


def test_projection_and_errors():
    lo, hi = np.full(2, -0.1), np.full(2, 0.1)
    np.testing.assert_allclose(
        voltvar.project(np.array([0.2, -0.3]), lo, hi), [0.1, -0.1]
    )
    with pytest.raises(voltvar.VvcError):
        voltvar.FeederNetwork.from_json_text("{}")


def test_dynamic_short_replay(feeder16, gm16):
    scen = voltvar.DynamicScenario()
    prof = voltvar.DailyProfile()
    prof.minutes = list(range(3))
    prof.load_kw = [4.0, 4.2, 4.4]
    prof.pv_kw = [0.0, 0.0, 0.0]
    scen.profile = prof
    scen.homes_per_bus = np.full(15, 18, dtype=np.int32)

    ctrl = voltvar.DynamicControl()
    ctrl.mode = voltvar.DynamicControl.Mode.Scaled
    res = voltvar.run_dynamic(feeder16, gm16, scen, ctrl, voltvar.Plant.Ac)
    assert not res.plant_diverged
    assert len(res.trace) == 3 * 12
    assert res.minutes[-1].mismatch_norm < res.minutes[0].mismatch_norm * 2
    lo, hi = voltvar.var_limits_at(scen, feeder16, 0)
    assert np.all(res.trace[-1].q >= lo - 1e-12)
    assert np.all(res.trace[-1].q <= hi + 1e-12)
