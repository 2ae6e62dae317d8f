import csv
import io
import json
from dataclasses import replace

import numpy as np
import pytest

from cmverify import sim


def test_rhs_two_body_example():
    qdot, pdot = sim.rhs(np.array([0.0, 1.0]), np.array([0.5, -0.5]), 1.0)
    np.testing.assert_allclose(qdot, [0.5, -0.5])
    np.testing.assert_allclose(pdot, [-2.0, 2.0])


def test_forces_sum_to_zero():
    rng = np.random.default_rng(4)
    q = np.sort(rng.normal(size=5)) * 3
    _, f = sim.rhs(q, np.zeros(5), 1.7)
    assert abs(f.sum()) < 1e-12


def test_collision_raises():
    with pytest.raises(sim.CollisionError):
        sim.rhs(np.array([0.0, 0.0, 1.0]), np.zeros(3), 1.0)


def test_lax_matrix_hermitian_and_traces():
    q, p = np.array([-1.0, 0.2, 1.5]), np.array([0.4, -0.3, 0.1])
    L = sim.lax_matrix(q, p, 1.0)
    np.testing.assert_allclose(L, L.conj().T)
    tr = sim.power_traces(q, p, 1.0)
    assert tr[0] == pytest.approx(p.sum())
    # tr L^2 = sum p^2 + 2 sum_{r<s} k^2/(q_r-q_s)^2 = 2H
    pot = sum(1.0 / (q[r] - q[s]) ** 2 for r in range(3) for s in range(r + 1, 3))
    assert tr[1] == pytest.approx((p**2).sum() + 2 * pot)


def test_free_motion():
    cfg = sim.SimConfig(n=3, k=0.0, dt=0.01, t_end=1.0, q0=(0.0, 1.0, 2.0), p0=(-1.0, 0.0, 0.5))
    final = sim.integrate(cfg).final_state()
    np.testing.assert_allclose(final.q, [-1.0, 1.0, 2.5], atol=1e-12)
    np.testing.assert_allclose(final.p, [-1.0, 0.0, 0.5])


def test_static_free_particles_have_zero_drift():
    cfg = sim.SimConfig(n=3, k=0.0, dt=0.1, t_end=1.0, q0=(0.0, 1.0, 2.0), p0=(0.0, 0.0, 0.0))
    rep = sim.drift_report(sim.integrate(cfg))
    assert rep["worst"] == 0.0 and rep["status"] == "pass"


def test_reference_run_conserves_integrals():
    rep = sim.drift_report(sim.integrate(sim.reference_config()))
    assert rep["status"] == "pass"
    assert rep["worst"] < sim.DRIFT_TOL
    assert set(rep["max_relative_drift"]) == {"I1", "I2", "I3", "trL1", "trL2", "trL3", "total_momentum"}


def test_leapfrog_is_second_order_and_bounded():
    cfg = sim.reference_config(integrator="leapfrog", t_end=2.0)
    rep = sim.drift_report(sim.integrate(cfg), tol=1e-4)
    assert rep["status"] == "pass"
    order = sim.observed_order(replace(cfg, t_end=1.0))
    assert 1.7 < order["order"] < 2.4


def test_rk4_observed_order():
    res = sim.observed_order(sim.reference_config(t_end=2.0))
    assert res["order"] >= sim.ORDER_MIN


def test_time_reversal():
    assert sim.time_reversal_error(sim.reference_config(t_end=2.0)) < sim.REVERSAL_TOL


def test_csv_columns_and_cadence():
    cfg = sim.reference_config(t_end=0.1, cadence=25)
    text = sim.integrate(cfg).to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t", "q1", "q2", "q3", "p1", "p2", "p3", "I1", "I2", "I3"]
    assert [float(r[0]) for r in rows[1:]] == pytest.approx([0.0, 0.025, 0.05, 0.075, 0.1])


def test_batch_preserves_order():
    configs = [sim.reference_config(t_end=0.05, k=k) for k in (0.5, 1.0, 1.5)]
    batch = sim.integrate_batch(configs, workers=2)
    for cfg, traj in zip(configs, batch):
        single = sim.integrate(cfg)
        assert traj.config == cfg
        np.testing.assert_array_equal(traj.qs[-1], single.qs[-1])


def test_default_initial_state():
    st = sim.SimConfig(n=4).initial_state()
    assert st.q.shape == (4,) and np.all(np.diff(st.q) > 0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n": 1},
        {"dt": 0.0},
        {"t_end": -1.0},
        {"integrator": "euler"},
        {"cadence": 0},
        {"n": 3, "q0": (0.0, 1.0)},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        sim.SimConfig(**kwargs)


def test_summary_json():
    doc = json.loads(sim.summary_json(sim.integrate(sim.reference_config(t_end=0.1)), {"label": "x"}))
    assert doc["label"] == "x" and doc["n"] == 3


def test_empty_trajectory_rejected():
    with pytest.raises(ValueError):
        sim.drift_report(sim.Trajectory(sim.reference_config()))
