import math

import numpy as np
import pytest

import byrdtd


def three_state_model():
    P = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
    R = [np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 2.0], [0.0, 0.0, 0.0]])]
    return byrdtd.MrpModel(P, R, 0.9, np.ones(3) / 3, np.eye(3))


def test_stationary_distribution_is_fixed_point():
    model = three_state_model()
    rho = byrdtd.stationary_distribution(model)
    assert np.allclose(rho @ model.transition, rho, atol=1e-12)
    assert math.isclose(rho.sum(), 1.0, abs_tol=1e-12)


def test_tabular_fixed_point_is_value_function():
    model = three_state_model()
    steady = byrdtd.steady_state(model, 0.5)
    residual = steady["a_star"] @ steady["theta_inf"] + steady["b_star"]
    assert np.linalg.norm(residual) < 1e-10
    # with one-hot features TD(lambda) recovers V exactly
    assert np.allclose(steady["theta_inf"], byrdtd.value_function(model), atol=1e-9)


def test_sandwich_on_random_model():
    model = byrdtd.random_mrp(num_states=8, num_agents=3, feature_dim=3, seed=5)
    f_min, f_fixed, upper = byrdtd.sandwich(model, 0.3)
    assert f_min <= f_fixed + 1e-9
    assert f_fixed <= upper + 1e-9


def test_trimmed_mean_example():
    value, sets = byrdtd.trimmed_aggregate([1, 2, 3, 4, 5], np.array([[1.0, 2.0, 3.0, 4.0, 5.0]]), np.array([3.0]), 1)
    assert value[0] == pytest.approx(3.0)
    low, kept, high = sets[0]
    assert low == [1] and high == [5] and kept == [2, 3, 4]


def test_mean_aggregate_example():
    out = byrdtd.mean_aggregate([1, 2], np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([1.0, 1.0]))
    assert np.allclose(out, [2 / 3, 2 / 3])


def test_topology_helpers():
    topo = byrdtd.complete_topology(7, 2, 2)
    assert byrdtd.degree_of_unsaturation(topo) == pytest.approx(0.4)
    holds, tau, count = byrdtd.check_connectivity(byrdtd.complete_topology(4, 0, 0))
    assert holds and tau == 1 and count == 1


def test_errors_are_translated():
    with pytest.raises(byrdtd.ByrdtdError):
        byrdtd.preset_topology("nope")


def test_short_run_is_deterministic():
    text = """
environment: {kind: random_mrp, num_states: 6, feature_dim: 3, seed: 2}
topology: {kind: complete, honest: 4, byzantine: 1, trim: 1}
algorithm: {aggregation: trim, lambda: 0.3}
attack: {kind: sign_flip}
schedule: {kind: experimental, c: 0.1}
run: {steps: 300, trials: 2, master_seed: 3}
"""
    a = byrdtd.run_config(text)
    b = byrdtd.run_config(text)
    assert a["msbe"] == b["msbe"]
    assert len(a["k"]) == 300
    assert a["diverged_trials"] == 0
    assert all(math.isfinite(v) for v in a["msbe"])
