import math

import numpy as np
import pytest

import infoorder as io


def test_noisy_revealing_dominates_exclusion():
    f = io.revealing_with_noise(2, 0.5)
    g = io.exclusion_experiment(2)
    assert io.lb_exact(f, g).holds
    assert not io.blackwell_check(f, g).holds
    assert io.support_diff(f, g, np.array([1.0, -1.0, 0.0])) == pytest.approx(0.0, abs=1e-12)


def test_failure_carries_witness_and_dichotomy():
    g = io.FiniteExperiment(np.eye(3))
    v = io.lb_exact(io.exclusion_experiment(2), g)
    assert not v
    assert v.method == "ExactRays"
    assert io.support_diff(io.exclusion_experiment(2), g, v.witness) == pytest.approx(v.margin)
    d = io.dichotomy_from_witness(np.array([1.0, -1.0, 0.0]))
    assert d["omega0"] == [1, 2]
    assert io.dichotomy_reduce(g, d).state_count == 2


def test_garbling_and_blackwell_kernel():
    f = io.FiniteExperiment(np.array([[0.7, 0.3], [0.2, 0.8]]))
    k = np.array([[0.9, 0.1], [0.4, 0.6]])
    g = io.apply_garbling(f, k)
    v = io.blackwell_check(f, g)
    assert v.holds
    assert np.allclose(f.matrix @ v.kernel, g.matrix, atol=1e-7)


def test_decision_values():
    dp = io.DecisionProblem(np.array([[0.0, 0.0], [1.0, -1.0]]))
    assert io.ex_ante_value(dp, io.FiniteExperiment(np.eye(2))) == pytest.approx(0.5)
    qcc, cert = io.is_qcc(io.DecisionProblem(np.array([[1.0, 0, 0], [0, 0, 0], [0, 0, 1.0]])))
    assert not qcc and cert["triple"] == [0, 1, 2]


def test_moral_hazard_worked_instance():
    env = io.MoralHazardEnv(0.0, 1.0, np.eye(1), np.zeros(1), 0.0, io.PiecewiseLinearConvex([0, 1], [0, 1]))
    s = io.min_disutility(env, io.FiniteExperiment(np.eye(2)), np.array([0.5]))
    assert s["implementable"]
    assert s["disutility"] == pytest.approx(0.25)
    assert np.allclose(s["scheme"], [0.0, 0.5])
    blind = io.FiniteExperiment(np.ones((2, 1)))
    assert math.isinf(io.min_disutility(env, blind, np.array([0.5]))["disutility"])


def test_screening_single_type():
    env = io.ScreeningEnv(["low", "high"], [np.array([0.0])], np.array([1.0]), np.ones(2),
                          np.array([[0.0, 0.0], [1.0, 1.0]]), io.PiecewiseLinearConvex([0, 1], [0, 1]),
                          np.full((2, 2), 0.1), 0.0, 1.0)
    r = io.optimal_mechanism(env, io.FiniteExperiment(np.eye(2)))
    assert r["feasible"] and r["rule"] == [1]
    assert r["value"] == pytest.approx(1.0)


def test_errors_carry_codes():
    with pytest.raises(io.InfoorderError) as info:
        io.FiniteExperiment(np.array([[0.5, 0.6], [1.0, 0.0]]))
    assert info.value.code == "RowSumError"
    assert info.value.index == 0
    with pytest.raises(io.InfoorderError):
        io.lb_exact(io.FiniteExperiment(np.eye(2)), io.FiniteExperiment(np.eye(3)))
