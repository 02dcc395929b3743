"""Tests for the iterative solvers and the safe step-size bound."""

import math

import numpy as np
import pytest

from mdsense import (
    AsymmetricInputError,
    DivergenceError,
    NonSquareError,
    ParameterOutOfRangeError,
    RunConfig,
    SensingEnsemble,
    SpectralOverflowError,
    exp_gradient,
    gd_factored_psd,
    gd_factored_sym,
    gen_gaussian_rect,
    gen_gaussian_sym,
    gen_lowrank_psd,
    gen_lowrank_rect,
    make_map,
    measure,
    mirror_descent,
    risk,
    safe_step_bound,
)


def scalar_ensemble(a=1.0):
    return SensingEnsemble(
        kind="dense", n=1, nprime=1, matrices=np.array([[[a]]], dtype=np.float64)
    )


# ---------------------------------------------------------------------------
# configuration validation


def test_config_rejects_unknown_algorithm():
    with pytest.raises(ParameterOutOfRangeError):
        RunConfig(algorithm="newton", step=0.1, max_iters=10)


@pytest.mark.parametrize("step", [0.0, -1.0, math.inf, math.nan])
def test_config_rejects_bad_step(step):
    with pytest.raises(ParameterOutOfRangeError):
        RunConfig(algorithm="mirror_descent", step=step, max_iters=10)


def test_config_rejects_bad_counts():
    with pytest.raises(ParameterOutOfRangeError):
        RunConfig(algorithm="exp_gradient", step=0.1, max_iters=0)
    with pytest.raises(ParameterOutOfRangeError):
        RunConfig(algorithm="exp_gradient", step=0.1, max_iters=5, risk_tol=-1e-9)
    with pytest.raises(ParameterOutOfRangeError):
        RunConfig(algorithm="exp_gradient", step=0.1, max_iters=5, snapshot_every=-1)


# ---------------------------------------------------------------------------
# stationarity and tiny closed-form problems


def test_mirror_descent_stationary_at_interpolating_start():
    ens = gen_gaussian_sym(4, 6, seed=0)
    X0 = 0.3 * np.eye(4)
    y = measure(ens, X0)
    cfg = RunConfig(algorithm="mirror_descent", step=0.5, max_iters=50,
                    map=make_map("entropy"))
    traj = mirror_descent(cfg.map, ens, y, X0, cfg)
    assert traj.converged and traj.iters_run == 0
    assert np.allclose(traj.final_iterate, X0)


def test_factored_descents_stationary_at_interpolating_start():
    ens = gen_gaussian_sym(3, 5, seed=1)
    U0 = 0.4 * np.eye(3)
    y = measure(ens, U0 @ U0.T)
    cfg = RunConfig(algorithm="gd_factored_psd", step=0.1, max_iters=50)
    traj = gd_factored_psd(ens, y, U0, cfg)
    assert traj.converged and traj.iters_run == 0
    cfg2 = RunConfig(algorithm="gd_factored_sym", step=0.1, max_iters=50)
    traj2 = gd_factored_sym(ens, y, U0, np.zeros((3, 3)), cfg2)
    assert traj2.converged and traj2.iters_run == 0


def test_scalar_entropy_descent_finds_the_solution():
    ens = scalar_ensemble(2.0)
    y = np.array([2.0 * 0.7])
    cfg = RunConfig(algorithm="mirror_descent", step=0.2, max_iters=2000,
                    map=make_map("entropy"), risk_tol=1e-28)
    traj = mirror_descent(cfg.map, ens, y, np.array([[0.01]]), cfg)
    assert traj.converged
    assert traj.final_iterate[0, 0] == pytest.approx(0.7, abs=1e-12)


def test_scalar_entropy_first_step_formula():
    """One multiplicative update: x1 = x0 * exp(-eta * (x0 - y))."""
    alpha, eta, target = 0.05, 0.3, 0.9
    ens = scalar_ensemble(1.0)
    y = np.array([target])
    cfg = RunConfig(algorithm="mirror_descent", step=eta, max_iters=1,
                    map=make_map("entropy"))
    traj = mirror_descent(cfg.map, ens, y, np.array([[alpha]]), cfg)
    expect = alpha * math.exp(-eta * (alpha - target))
    assert traj.final_iterate[0, 0] == pytest.approx(expect, rel=1e-14)


def test_scalar_exp_gradient_first_step_formula():
    """u1 = u0 exp(-eta g), v1 = v0 exp(eta g) with g the residual."""
    u0, v0, eta, target = 0.2, 0.1, 0.4, 1.5
    ens = scalar_ensemble(1.0)
    y = np.array([target])
    cfg = RunConfig(algorithm="exp_gradient", step=eta, max_iters=1)
    traj = exp_gradient(ens, y, np.array([[u0]]), np.array([[v0]]), cfg)
    g = (u0 - v0) - target
    expect = u0 * math.exp(-eta * g) - v0 * math.exp(eta * g)
    assert traj.final_iterate[0, 0] == pytest.approx(expect, rel=1e-14)


def test_scalar_factored_first_step_formula():
    """u1 = u0 - 2 eta g u0 for the squared parametrization."""
    u0, eta, target = 0.5, 0.05, 2.0
    ens = scalar_ensemble(1.0)
    y = np.array([target])
    cfg = RunConfig(algorithm="gd_factored_psd", step=eta, max_iters=1)
    traj = gd_factored_psd(ens, y, np.array([[u0]]), cfg)
    g = u0 * u0 - target
    u1 = u0 - 2.0 * eta * g * u0
    assert traj.final_iterate[0, 0] == pytest.approx(u1 * u1, rel=1e-14)


def test_exp_gradient_keeps_zero_negative_factor():
    """Starting from V0 = 0 the negative factor never reappears."""
    ens = gen_gaussian_sym(4, 7, seed=2)
    gt = gen_lowrank_psd(4, 2, seed=3)
    y = measure(ens, gt.matrix)
    cfg = RunConfig(algorithm="exp_gradient", step=0.2, max_iters=40,
                    snapshot_every=10)
    traj = exp_gradient(ens, y, 0.05 * np.eye(4), np.zeros((4, 4)), cfg)
    for U, V in traj.factor_snapshots.values():
        assert np.max(np.abs(V)) == 0.0
    assert np.min(np.linalg.eigvalsh(traj.final_iterate)) >= -1e-12


# ---------------------------------------------------------------------------
# trajectory bookkeeping


def test_trajectory_column_lengths_and_snapshots():
    ens = gen_gaussian_sym(4, 6, seed=4)
    gt = gen_lowrank_psd(4, 1, seed=5)
    y = measure(ens, gt.matrix)
    cfg = RunConfig(algorithm="mirror_descent", step=0.5, max_iters=25,
                    map=make_map("entropy"), risk_tol=0.0, snapshot_every=10)
    traj = mirror_descent(cfg.map, ens, y, 0.01 * np.eye(4), cfg,
                          ground_truth=gt.matrix)
    n_rows = traj.iters_run + 1
    assert traj.iters_run == 25
    for col in (traj.iters, traj.risks, traj.nuclear_norms,
                traj.effective_ranks, traj.recon_errors, traj.bregman_to_final):
        assert len(col) == n_rows
    assert np.array_equal(traj.iters, np.arange(n_rows))
    assert set(traj.snapshots) == {0, 10, 20, 25}
    assert np.isfinite(traj.bregman_to_final[0])
    assert traj.bregman_to_final[25] == pytest.approx(0.0, abs=1e-15)
    assert np.isfinite(traj.bregman_to_final[10])
    assert math.isnan(traj.bregman_to_final[7])
    assert np.all(np.isfinite(traj.recon_errors))


def test_recon_column_is_nan_without_ground_truth():
    ens = gen_gaussian_sym(3, 4, seed=6)
    y = np.ones(4)
    cfg = RunConfig(algorithm="gd_factored_psd", step=0.05, max_iters=5,
                    risk_tol=0.0)
    traj = gd_factored_psd(ens, y, 0.1 * np.eye(3), cfg)
    assert np.all(np.isnan(traj.recon_errors))
    assert np.all(np.isnan(traj.bregman_to_final))


def test_symmetric_problems_keep_symmetric_iterates():
    ens = gen_gaussian_sym(5, 8, seed=7)
    gt = gen_lowrank_psd(5, 2, seed=8)
    y = measure(ens, gt.matrix)
    cfg = RunConfig(algorithm="mirror_descent", step=0.5, max_iters=30,
                    map=make_map("hypentropy", beta=1e-3), risk_tol=0.0,
                    snapshot_every=7)
    traj = mirror_descent(cfg.map, ens, y, np.zeros((5, 5)), cfg)
    for X in traj.snapshots.values():
        assert np.max(np.abs(X - X.T)) == 0.0


def test_rectangular_hypentropy_interpolates_when_underdetermined():
    gt = gen_lowrank_rect(4, 6, 1, seed=9)
    ens = gen_gaussian_rect(4, 6, 12, seed=10)
    y = measure(ens, gt.matrix)
    cfg = RunConfig(algorithm="mirror_descent", step=1.0, max_iters=8000,
                    map=make_map("hypentropy", beta=1e-3), risk_tol=1e-18)
    traj = mirror_descent(cfg.map, ens, y, np.zeros((4, 6)), cfg)
    assert traj.converged
    assert traj.risks[-1] <= 1e-18


def test_rectangular_hypentropy_near_recovery_with_enough_data():
    gt = gen_lowrank_rect(4, 6, 1, seed=9)
    ens = gen_gaussian_rect(4, 6, 30, seed=10)
    y = measure(ens, gt.matrix)
    cfg = RunConfig(algorithm="mirror_descent", step=0.5, max_iters=4000,
                    map=make_map("hypentropy", beta=1e-4), risk_tol=1e-18)
    traj = mirror_descent(cfg.map, ens, y, np.zeros((4, 6)), cfg,
                          ground_truth=gt.matrix)
    assert traj.risks[-1] <= 1e-6
    assert traj.recon_errors[-1] <= 0.01


def test_all_square_algorithms_drive_risk_down():
    gt = gen_lowrank_psd(4, 1, seed=11)
    ens = gen_gaussian_sym(4, 6, seed=12)
    y = measure(ens, gt.matrix)
    runs = [
        mirror_descent(make_map("entropy"), ens, y, 0.01 * np.eye(4),
                       RunConfig(algorithm="mirror_descent", step=1.0,
                                 max_iters=8000, map=make_map("entropy"),
                                 risk_tol=1e-16)),
        exp_gradient(ens, y, 0.005 * np.eye(4), np.zeros((4, 4)),
                     RunConfig(algorithm="exp_gradient", step=1.0,
                               max_iters=8000, risk_tol=1e-16)),
        gd_factored_psd(ens, y, 0.1 * np.eye(4),
                        RunConfig(algorithm="gd_factored_psd", step=0.2,
                                  max_iters=8000, risk_tol=1e-16)),
        gd_factored_sym(ens, y, 0.1 * np.eye(4), 0.1 * np.eye(4),
                        RunConfig(algorithm="gd_factored_sym", step=0.2,
                                  max_iters=8000, risk_tol=1e-16)),
    ]
    for traj in runs:
        assert traj.converged
        assert traj.risks[-1] <= 1e-16


def test_risk_monotone_under_certified_step():
    gt = gen_lowrank_psd(5, 2, seed=13)
    ens = gen_gaussian_sym(5, 12, seed=14)
    y = measure(ens, gt.matrix)
    mp = make_map("hypentropy", beta=1e-2)
    eta = safe_step_bound(ens, y, np.zeros((5, 5)), mp)
    assert np.isfinite(eta) and eta > 0.0
    cfg = RunConfig(algorithm="mirror_descent", step=eta, max_iters=300,
                    map=mp, risk_tol=0.0)
    traj = mirror_descent(mp, ens, y, np.zeros((5, 5)), cfg)
    diffs = np.diff(traj.risks)
    assert np.all(diffs <= 1e-12 * max(1.0, traj.risks[0]))


# ---------------------------------------------------------------------------
# safe step-size bound


def test_safe_step_hand_value():
    """Both certified conditions give exactly 1/8 on the unit scalar problem."""
    ens = scalar_ensemble(1.0)
    mp = make_map("hypentropy", beta=1.0)
    eta = safe_step_bound(ens, np.zeros(1), np.array([[1.0]]), mp)
    assert eta == pytest.approx(0.125, rel=1e-15)


def test_safe_step_zero_risk_uses_norm_condition_alone():
    ens = scalar_ensemble(1.0)
    mp = make_map("entropy")
    X = np.array([[2.0]])
    eta = safe_step_bound(ens, np.array([2.0]), X, mp)
    assert eta == pytest.approx(0.25 / 2.0, rel=1e-14)


def test_safe_step_infinite_when_vacuous():
    ens = scalar_ensemble(1.0)
    eta = safe_step_bound(ens, np.zeros(1), np.zeros((1, 1)), make_map("entropy"))
    assert eta == math.inf


def test_safe_step_entropy_drops_width_term():
    ens = gen_gaussian_sym(4, 6, seed=15)
    X = 0.5 * np.eye(4)
    y = measure(ens, X) + 1.0
    ent = safe_step_bound(ens, y, X, make_map("entropy"))
    hyp = safe_step_bound(ens, y, X, make_map("hypentropy", beta=10.0))
    assert hyp < ent


# ---------------------------------------------------------------------------
# guard rails


def test_divergent_step_raises():
    gt = gen_lowrank_psd(4, 2, seed=16)
    ens = gen_gaussian_sym(4, 10, seed=17)
    y = measure(ens, gt.matrix)
    cfg = RunConfig(algorithm="gd_factored_psd", step=50.0, max_iters=200)
    with pytest.raises(DivergenceError):
        gd_factored_psd(ens, y, np.eye(4), cfg)


def test_exp_gradient_overflow_guard():
    ens = scalar_ensemble(1.0)
    y = np.array([100.0])
    cfg = RunConfig(algorithm="exp_gradient", step=10.0, max_iters=5)
    with pytest.raises(SpectralOverflowError):
        exp_gradient(ens, y, np.array([[1.0]]), np.zeros((1, 1)), cfg)


def test_factored_algorithms_require_square_problems():
    ens = gen_gaussian_rect(3, 4, 5, seed=18)
    cfg = RunConfig(algorithm="gd_factored_psd", step=0.1, max_iters=5)
    with pytest.raises(NonSquareError):
        gd_factored_psd(ens, np.zeros(5), np.eye(3), cfg)
    cfg2 = RunConfig(algorithm="gd_factored_sym", step=0.1, max_iters=5)
    with pytest.raises(NonSquareError):
        gd_factored_sym(ens, np.zeros(5), np.eye(3), np.eye(3), cfg2)


def test_exp_gradient_requires_symmetric_ensemble():
    ens = gen_gaussian_rect(3, 3, 5, seed=19)
    cfg = RunConfig(algorithm="exp_gradient", step=0.1, max_iters=5)
    with pytest.raises(AsymmetricInputError):
        exp_gradient(ens, np.zeros(5), np.eye(3), np.zeros((3, 3)), cfg)
