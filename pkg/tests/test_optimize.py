"""Fits: closed-form optima, grid parity, determinism, consistency."""

import math

import numpy as np
import pytest

from affineqml import contrast, noise, optimize
from affineqml.models import make_model
from affineqml.optimize import OptimConfig, fit
from affineqml.simulate import simulate

LAP = noise.make_noise("laplace")
SD_LAP = math.sqrt(2.0)
CONST = make_model("arch", vol_p=0)
TIGHT = OptimConfig(n_starts=2, xatol=1e-9, fatol=1e-12)


def test_constant_scale_fit_matches_closed_form():
    rng = np.random.default_rng(70)
    x = rng.standard_normal(800)
    m1, m2 = np.abs(x).mean(), (x * x).mean()
    lap = fit("laplacian", CONST, x, config=TIGHT)
    assert lap.converged
    assert lap.theta[0] == pytest.approx(m1 * m1, rel=1e-6)
    gau = fit("gaussian", CONST, x, calibration=SD_LAP, config=TIGHT)
    assert gau.converged
    assert gau.theta[0] == pytest.approx(m2 / 2.0, rel=1e-6)


def test_ar1_fit_matches_grid_argmax():
    spec = make_model("arma", p=1)
    x = simulate(spec, [0.4], LAP, 600, seed=71).data
    grid = np.linspace(-0.98, 0.98, 20_001)
    vals = np.array([contrast.quasi_loglik("laplacian", spec, [a], x) for a in grid])
    best = fit("laplacian", spec, x)
    assert best.loglik >= vals.max() - 1e-6
    assert abs(best.theta[0] - grid[vals.argmax()]) <= grid[1] - grid[0]


def test_fit_is_deterministic():
    spec = make_model("garch", vol_p=1, vol_q=1)
    x = simulate(spec, [0.2, 0.4, 0.2], LAP, 2000, seed=72).data
    a = fit("laplacian", spec, x)
    b = fit("laplacian", spec, x)
    assert np.array_equal(a.theta, b.theta)
    assert a.n_evals == b.n_evals
    assert a.loglik == b.loglik


def test_gaussian_calibration_maps_scale_parameters():
    # L_c(theta) == L_1(S_c theta) exactly, so optima map by scaling
    spec = make_model("garch", vol_p=1, vol_q=1)
    x = simulate(spec, [0.2, 0.4, 0.2], LAP, 4000, seed=73).data
    base = fit("gaussian", spec, x)
    cal = fit("gaussian", spec, x, calibration=SD_LAP)
    assert cal.loglik == pytest.approx(base.loglik, abs=1e-3)
    mapped = np.array([base.theta[0] / 2.0, base.theta[1] / 2.0, base.theta[2]])
    assert np.allclose(cal.theta, mapped, atol=2e-3)


def test_arch_fit_recovers_truth_single_sample():
    spec = make_model("arch", vol_p=1)
    th0 = np.array([0.4, 0.2])
    x = simulate(spec, th0, LAP, 10_000, seed=74).data
    for kind, c in [("laplacian", 1.0), ("gaussian", SD_LAP)]:
        est = fit(kind, spec, x, calibration=c)
        assert est.converged
        assert np.abs(est.theta - th0).max() < 0.05, (kind, est.theta)


def test_error_shrinks_with_sample_size():
    spec = make_model("arch", vol_p=1)
    th0 = np.array([0.4, 0.2])

    def mean_err(n):
        errs = []
        for rep in range(4):
            x = simulate(spec, th0, LAP, n, seed=(75, rep)).data
            errs.append(np.abs(fit("laplacian", spec, x).theta - th0).max())
        return np.mean(errs)

    assert mean_err(6400) < mean_err(400)


def test_fit_rejects_short_samples():
    spec = make_model("garch", vol_p=1, vol_q=1)
    with pytest.raises(ValueError, match="at least 30"):
        fit("laplacian", spec, np.ones(29))
    with pytest.raises(ValueError):
        fit("ols", spec, np.ones(100))


def test_eval_budget_is_respected():
    spec = make_model("arch", vol_p=1)
    x = simulate(spec, [0.4, 0.2], LAP, 500, seed=76).data
    est = fit("laplacian", spec, x, config=OptimConfig(n_starts=2, max_evals=60))
    lo, hi = np.array([1e-4, 0.0]), np.array([10.0, 5.0])
    assert est.n_evals <= 60 + 20
    assert ((est.theta >= lo) & (est.theta <= hi)).all()


def test_optim_config_validation():
    with pytest.raises(ValueError):
        OptimConfig(n_starts=0)
    with pytest.raises(ValueError):
        OptimConfig(max_evals=5)
