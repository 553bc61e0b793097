"""Contrast values: closed forms, population argmax, calibration, failure modes."""

import math

import numpy as np
import pytest

from affineqml import contrast, models, noise
from affineqml.models import ConstraintError, make_model
from affineqml.simulate import simulate

LAP = noise.make_noise("laplace")
SD_LAP = math.sqrt(2.0)

CONST = make_model("arch", vol_p=0)  # x_t = sqrt(omega) * zeta_t


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def test_constant_scale_values_match_closed_form():
    rng = np.random.default_rng(5)
    x = rng.standard_normal(200)
    for omega in (0.3, 1.0, 2.7):
        lap = contrast.quasi_loglik("laplacian", CONST, [omega], x)
        want = -(0.5 * x.size * math.log(omega) + np.abs(x).sum() / math.sqrt(omega))
        assert lap == pytest.approx(want, rel=1e-12)
        for c in (1.0, SD_LAP):
            gau = contrast.quasi_loglik("gaussian", CONST, [omega], x, calibration=c)
            want = -(x.size * math.log(c * math.sqrt(omega))
                     + 0.5 * (x * x).sum() / (c * c * omega))
            assert gau == pytest.approx(want, rel=1e-12)


def test_constant_scale_optima_match_closed_form():
    # laplacian optimum sqrt(omega) = mean|x|, gaussian omega = mean x^2 / c^2
    rng = np.random.default_rng(6)
    x = rng.standard_normal(500)
    m1, m2 = np.abs(x).mean(), (x * x).mean()
    h = 1e-4
    for kind, opt, kw in [
        ("laplacian", m1 * m1, {}),
        ("gaussian", m2, {}),
        ("gaussian", m2 / 2.0, {"calibration": math.sqrt(2.0)}),
    ]:
        mid = contrast.quasi_loglik(kind, CONST, [opt], x, **kw)
        assert mid > contrast.quasi_loglik(kind, CONST, [opt + h], x, **kw)
        assert mid > contrast.quasi_loglik(kind, CONST, [opt - h], x, **kw)


def test_tiny_arch_value_by_hand():
    spec = make_model("arch", vol_p=1)
    x = np.array([1.0, -2.0])
    omega, alpha = 0.4, 0.2
    m1, m2 = math.sqrt(omega), math.sqrt(omega + alpha)
    lap = -(math.log(m1) + 1.0 / m1 + math.log(m2) + 2.0 / m2)
    gau = -(math.log(m1) + 0.5 / omega + math.log(m2) + 2.0 / (omega + alpha))
    assert contrast.quasi_loglik("laplacian", spec, [omega, alpha], x) == pytest.approx(lap, rel=1e-14)
    assert contrast.quasi_loglik("gaussian", spec, [omega, alpha], x) == pytest.approx(gau, rel=1e-14)


def test_gaussian_constant_is_a_pure_shift():
    rng = np.random.default_rng(7)
    x = rng.standard_normal(50)
    a = contrast.quasi_loglik("gaussian", CONST, [1.3], x)
    b = contrast.quasi_loglik("gaussian", CONST, [1.3], x, gaussian_constant=True)
    assert b - a == pytest.approx(-0.5 * x.size * math.log(2.0 * math.pi), rel=1e-12)


# ---------------------------------------------------------------------------
# population argmax sits at the generating parameter
# ---------------------------------------------------------------------------

def test_generating_theta_beats_perturbations():
    cases = [
        (make_model("arma", p=1, q=1), [0.4, -0.6]),
        (make_model("arch", vol_p=1), [0.4, 0.2]),
        (make_model("garch", vol_p=1, vol_q=1), [0.2, 0.4, 0.2]),
    ]
    for spec, th0 in cases:
        th0 = np.asarray(th0, dtype=float)
        perturbed = []
        for i in range(th0.size):
            for s in (-0.08, 0.08):
                p = th0.copy()
                p[i] += s
                perturbed.append(p)
        gaps_lap = np.zeros(len(perturbed))
        gaps_gau = np.zeros(len(perturbed))
        for rep in range(10):
            x = simulate(spec, th0, LAP, 20_000, seed=(40, rep)).data
            l0 = contrast.quasi_loglik("laplacian", spec, th0, x)
            g0 = contrast.quasi_loglik("gaussian", spec, th0, x, calibration=SD_LAP)
            for j, p in enumerate(perturbed):
                gaps_lap[j] += l0 - contrast.quasi_loglik("laplacian", spec, p, x)
                gaps_gau[j] += g0 - contrast.quasi_loglik(
                    "gaussian", spec, p, x, calibration=SD_LAP)
        assert (gaps_lap > 0).all(), (spec.family, gaps_lap)
        assert (gaps_gau > 0).all(), (spec.family, gaps_gau)


def test_gaussian_calibration_equals_scaled_parameters():
    # scaling (omega, alpha) by c^2 multiplies M by c, so calibration c at the
    # base parameters must equal calibration 1 at the scaled ones
    spec = make_model("garch", vol_p=1, vol_q=1)
    x = simulate(spec, [0.2, 0.4, 0.2], LAP, 2000, seed=50).data
    c = SD_LAP
    a = contrast.quasi_loglik("gaussian", spec, [0.2, 0.4, 0.2], x, calibration=c)
    b = contrast.quasi_loglik("gaussian", spec, [c * c * 0.2, c * c * 0.4, 0.2], x)
    assert a == pytest.approx(b, rel=1e-12)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def test_arma_residuals_recover_draws_after_warmup():
    spec = make_model("arma", p=1, q=1)
    traj = simulate(spec, [0.4, -0.6], LAP, 2000, seed=60)
    z = noise.sample(LAP, 60, 500 + 2000)[500:]
    res = contrast.residuals(spec, [0.4, -0.6], traj.data)
    # truncation error decays like |b|^t
    assert np.abs(res[100:] - z[100:]).max() < 1e-8
    assert np.abs(res[:5] - z[:5]).max() > 1e-8


def test_residuals_validate_inputs():
    with pytest.raises(ValueError):
        contrast.residuals(CONST, [1.0], np.array([1.0, np.nan]))
    with pytest.raises(ConstraintError):
        contrast.residuals(CONST, [-1.0], np.ones(5))


# ---------------------------------------------------------------------------
# failure modes and validation
# ---------------------------------------------------------------------------

def test_noninvertible_arma_gives_minus_inf():
    spec = make_model("arma", p=1, q=1, param_box=[(-0.98, 0.98), (-2.0, 2.0)])
    rng = np.random.default_rng(8)
    x = rng.standard_normal(3000)
    assert contrast.quasi_loglik("laplacian", spec, [0.4, 1.6], x) == -math.inf
    assert contrast.quasi_loglik("gaussian", spec, [0.4, 1.6], x) == -math.inf


def test_contrast_input_validation():
    x = np.ones(10)
    with pytest.raises(ValueError):
        contrast.quasi_loglik("huber", CONST, [1.0], x)
    with pytest.raises(ValueError):
        contrast.quasi_loglik("gaussian", CONST, [1.0], x, calibration=0.0)
    with pytest.raises(ValueError):
        contrast.quasi_loglik("gaussian", CONST, [1.0], np.array([]))
    with pytest.raises(ValueError):
        contrast.quasi_loglik("gaussian", CONST, [1.0], np.array([1.0, np.inf]))
    with pytest.raises(ConstraintError):
        contrast.quasi_loglik("gaussian", CONST, [20.0], x)


def test_laplacian_contrast_is_lipschitz_in_ar_coefficient():
    # AR(1): |dL/da| <= sum |x_{t-1}|, so grid increments are bounded
    spec = make_model("arma", p=1)
    rng = np.random.default_rng(9)
    x = rng.standard_normal(400)
    grid = np.linspace(-0.9, 0.9, 181)
    vals = np.array([contrast.quasi_loglik("laplacian", spec, [a], x) for a in grid])
    bound = np.abs(x).sum() * (grid[1] - grid[0]) + 1e-9
    assert np.abs(np.diff(vals)).max() <= bound
