"""Sandwich covariances: analytic oracles, pinned reductions, MC validation."""

import math

import numpy as np
import pytest
from scipy import signal

from affineqml import asymptotics, models, noise
from affineqml.asymptotics import (attach, confidence_intervals, g0_estimate,
                                   gamma_matrices, sandwich)
from affineqml.models import NumericError, make_model
from affineqml.optimize import fit
from affineqml.simulate import simulate

LAP = noise.make_noise("laplace")
CONST = make_model("arch", vol_p=0)


# ---------------------------------------------------------------------------
# gamma matrices vs analytic derivatives
# ---------------------------------------------------------------------------

def _arma11_gradients(a, b, x):
    # df/da: y_t = x_{t-1} + b y_{t-1}; df/db: y_t = -eps_{t-1} + b y_{t-1}
    eps = signal.lfilter([1.0, -a], [1.0, -b], x)
    dfa = signal.lfilter([0.0, 1.0], [1.0, -b], x)
    dfb = signal.lfilter([0.0, -1.0], [1.0, -b], eps)
    return np.vstack([dfa, dfb])


def test_gamma_f_matches_analytic_arma_gradient():
    spec = make_model("arma", p=1, q=1)
    th = [0.4, -0.6]
    x = simulate(spec, th, LAP, 3000, seed=80).data
    grad = _arma11_gradients(0.4, -0.6, x)
    want = grad @ grad.T / x.size
    gf, gm = gamma_matrices(spec, th, x)
    assert np.allclose(gf, want, rtol=1e-5, atol=1e-10)
    assert np.array_equal(gm, np.zeros((2, 2)))


def test_gamma_f_matches_population_value_ar1():
    # AR(1): df/da = x_{t-1}, so gamma_f -> E X^2 = var(zeta) / (1 - a^2)
    spec = make_model("arma", p=1)
    x = simulate(spec, [0.4], LAP, 20_000, seed=81).data
    gf, gm = gamma_matrices(spec, [0.4], x)
    exact = (x[:-1] ** 2).sum() / x.size
    assert gf[0, 0] == pytest.approx(exact, rel=1e-6)
    assert gf[0, 0] == pytest.approx(2.0 / (1.0 - 0.16), rel=0.05)


def test_gamma_m_is_exactly_zero_only_for_pure_location():
    spec = make_model("arch", vol_p=1)
    x = simulate(spec, [0.4, 0.2], LAP, 2000, seed=82).data
    gf, gm = gamma_matrices(spec, [0.4, 0.2], x)
    assert np.array_equal(gf, np.zeros((2, 2)))
    assert np.linalg.eigvalsh(gm)[0] > 0


def test_constant_scale_gamma_m_closed_form():
    # M = sqrt(omega): (dM/M)^2 = 1 / (4 omega^2) at every t
    x = np.ones(500)
    for omega in (0.5, 1.0, 2.0):
        _, gm = gamma_matrices(CONST, [omega], x)
        assert gm[0, 0] == pytest.approx(1.0 / (4.0 * omega * omega), rel=1e-8)


def test_gamma_warns_one_sided_at_box_edge():
    spec = make_model("arch", vol_p=1)
    x = simulate(spec, [0.4, 0.2], LAP, 500, seed=83).data
    with pytest.warns(RuntimeWarning, match="one-sided"):
        gamma_matrices(spec, [0.4, 0.0], x)


# ---------------------------------------------------------------------------
# sandwich reductions (pinned scalars)
# ---------------------------------------------------------------------------

def test_sandwich_pure_scale_laplacian():
    avar = sandwich(0.0, 3.0, sigma2=2.0, g0=0.5)
    assert avar[0, 0] == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_sandwich_pure_location_laplacian_is_lad_limit():
    avar = sandwich(2.0, 0.0, sigma2=7.0, g0=0.25)
    assert avar[0, 0] == pytest.approx(2.0, rel=1e-12)


def test_sandwich_pure_scale_gaussian():
    avar = sandwich(0.0, 3.0, sigma2=2.0, g0=0.5, kind="gaussian", kurtosis=6.0)
    assert avar[0, 0] == pytest.approx(5.0 / 12.0, rel=1e-12)


def test_sandwich_pure_location_gaussian():
    avar = sandwich(2.0, 0.0, sigma2=2.0, g0=0.5, kind="gaussian", kurtosis=6.0)
    assert avar[0, 0] == pytest.approx(1.0, rel=1e-12)


def test_sandwich_validation_and_singularity():
    with pytest.raises(ValueError):
        sandwich(1.0, 1.0, sigma2=2.0, g0=0.5, kind="gaussian")
    with pytest.raises(ValueError):
        sandwich(1.0, 1.0, sigma2=-1.0, g0=0.5)
    gm = np.array([[1.0, 0.0], [0.0, 0.0]])
    gf = np.zeros((2, 2))
    with pytest.raises(NumericError, match="alpha1"):
        sandwich(gf, gm, sigma2=2.0, g0=0.5, names=["omega", "alpha1"])


# ---------------------------------------------------------------------------
# density at zero
# ---------------------------------------------------------------------------

def test_g0_estimate_laplace_and_gaussian():
    z = noise.sample(LAP, 90, 100_000)
    assert g0_estimate(z) == pytest.approx(0.5, rel=0.05)
    z = noise.sample(noise.make_noise("gaussian"), 91, 100_000)
    assert g0_estimate(z) == pytest.approx(1.0 / math.pi, rel=0.03)


def test_g0_estimate_rejects_short_or_flat_input():
    with pytest.raises(ValueError):
        g0_estimate(np.ones(99))
    with pytest.raises(ValueError):
        g0_estimate(np.ones(200))


# ---------------------------------------------------------------------------
# confidence intervals
# ---------------------------------------------------------------------------

def test_ci_pinned_width():
    ci = confidence_intervals([0.0], [[1.0]], 3600)
    assert ci[0, 1] == pytest.approx(0.0326661, abs=1e-6)
    assert ci[0, 0] == pytest.approx(-0.0326661, abs=1e-6)
    z = (ci[0, 1] - ci[0, 0]) / 2.0 / math.sqrt(1.0 / 3600.0)
    assert z == pytest.approx(1.959964, abs=1e-5)


def test_ci_clamps_negative_variance_with_warning():
    with pytest.warns(RuntimeWarning, match="clamped"):
        ci = confidence_intervals([1.0], [[-1e-12]], 100)
    assert ci[0, 0] == ci[0, 1] == 1.0
    with pytest.raises(ValueError):
        confidence_intervals([1.0], [[1.0]], 100, level=1.5)


# ---------------------------------------------------------------------------
# end to end
# ---------------------------------------------------------------------------

def test_constant_scale_se_matches_direct_monte_carlo():
    # omega_hat = (mean |x|)^2 has delta-method variance 4 (sigma2 - 1) omega^2
    # per observation; the sandwich must land on the same number
    R, n = 4000, 400
    z = np.abs(noise.sample(LAP, 92, R * n)).reshape(R, n)
    omega_hat = z.mean(axis=1) ** 2
    mc = omega_hat.std(ddof=1) * math.sqrt(n)

    x = simulate(CONST, [1.0], LAP, 20_000, seed=93).data
    est = fit("laplacian", CONST, x)
    asym = attach(est, x)
    se_scaled = asym.se[0] * math.sqrt(x.size)
    assert mc == pytest.approx(2.0, rel=0.1)
    assert se_scaled == pytest.approx(mc, rel=0.1)


def test_attach_arch_both_contrasts():
    spec = make_model("arch", vol_p=1)
    x = simulate(spec, [0.4, 0.2], LAP, 5000, seed=94).data
    for kind, cal in [("laplacian", 1.0), ("gaussian", math.sqrt(2.0))]:
        est = fit(kind, spec, x, calibration=cal)
        asym = attach(est, x)
        assert 1.7 < asym.sigma2 < 2.3
        assert 3.5 < asym.kurtosis < 9.0
        assert 0.42 < asym.g0 < 0.56
        assert (asym.se > 0).all() and np.isfinite(asym.se).all()
        assert np.linalg.eigvalsh(asym.avar)[0] > 0
        ci = confidence_intervals(est.theta, asym.avar, asym.n)
        assert (ci[:, 0] < est.theta).all() and (est.theta < ci[:, 1]).all()
