"""Asymptotic covariance of the contrast estimators.

Everything here is per-observation: ``avar`` estimates the limit covariance
of sqrt(n) (theta_hat - theta*), so standard errors are sqrt(diag(avar)/n).
The two information matrices

    gamma_f = avg over t of  (df_t/dtheta)(df_t/dtheta)' / M_t^2
    gamma_m = avg over t of  (dM_t/dtheta)(dM_t/dtheta)' / M_t^2

are built from central finite differences of the truncated conditional
recursions, so no per-family derivative code is needed.  The noise enters
through scalars estimated from the standardized residuals: variance,
density at zero, and (for the gaussian contrast) kurtosis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats as sstats

from . import contrast, models
from .models import ModelSpec, NumericError

__all__ = ["Asymptotics", "attach", "confidence_intervals", "g0_estimate",
           "gamma_matrices", "sandwich"]

COND_LIMIT = 1e12


def gamma_matrices(spec: ModelSpec, theta, data, rel_step=1e-5):
    """Finite-difference estimates of (gamma_f, gamma_m) at ``theta``.

    Central differences with per-coordinate step rel_step * max(1, |theta_i|);
    falls back to a one-sided difference (with a RuntimeWarning) when the
    centered stencil would leave the parameter box.
    """
    th = models.check_theta(spec, theta)
    x = np.asarray(data, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("data must be a non-empty one-dimensional array")
    lo, hi = models.box_arrays(spec)
    names = models.param_names(spec)
    f0, m0 = models.conditional_arrays(spec, th, x)
    if not (np.isfinite(f0).all() and np.isfinite(m0).all() and np.all(m0 > 0)):
        raise NumericError("conditional recursions not finite at theta")
    n, d = x.size, th.size
    df = np.zeros((d, n))
    dm = np.zeros((d, n))
    for i in range(d):
        h = rel_step * max(1.0, abs(th[i]))
        up, dn = th.copy(), th.copy()
        up[i] += h
        dn[i] -= h
        if up[i] > hi[i] or dn[i] < lo[i]:
            warnings.warn(
                f"{names[i]} is within {h:.2e} of the box edge; "
                "using a one-sided difference", RuntimeWarning)
            if up[i] > hi[i]:
                up[i] = th[i]
            else:
                dn[i] = th[i]
        fu, mu = models.conditional_arrays(spec, up, x)
        fd, md = models.conditional_arrays(spec, dn, x)
        if not (np.isfinite(fu).all() and np.isfinite(mu).all()
                and np.isfinite(fd).all() and np.isfinite(md).all()):
            raise NumericError(f"recursions not finite when perturbing {names[i]}")
        step = up[i] - dn[i]
        df[i] = (fu - fd) / step
        dm[i] = (mu - md) / step
    w = 1.0 / (m0 * m0)
    gf = (df * w) @ df.T / n
    gm = (dm * w) @ dm.T / n
    return 0.5 * (gf + gf.T), 0.5 * (gm + gm.T)


def g0_estimate(resid):
    """Residual density at zero: Epanechnikov kernel, Silverman bandwidth."""
    r = np.asarray(resid, dtype=float)
    if r.ndim != 1 or r.size < 100:
        raise ValueError("need at least 100 residuals for a usable density estimate")
    sd = r.std(ddof=1)
    q75, q25 = np.percentile(r, [75.0, 25.0])
    s = min(sd, (q75 - q25) / 1.34)
    if not (s > 0 and math.isfinite(s)):
        raise ValueError("residuals are degenerate; density estimate undefined")
    h = 0.9 * s * r.size ** (-0.2)
    u = r / h
    return float(0.75 * np.clip(1.0 - u * u, 0.0, None).sum() / (r.size * h))


def sandwich(gamma_f, gamma_m, sigma2, g0, kind="laplacian", kurtosis=None,
             names=None):
    """Per-observation sandwich covariance for the chosen contrast.

    laplacian:  bread = gamma_m + 2 g0 gamma_f
                meat  = (sigma2 - 1) gamma_m + gamma_f
    gaussian:   bread = 2 gamma_m + gamma_f / sigma2
                meat  = (kurtosis - 1) gamma_m + gamma_f / sigma2

    Pure-location models reduce to gamma_f^{-1} / (4 g0^2) under the
    laplacian contrast and sigma2 gamma_f^{-1} under the gaussian one; pure
    scale models reduce to (sigma2 - 1) gamma_m^{-1} and
    (kurtosis - 1) / 4 gamma_m^{-1}.
    """
    gf = np.atleast_2d(np.asarray(gamma_f, dtype=float))
    gm = np.atleast_2d(np.asarray(gamma_m, dtype=float))
    if gf.shape != gm.shape or gf.shape[0] != gf.shape[1]:
        raise ValueError("gamma_f and gamma_m must be square and same shape")
    if not (sigma2 > 0 and g0 > 0):
        raise ValueError("sigma2 and g0 must be positive")
    if kind == "laplacian":
        bread = gm + 2.0 * g0 * gf
        meat = (sigma2 - 1.0) * gm + gf
    elif kind == "gaussian":
        if kurtosis is None:
            raise ValueError("gaussian sandwich needs the residual kurtosis")
        bread = 2.0 * gm + gf / sigma2
        meat = (kurtosis - 1.0) * gm + gf / sigma2
    else:
        raise ValueError(f"kind must be one of {contrast.KINDS}, got {kind!r}")
    w, v = np.linalg.eigh(bread)
    if w[0] <= 0 or w[-1] >= COND_LIMIT * w[0]:
        j = int(np.abs(v[:, 0]).argmax())
        label = names[j] if names is not None else f"component {j}"
        raise NumericError(
            f"information matrix numerically singular along {label} "
            f"(smallest eigenvalue {w[0]:.3e})")
    binv = (v / w) @ v.T
    avar = binv @ meat @ binv
    return 0.5 * (avar + avar.T)


def confidence_intervals(theta, avar, n, level=0.95):
    """Wald intervals theta_i +/- z sqrt(avar_ii / n), one row per parameter."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    var = np.diag(np.atleast_2d(avar)).copy() / float(n)
    if (var < 0).any():
        warnings.warn("negative variance estimate clamped to zero", RuntimeWarning)
        var = np.clip(var, 0.0, None)
    half = sstats.norm.ppf(0.5 + 0.5 * level) * np.sqrt(var)
    return np.column_stack([th - half, th + half])


@dataclass
class Asymptotics:
    avar: np.ndarray
    se: np.ndarray
    sigma2: float
    kurtosis: float
    g0: float
    gamma_f: np.ndarray
    gamma_m: np.ndarray
    n: int


def attach(est, data) -> Asymptotics:
    """Estimate the sandwich pieces at a fit result.

    Works at whatever parameter the contrast targeted: residual moments are
    taken from the fit itself, so a gaussian fit with default calibration
    yields intervals for its own pseudo-true scale parametrization.
    """
    x = np.asarray(data, dtype=float)
    resid = contrast.residuals(est.spec, est.theta, x)
    sigma2 = float((resid * resid).mean())
    kurt = float((resid ** 4).mean()) / sigma2 ** 2
    g0 = g0_estimate(resid)
    gf, gm = gamma_matrices(est.spec, est.theta, x)
    avar = sandwich(gf, gm, sigma2, g0, kind=est.kind,
                    kurtosis=kurt if est.kind == "gaussian" else None,
                    names=models.param_names(est.spec))
    var = np.diag(avar).copy()
    if (var < 0).any():
        warnings.warn("negative variance estimate clamped to zero", RuntimeWarning)
        var = np.clip(var, 0.0, None)
    return Asymptotics(
        avar=avar,
        se=np.sqrt(var / x.size),
        sigma2=sigma2,
        kurtosis=kurt,
        g0=g0,
        gamma_f=gf,
        gamma_m=gm,
        n=int(x.size),
    )
