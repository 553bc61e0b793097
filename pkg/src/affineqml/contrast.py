"""Quasi-likelihood contrasts.

Both contrasts run on the truncated conditional pair (all pre-sample
values zero), so the first few summands carry initialization bias that
averages out in n.  Values are "larger is better"; optimizers should
negate.
"""

from __future__ import annotations

import math

import numpy as np

from . import models

__all__ = ["KINDS", "quasi_loglik", "residuals"]

KINDS = ("gaussian", "laplacian")

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _checked_data(data):
    x = np.asarray(data, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("data must be a non-empty one-dimensional array")
    if not np.isfinite(x).all():
        raise ValueError("data contains non-finite values")
    return x


def quasi_loglik(kind, spec, theta, data, calibration=1.0,
                 gaussian_constant=False):
    """Truncated quasi log-likelihood of ``data`` at ``theta``.

    laplacian : -sum_t [ log(c M_t) + |x_t - f_t| / (c M_t) ]
    gaussian  : -(1/2) sum_t [ log(c^2 M_t^2) + ((x_t - f_t) / (c M_t))^2 ]

    where c is ``calibration``.  Leave c at 1.0 unless the contrast should
    treat the noise as having a known standard deviation other than 1; the
    experiment driver passes sd(zeta) for the gaussian contrast so both
    contrasts target the same parameter vector.  ``gaussian_constant`` adds
    the -n/2 log(2 pi) term (argmax unchanged).

    Returns -inf when the conditional recursions are not finite at
    ``theta``, which lets optimizers treat such points as worst-possible
    instead of crashing.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    c = float(calibration)
    if not (math.isfinite(c) and c > 0):
        raise ValueError("calibration must be a positive scalar")
    th = models.check_theta(spec, theta)
    x = _checked_data(data)
    f, m = models.conditional_arrays(spec, th, x)
    m = c * m
    if not (np.isfinite(f).all() and np.isfinite(m).all() and np.all(m > 0)):
        return -math.inf
    u = x - f
    if kind == "laplacian":
        val = -(np.log(m) + np.abs(u) / m).sum()
    else:
        val = -(np.log(m) + 0.5 * (u / m) ** 2).sum()
        if gaussian_constant:
            val -= x.size * _HALF_LOG_2PI
    return float(val) if math.isfinite(val) else -math.inf


def residuals(spec, theta, data):
    """Standardized truncated residuals (x_t - f_t) / M_t."""
    th = models.check_theta(spec, theta)
    x = _checked_data(data)
    f, m = models.conditional_arrays(spec, th, x)
    if not (np.isfinite(f).all() and np.isfinite(m).all() and np.all(m > 0)):
        raise models.NumericError("conditional recursions not finite at theta")
    return (x - f) / m
