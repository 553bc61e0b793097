"""Affine causal model families.

A model is an observation equation ``X_t = M_theta(past) * zeta_t +
f_theta(past)`` with ``f`` the conditional location and ``M`` the
conditional scale.  On a finite sample every recursion is truncated: all
pre-sample values (observations, residuals, internal scale states) are
taken to be zero, so the fitted quantities at time t depend on
``X_1 .. X_{t-1}`` only.

Families
--------
======================  =========================================================
arma                    location only, unit scale
arch / garch / aparch   scale only, location zero
arma-garch              ARMA location, GARCH scale driven by ARMA residuals
arma-archinf            ARMA location, hyperbolic ARCH(inf) scale ``c_amp*j**-c_decay``
arma-aparch             ARMA location, asymmetric power ARCH scale
======================  =========================================================

Parameter layout is always the volatility block first and the ARMA block
last; for arma-aparch it reads (delta, omega, alpha_1.., gamma_1..,
beta_1.., a_1.., b_1..).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate, signal

from . import noise as noise_mod

__all__ = [
    "FAMILIES",
    "ConstraintError",
    "NumericError",
    "StationarityError",
    "InvertibilityError",
    "ModelSpec",
    "CoeffSequence",
    "StationarityResult",
    "make_model",
    "param_names",
    "model_tag",
    "check_theta",
    "conditional_pair",
    "conditional_arrays",
    "arma_psi",
    "aparch_coefficients",
    "lipschitz_coefficients",
    "stationarity_check",
    "simulation_ready",
]

FAMILIES = (
    "arma",
    "arch",
    "garch",
    "aparch",
    "arma-garch",
    "arma-archinf",
    "arma-aparch",
)

_ROOT_TOL = 1e-8  # unit-root tolerance for companion eigenvalue checks


class ConstraintError(ValueError):
    """Parameter vector violates the model's box or shape constraints."""


class NumericError(RuntimeError):
    """A recursion or contrast produced NaN/overflow."""


class StationarityError(ValueError):
    """Requested operation needs a stationary configuration and has none."""


class InvertibilityError(ValueError):
    """MA polynomial has a root inside or on the unit disk."""


@dataclass(frozen=True)
class ModelSpec:
    """Static description of a model family instance.

    Attributes
    ----------
    family : str
        One of :data:`FAMILIES`.
    p, q : int
        ARMA orders (0 for pure volatility families).
    vol_p, vol_q : int
        Volatility orders p', q' (0 for pure ARMA).
    J : int
        Truncation lag for coefficient expansions and stationarity sums.
    param_box : tuple of (lo, hi) pairs
        Componentwise box for the parameter vector, in layout order.
    scale_floor : float
        Deterministic lower bound enforced on the conditional scale.
    """

    family: str
    p: int = 0
    q: int = 0
    vol_p: int = 0
    vol_q: int = 0
    J: int = 200
    param_box: tuple = field(default=None)
    scale_floor: float = field(default=None)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        for name in ("p", "q", "vol_p", "vol_q"):
            if not isinstance(getattr(self, name), (int, np.integer)) or getattr(self, name) < 0:
                raise ValueError(f"order {name} must be a nonnegative integer")
        if self.J < 1:
            raise ValueError("J must be >= 1")
        if self.family == "arma" and (self.vol_p or self.vol_q):
            raise ValueError("arma takes no volatility orders")
        if self.family == "arch" and self.vol_q:
            raise ValueError("arch takes no beta order, use garch")
        if self.family in ("garch", "aparch", "arma-garch", "arma-aparch") and self.vol_p < 1:
            raise ValueError(f"{self.family} needs vol_p >= 1")
        if self.family in ("arch", "garch", "aparch") and (self.p or self.q):
            raise ValueError(f"{self.family} takes no ARMA orders")
        if self.param_box is None:
            object.__setattr__(self, "param_box", _default_box(self))
        box = tuple((float(lo), float(hi)) for lo, hi in self.param_box)
        object.__setattr__(self, "param_box", box)
        d = len(param_names(self))
        if len(box) != d:
            raise ValueError(f"param_box has {len(box)} rows, model has {d} parameters")
        for k, (lo, hi) in enumerate(box):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"param_box row {k} is not a finite interval")
        if self.scale_floor is None:
            object.__setattr__(self, "scale_floor", _default_floor(self))
        if not self.scale_floor > 0:
            raise ValueError("scale_floor must be positive")


def param_names(spec: ModelSpec) -> list:
    """Names of the components of theta, in layout order."""
    fam = spec.family
    arma = [f"a{i}" for i in range(1, spec.p + 1)] + [f"b{j}" for j in range(1, spec.q + 1)]
    al = [f"alpha{i}" for i in range(1, spec.vol_p + 1)]
    be = [f"beta{j}" for j in range(1, spec.vol_q + 1)]
    ga = [f"gamma{i}" for i in range(1, spec.vol_p + 1)]
    if fam == "arma":
        return arma
    if fam == "arch":
        return ["omega"] + al
    if fam == "garch":
        return ["omega"] + al + be
    if fam == "aparch":
        return ["delta", "omega"] + al + ga + be
    if fam == "arma-garch":
        return ["omega"] + al + be + arma
    if fam == "arma-archinf":
        return ["c0", "c_amp", "c_decay"] + arma
    return ["delta", "omega"] + al + ga + be + arma


def model_tag(spec: ModelSpec) -> str:
    fam = spec.family
    if fam == "arma":
        return f"arma({spec.p},{spec.q})"
    if fam == "arch":
        return f"arch({spec.vol_p})"
    if fam in ("garch", "aparch"):
        return f"{fam}({spec.vol_p},{spec.vol_q})"
    vol = {"arma-garch": "garch", "arma-aparch": "aparch", "arma-archinf": "archinf"}[fam]
    if vol == "archinf":
        return f"arma({spec.p},{spec.q})-archinf"
    return f"arma({spec.p},{spec.q})-{vol}({spec.vol_p},{spec.vol_q})"


def _default_box(spec: ModelSpec) -> tuple:
    fam = spec.family
    arma = [(-0.98, 0.98)] * (spec.p + spec.q)
    al = [(0.0, 5.0)] * spec.vol_p
    be = [(0.0, 0.98)] * spec.vol_q
    ga = [(-0.95, 0.95)] * spec.vol_p
    om = [(1e-4, 10.0)]
    de = [(1.0, 3.0)]
    if fam == "arma":
        rows = arma
    elif fam == "arch":
        rows = om + al
    elif fam == "garch":
        rows = om + al + be
    elif fam == "aparch":
        rows = de + om + al + ga + be
    elif fam == "arma-garch":
        rows = om + al + be + arma
    elif fam == "arma-archinf":
        rows = [(1e-4, 10.0), (0.0, 5.0), (1.05, 5.0)] + arma
    else:
        rows = de + om + al + ga + be + arma
    return tuple(rows)


def _default_floor(spec: ModelSpec) -> float:
    fam = spec.family
    if fam == "arma":
        return 1.0
    names = param_names(spec)
    lo = {n: b[0] for n, b in zip(names, spec.param_box)}
    if fam in ("aparch", "arma-aparch"):
        w = max(lo["omega"], 1e-300)
        d_lo, d_hi = spec.param_box[0]
        # min over the delta box of omega**(1/delta)
        return min(w ** (1.0 / d_lo), w ** (1.0 / max(d_hi, d_lo)))
    key = "c0" if fam == "arma-archinf" else "omega"
    return math.sqrt(max(lo[key], 1e-300))


def make_model(family, p=0, q=0, vol_p=0, vol_q=0, J=200, param_box=None, scale_floor=None):
    """Convenience constructor with per-family default box and scale floor."""
    return ModelSpec(
        family=family, p=p, q=q, vol_p=vol_p, vol_q=vol_q, J=J,
        param_box=param_box, scale_floor=scale_floor,
    )


def box_arrays(spec: ModelSpec):
    box = np.asarray(spec.param_box, dtype=float)
    if box.size == 0:
        return np.empty(0), np.empty(0)
    return box[:, 0], box[:, 1]


def check_theta(spec: ModelSpec, theta) -> np.ndarray:
    """Validate shape and box membership; return theta as a float array."""
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    d = len(param_names(spec))
    if th.shape != (d,):
        raise ConstraintError(f"theta has shape {th.shape}, expected ({d},)")
    if not np.all(np.isfinite(th)):
        raise ConstraintError("theta contains non-finite entries")
    lo, hi = box_arrays(spec)
    if d and (np.any(th < lo - 1e-12) or np.any(th > hi + 1e-12)):
        k = int(np.argmax((th < lo - 1e-12) | (th > hi + 1e-12)))
        raise ConstraintError(
            f"theta[{k}] = {th[k]:.6g} outside box [{lo[k]:.6g}, {hi[k]:.6g}] "
            f"({param_names(spec)[k]})"
        )
    return th


def _split(spec: ModelSpec, th: np.ndarray) -> dict:
    fam = spec.family
    pp, qq = spec.vol_p, spec.vol_q
    out = {}
    k = 0
    if fam in ("aparch", "arma-aparch"):
        out["delta"] = th[0]
        k = 1
    if fam == "arma-archinf":
        out["c0"], out["c_amp"], out["c_decay"] = th[0], th[1], th[2]
        k = 3
    elif fam != "arma":
        out["omega"] = th[k]
        k += 1
        out["alpha"] = th[k:k + pp]
        k += pp
        if fam in ("aparch", "arma-aparch"):
            out["gamma"] = th[k:k + pp]
            k += pp
        out["beta"] = th[k:k + qq]
        k += qq
    out["a"] = th[k:k + spec.p]
    out["b"] = th[k + spec.p:k + spec.p + spec.q]
    return out


# ---------------------------------------------------------------------------
# conditional location / scale recursions (vectorized over t)
# ---------------------------------------------------------------------------

def _arma_residuals(a, b, x):
    # Q(B) eps = P(B) x with zero initial state; zero state is the truncation
    return signal.lfilter(np.r_[1.0, -a], np.r_[1.0, -b], x)


def _garch_sigma2(omega, alpha, beta, u, floor2):
    z = omega + (signal.lfilter(np.r_[0.0, alpha], [1.0], u * u) if alpha.size else 0.0)
    if beta.size:
        z = signal.lfilter([1.0], np.r_[1.0, -beta], np.broadcast_to(z, u.shape).copy())
    else:
        z = np.broadcast_to(z, u.shape).copy()
    return np.maximum(z, floor2)


def _aparch_sigma_delta(delta, omega, alpha, gamma, beta, u, floor_d):
    z = np.full(u.shape, omega)
    au = np.abs(u)
    for i in range(alpha.size):
        w = alpha[i] * (au - gamma[i] * u) ** delta
        if i + 1 < u.size:
            z[i + 1:] += w[:-(i + 1)]
    if beta.size:
        z = signal.lfilter([1.0], np.r_[1.0, -beta], z)
    return np.maximum(z, floor_d)


def _archinf_sigma2(c0, c_amp, c_decay, J, u, floor2):
    j = np.arange(1, J + 1, dtype=float)
    c = c_amp * j ** (-c_decay)
    z = c0 + signal.lfilter(np.r_[0.0, c], [1.0], u * u)
    return np.maximum(z, floor2)


def conditional_arrays(spec: ModelSpec, theta, x):
    """Truncated ``(f_hat, M_hat)`` for t = 1..len(x), vectorized.

    Entry ``t-1`` of each output depends on ``x[:t-1]`` only.  No box
    validation happens here (this is the optimizer's hot path); use
    :func:`conditional_pair` or the contrast layer for validated entry
    points.
    """
    th = _split(spec, np.atleast_1d(np.asarray(theta, dtype=float)))
    x = np.asarray(x, dtype=float)
    fam = spec.family
    floor = spec.scale_floor
    if fam == "arma":
        eps = _arma_residuals(th["a"], th["b"], x)
        return x - eps, np.ones_like(x)
    if fam in ("arch", "garch"):
        s2 = _garch_sigma2(th["omega"], th["alpha"], th["beta"], x, floor * floor)
        return np.zeros_like(x), np.sqrt(s2)
    if fam == "aparch":
        d = th["delta"]
        sd = _aparch_sigma_delta(d, th["omega"], th["alpha"], th["gamma"], th["beta"],
                                 x, floor ** d)
        return np.zeros_like(x), sd ** (1.0 / d)
    eps = _arma_residuals(th["a"], th["b"], x)
    f = x - eps
    if fam == "arma-garch":
        s2 = _garch_sigma2(th["omega"], th["alpha"], th["beta"], eps, floor * floor)
        return f, np.sqrt(s2)
    if fam == "arma-archinf":
        s2 = _archinf_sigma2(th["c0"], th["c_amp"], th["c_decay"], spec.J, eps, floor * floor)
        return f, np.sqrt(s2)
    d = th["delta"]
    sd = _aparch_sigma_delta(d, th["omega"], th["alpha"], th["gamma"], th["beta"],
                             eps, floor ** d)
    return f, sd ** (1.0 / d)


def conditional_pair(spec: ModelSpec, theta, history, t: int):
    """One-step conditional pair ``(f_hat_t, M_hat_t)``.

    ``history`` holds the observations from time 1 onward; ``t`` may run
    to ``len(history) + 1`` (one-step-ahead prediction off the end).
    """
    th = check_theta(spec, theta)
    hist = np.asarray(history, dtype=float)
    if hist.ndim != 1:
        raise ValueError("history must be one-dimensional")
    if not isinstance(t, (int, np.integer)) or not (1 <= t <= hist.size + 1):
        raise ValueError(f"t = {t!r} out of range 1..{hist.size + 1}")
    x = np.r_[hist[:t - 1], 0.0]  # dummy current value, never read by entry t-1
    f, m = conditional_arrays(spec, th, x)
    return float(f[t - 1]), float(m[t - 1])


# ---------------------------------------------------------------------------
# coefficient expansions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoeffSequence:
    """A lag-indexed coefficient sequence (entry k is lag k+1)."""

    values: np.ndarray
    kind: str  # psi | b_plus | b_minus | lipschitz_f | lipschitz_m


def _inverse_roots(coefs):
    # roots of z^k - c_1 z^{k-1} - ... - c_k, i.e. reciprocals of the roots
    # of 1 - sum c_i x^i, via the companion matrix
    c = np.asarray(coefs, dtype=float)
    if c.size == 0:
        return np.empty(0, dtype=complex)
    return np.roots(np.r_[1.0, -c])


def arma_psi(a, b, J: int) -> CoeffSequence:
    """Power-series coefficients of ``P/Q`` past the constant term.

    ``P(x) = 1 - sum a_i x^i`` and ``Q(x) = 1 - sum b_j x^j``; the series
    ``P/Q = 1 + psi_1 x + psi_2 x^2 + ...`` gives the weights of the lagged
    observations in the innovation recursion.  Requires Q to have all roots
    strictly outside the unit disk.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float)) if np.size(a) else np.empty(0)
    b = np.atleast_1d(np.asarray(b, dtype=float)) if np.size(b) else np.empty(0)
    if J < 1:
        raise ValueError("J must be >= 1")
    if b.size:
        rad = np.abs(_inverse_roots(b)).max()
        if rad >= 1.0 - _ROOT_TOL:
            raise InvertibilityError(
                f"MA polynomial root of modulus {1.0 / rad:.6g} inside or on the unit disk"
            )
    psi = np.zeros(J + 1)
    psi[0] = 1.0
    for j in range(1, J + 1):
        v = -a[j - 1] if j <= a.size else 0.0
        kmax = min(j, b.size)
        for k in range(1, kmax + 1):
            v += b[k - 1] * psi[j - k]
        psi[j] = v
    return CoeffSequence(values=psi[1:], kind="psi")


def aparch_coefficients(delta, omega, alpha, gamma, beta, J: int):
    """Expansion coefficients of the APARCH scale in past innovations.

    Returns ``(b0, plus, minus)`` where ``sigma^delta_t = b0 +
    sum_j [b_j^+ (eps_{t-j}^+)^delta + b_j^- (eps_{t-j}^-)^delta]``.
    The recursions are ``b_i^+- = sum_k beta_k b_{i-k}^+- +
    alpha_i (1 -+ gamma_i)^delta`` with the alpha term dropped past the
    alpha order.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    beta = np.atleast_1d(np.asarray(beta, dtype=float)) if np.size(beta) else np.empty(0)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if alpha.size != gamma.size:
        raise ValueError("alpha and gamma must have equal length")
    if np.any(alpha < 0) or np.any(beta < 0):
        raise ConstraintError("alpha and beta must be nonnegative")
    if np.any(np.abs(gamma) > 1):
        raise ConstraintError("gamma must lie in [-1, 1]")
    sb = beta.sum()
    if sb >= 1.0:
        raise StationarityError(f"sum of beta coefficients is {sb:.6g} >= 1")
    b0 = omega / (1.0 - sb)
    bp = np.zeros(J + 1)
    bm = np.zeros(J + 1)
    for i in range(1, J + 1):
        vp = vm = 0.0
        for k in range(1, min(i, beta.size) + 1):
            vp += beta[k - 1] * bp[i - k]
            vm += beta[k - 1] * bm[i - k]
        if i <= alpha.size:
            vp += alpha[i - 1] * (1.0 - gamma[i - 1]) ** delta
            vm += alpha[i - 1] * (1.0 + gamma[i - 1]) ** delta
        bp[i], bm[i] = vp, vm
    return float(b0), CoeffSequence(bp[1:], "b_plus"), CoeffSequence(bm[1:], "b_minus")


# ---------------------------------------------------------------------------
# Lipschitz coefficients and the stationarity margin
# ---------------------------------------------------------------------------

def _geom_tail(window, ratio, power=1.0):
    # conservative geometric continuation of a coefficient tail:
    # sum_{k>=1} (w * ratio^k)^power with w the max of the last window
    if ratio <= 0 or not window.size:
        return 0.0
    w = float(np.max(window))
    if w <= 0:
        return 0.0
    r = ratio**power
    if r >= 1:
        return math.inf
    return (w**power) * r / (1.0 - r) * window.size


def _vol_lipschitz(spec, th, J):
    """(alpha_M sequence, tail) for the volatility part evaluated at th."""
    fam = spec.family
    if fam == "arma":
        return np.zeros(J), 0.0
    if fam in ("arch", "garch", "arma-garch"):
        alpha = th["alpha"]
        beta = th["beta"]
        b = np.zeros(J + 1)
        for i in range(1, J + 1):
            v = alpha[i - 1] if i <= alpha.size else 0.0
            for k in range(1, min(i, beta.size) + 1):
                v += beta[k - 1] * b[i - k]
            b[i] = v
        am = np.sqrt(b[1:])
        tail = _geom_tail(b[J - beta.size + 1:] if beta.size else np.empty(0),
                          float(beta.sum()), power=0.5)
        return am, tail
    if fam in ("aparch", "arma-aparch"):
        d = float(th["delta"])
        _, bp, bm = aparch_coefficients(d, float(th["omega"]), th["alpha"],
                                        th["gamma"], th["beta"], J)
        big = np.maximum(bp.values, bm.values)
        am = big ** (1.0 / d)
        beta = th["beta"]
        tail = _geom_tail(big[J - beta.size:] if beta.size else np.empty(0),
                          float(beta.sum()), power=1.0 / d)
        return am, tail
    # arma-archinf
    j = np.arange(1, J + 1, dtype=float)
    am = np.sqrt(th["c_amp"]) * j ** (-th["c_decay"] / 2.0)
    half = th["c_decay"] / 2.0
    if half > 1.0:
        tail = math.sqrt(th["c_amp"]) * J ** (1.0 - half) / (half - 1.0)
    else:
        tail = math.inf if th["c_amp"] > 0 else 0.0
    return am, tail


def _lipschitz_at(spec, theta, J):
    """Pointwise Lipschitz coefficient sequences and tail bounds.

    Returns (alpha_f, alpha_m, tail_f, tail_m).
    """
    th = _split(spec, np.atleast_1d(np.asarray(theta, dtype=float)))
    fam = spec.family
    am_vol, tail_vol = _vol_lipschitz(spec, th, J)
    if fam in ("arch", "garch", "aparch"):
        return np.zeros(J), am_vol, 0.0, tail_vol
    psi = arma_psi(th["a"], th["b"], J).values
    apsi = np.abs(psi)
    q = spec.q
    if q == 0:
        tail_psi = 0.0
    else:
        rad = float(np.abs(_inverse_roots(th["b"])).max()) if np.any(th["b"]) else 0.0
        tail_psi = _geom_tail(apsi[J - q:], rad)
    if fam == "arma":
        return apsi, np.zeros(J), tail_psi, 0.0
    # composed: location inherits |psi| (the volatility family has f = 0),
    # scale coefficients convolve with (1, |psi_1|, |psi_2|, ...)
    kernel = np.r_[1.0, apsi]
    am = np.convolve(am_vol, kernel)[:J]
    total_m = (am_vol.sum() + tail_vol) * (1.0 + apsi.sum() + tail_psi)
    tail_m = max(total_m - am.sum(), 0.0)
    return apsi, am, tail_psi, tail_m


def lipschitz_coefficients(spec: ModelSpec, box=None, J=None):
    """Componentwise sup over ``box`` of the Lipschitz coefficient sequences.

    ``box`` defaults to the model's parameter box; a single parameter vector
    is treated as a degenerate box.  The supremum is evaluated at the box
    corners plus the center, which is exact for the monotone volatility
    recursions and a practical approximation for ARMA boxes.
    """
    J = spec.J if J is None else int(J)
    if box is None:
        box = np.asarray(spec.param_box, dtype=float)
    else:
        box = np.asarray(box, dtype=float)
    if box.ndim == 1:
        points = [box]
    else:
        if box.ndim != 2 or box.shape[1] != 2:
            raise ValueError("box must be a (d, 2) array of bounds or a theta vector")
        lo, hi = box[:, 0], box[:, 1]
        free = [k for k in range(box.shape[0]) if hi[k] > lo[k]]
        points = [0.5 * (lo + hi)]
        for combo in itertools.product((0, 1), repeat=len(free)):
            pt = lo.copy()
            for idx, bit in zip(free, combo):
                pt[idx] = hi[idx] if bit else lo[idx]
            points.append(pt)
    af = np.zeros(J)
    am = np.zeros(J)
    for pt in points:
        f_k, m_k, _, _ = _lipschitz_at(spec, pt, J)
        af = np.maximum(af, f_k)
        am = np.maximum(am, m_k)
    return CoeffSequence(af, "lipschitz_f"), CoeffSequence(am, "lipschitz_m")


class StationarityResult(NamedTuple):
    member: bool
    margin: float
    tail_bound: float


def stationarity_check(spec: ModelSpec, theta, r, noise: noise_mod.NoiseSpec,
                       J=None) -> StationarityResult:
    """Contraction margin of the r-order stationarity region at ``theta``.

    The margin is ``1 - [sum alpha_f + (E|zeta|^r)^(1/r) * sum alpha_M]``
    with the coefficient sums truncated at J and their conservative tail
    bounds folded in; membership means a strictly positive margin.  This
    condition is sufficient, not necessary, so non-membership does not by
    itself mean the process is non-stationary.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    J = spec.J if J is None else int(J)
    af, am, tail_f, tail_m = _lipschitz_at(spec, theta, J)
    factor = noise_mod.moment_factor(noise, r)
    m_sum = am.sum() + tail_m
    total = af.sum() + tail_f + (factor * m_sum if m_sum > 0 else 0.0)
    margin = 1.0 - total
    return StationarityResult(member=bool(margin > 0), margin=float(margin),
                              tail_bound=float(tail_f + tail_m))


# ---------------------------------------------------------------------------
# simulation gate: generic margin, or a sharp family-specific condition
# ---------------------------------------------------------------------------

def _expect(noise_spec, fn):
    # E[fn(zeta)] for even-extended integrands, by quadrature
    g = lambda z: float(noise_mod.density(noise_spec, z))
    upper = 1.0 / noise_spec.scale if noise_spec.law == "uniform" else np.inf
    pts = [0.0, 0.5, 1.0, 2.0, 5.0, 20.0]
    pts = [p for p in pts if p < upper] + [upper]
    val = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        v, _ = integrate.quad(lambda z: (fn(z) + fn(-z)) * g(z), a, b, limit=200)
        val += v
    return val


def simulation_ready(spec: ModelSpec, theta, noise: noise_mod.NoiseSpec):
    """Decide whether the generating recursion may be iterated safely.

    Passes when the generic contraction margin at r=1 is positive, or
    failing that when a sharp classical condition for the family holds
    (unit-disk root checks for the ARMA part, a Lyapunov or moment
    condition for the volatility part).  Returns ``(ok, reason)``.
    """
    th = _split(spec, check_theta(spec, theta))
    res = stationarity_check(spec, theta, r=1, noise=noise)
    if res.member:
        return True, f"contraction margin {res.margin:.4g} > 0"
    fam = spec.family
    reasons = []
    if fam in ("arma", "arma-garch", "arma-archinf", "arma-aparch"):
        for name, coefs in (("AR", th["a"]), ("MA", th["b"])):
            if coefs.size:
                rad = float(np.abs(_inverse_roots(coefs)).max())
                if rad >= 1.0 - _ROOT_TOL:
                    return False, (
                        f"{name} polynomial root of modulus {1.0 / max(rad, 1e-300):.6g} "
                        "inside or on the unit disk"
                    )
        reasons.append("ARMA roots outside the unit disk")
    ok, why = _vol_part_ready(spec, th, noise)
    if not ok:
        return False, why
    reasons.append(why)
    return True, "; ".join(reasons)


def _vol_part_ready(spec, th, noise):
    fam = spec.family
    if fam == "arma":
        return True, "unit scale"
    s2 = noise_mod.variance(noise)
    if fam == "arma-archinf":
        j = np.arange(1, spec.J + 1, dtype=float)
        csum = float(th["c_amp"] * np.sum(j ** (-th["c_decay"])))
        csum += float(th["c_amp"]) * spec.J ** (1.0 - th["c_decay"]) / (th["c_decay"] - 1.0)
        if s2 * csum < 1.0:
            return True, f"second-moment sum {s2 * csum:.4g} < 1"
        return False, f"second-moment sum {s2 * csum:.4g} >= 1"
    alpha, beta = th["alpha"], th["beta"]
    if fam in ("aparch", "arma-aparch"):
        if alpha.size == 1 and beta.size <= 1:
            d = float(th["delta"])
            a1, g1 = float(alpha[0]), float(th["gamma"][0])
            b1 = float(beta[0]) if beta.size else 0.0
            lyap = _expect(noise, lambda z: math.log(a1 * (abs(z) - g1 * z) ** d + b1)
                           if (a1 * (abs(z) - g1 * z) ** d + b1) > 0 else -math.inf)
            if lyap < 0:
                return True, f"Lyapunov exponent {lyap:.4g} < 0"
            return False, f"Lyapunov exponent {lyap:.4g} >= 0"
        return False, "no sharp condition for higher-order APARCH"
    # arch / garch
    if alpha.size == 1 and beta.size <= 1:
        a1 = float(alpha[0])
        b1 = float(beta[0]) if beta.size else 0.0
        if a1 == 0.0 and b1 == 0.0:
            return True, "constant scale"
        lyap = _expect(noise, lambda z: math.log(a1 * z * z + b1)
                       if a1 * z * z + b1 > 0 else -math.inf)
        if lyap < 0:
            return True, f"Lyapunov exponent {lyap:.4g} < 0"
        return False, f"Lyapunov exponent {lyap:.4g} >= 0"
    second = s2 * float(alpha.sum()) + float(beta.sum())
    if second < 1.0:
        return True, f"second-moment condition {second:.4g} < 1"
    if second <= 1.0 + 1e-9 and float(alpha.sum()) > 0:
        # boundary case is still strictly stationary by Jensen strictness
        return True, f"second-moment boundary {second:.4g} with nondegenerate alpha"
    return False, f"second-moment condition {second:.4g} > 1"
