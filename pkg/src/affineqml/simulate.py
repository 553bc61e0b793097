"""Trajectory generation.

The generator iterates the observation equation forward from zero initial
values for ``burn_in + n`` steps and keeps the last ``n``, so the retained
block is close to the stationary regime.  Refuses to run configurations
that fail both the generic contraction margin and the sharp per-family
condition (see :func:`affineqml.models.simulation_ready`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from . import models, noise as noise_mod
from .models import ModelSpec, NumericError, StationarityError

__all__ = ["Trajectory", "simulate", "write_trajectory_csv", "read_trajectory_csv"]

DEFAULT_BURN_IN = 500


@dataclass
class Trajectory:
    """A simulated sample plus the metadata needed to reproduce it."""

    data: np.ndarray
    n: int
    seed: object
    burn_in: int
    model_tag: str
    noise_tag: str


def _check_finite(x):
    bad = ~np.isfinite(x)
    if bad.any():
        raise NumericError(f"non-finite value at step {int(np.argmax(bad))}")


def _iterate_vol(spec, th, zeta):
    """Scalar forward loop for the volatility innovation process."""
    fam = spec.family
    T = zeta.size
    eps = np.zeros(T)
    if fam in ("arch", "garch", "arma-garch"):
        omega, alpha, beta = th["omega"], th["alpha"], th["beta"]
        pp, qq = alpha.size, beta.size
        sig2 = np.zeros(T)
        for t in range(T):
            s = omega
            for i in range(1, min(pp, t) + 1):
                s += alpha[i - 1] * eps[t - i] * eps[t - i]
            for k in range(1, min(qq, t) + 1):
                s += beta[k - 1] * sig2[t - k]
            sig2[t] = s
            eps[t] = math.sqrt(s) * zeta[t]
            if not math.isfinite(eps[t]):
                raise NumericError(f"scale recursion overflowed at step {t}")
        return eps
    if fam in ("aparch", "arma-aparch"):
        delta = th["delta"]
        omega, alpha, gamma, beta = th["omega"], th["alpha"], th["gamma"], th["beta"]
        pp, qq = alpha.size, beta.size
        sigd = np.zeros(T)
        for t in range(T):
            s = omega
            for i in range(1, min(pp, t) + 1):
                e = eps[t - i]
                s += alpha[i - 1] * (abs(e) - gamma[i - 1] * e) ** delta
            for k in range(1, min(qq, t) + 1):
                s += beta[k - 1] * sigd[t - k]
            sigd[t] = s
            eps[t] = s ** (1.0 / delta) * zeta[t]
            if not math.isfinite(eps[t]):
                raise NumericError(f"scale recursion overflowed at step {t}")
        return eps
    # arma-archinf
    c0, amp, dec = th["c0"], th["c_amp"], th["c_decay"]
    J = spec.J
    w = amp * np.arange(1, J + 1, dtype=float) ** (-dec)
    for t in range(T):
        lo = max(t - J, 0)
        window = eps[lo:t]
        s = c0
        if t > lo:
            s += float(w[:t - lo][::-1] @ (window * window))
        eps[t] = math.sqrt(s) * zeta[t]
        if not math.isfinite(eps[t]):
            raise NumericError(f"scale recursion overflowed at step {t}")
    return eps


def simulate(spec: ModelSpec, theta, noise: noise_mod.NoiseSpec, n: int, seed,
             burn_in: int = DEFAULT_BURN_IN) -> Trajectory:
    """Draw one trajectory of length ``n``.

    Parameters
    ----------
    spec, theta : model family and parameter vector (validated against the box)
    noise : NoiseSpec
    n : int, sample size, >= 1
    seed : splittable RNG key (int, (int, int) pair, SeedSequence)
    burn_in : int, steps discarded from the front
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    th_arr = models.check_theta(spec, theta)
    ok, why = models.simulation_ready(spec, th_arr, noise)
    if not ok:
        shown = "[" + ", ".join("%g" % v for v in th_arr) + "]"
        raise StationarityError(
            f"refusing to simulate {models.model_tag(spec)} at theta={shown}: {why}"
        )
    zeta = noise_mod.sample(noise, seed, burn_in + n)
    th = models._split(spec, th_arr)
    if spec.family == "arma":
        eps = zeta
    else:
        eps = _iterate_vol(spec, th, zeta)
    if spec.family in ("arma", "arma-garch", "arma-archinf", "arma-aparch") and (spec.p or spec.q):
        # X = (Q/P)(B) eps with zero initial state
        x = signal.lfilter(np.r_[1.0, -th["b"]], np.r_[1.0, -th["a"]], eps)
    else:
        x = eps
    _check_finite(x)
    return Trajectory(
        data=x[burn_in:].copy(),
        n=int(n),
        seed=seed,
        burn_in=int(burn_in),
        model_tag=models.model_tag(spec),
        noise_tag=noise.law,
    )


def _seed_repr(seed):
    if isinstance(seed, np.random.SeedSequence):
        return ",".join(str(int(s)) for s in np.atleast_1d(seed.entropy))
    if isinstance(seed, (tuple, list)):
        return ",".join(str(int(s)) for s in seed)
    return str(seed)


def write_trajectory_csv(path, traj: Trajectory):
    """One-column CSV with a comment header carrying the metadata."""
    with open(path, "w") as fh:
        fh.write(
            f"# seed={_seed_repr(traj.seed)} model={traj.model_tag} "
            f"noise={traj.noise_tag} n={traj.n} burn_in={traj.burn_in}\n"
        )
        fh.write("x\n")
        for v in traj.data:
            fh.write("%.17g\n" % v)


def read_trajectory_csv(path) -> Trajectory:
    meta = {}
    data = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = v
                continue
            if line == "x":
                continue
            data.append(float(line))
    arr = np.asarray(data, dtype=float)
    return Trajectory(
        data=arr,
        n=int(meta.get("n", arr.size)),
        seed=meta.get("seed"),
        burn_in=int(meta.get("burn_in", 0)),
        model_tag=meta.get("model", ""),
        noise_tag=meta.get("noise", ""),
    )
