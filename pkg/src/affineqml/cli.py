"""Command line front end.

Subcommands read JSON config files validated against the schemas below.
Exit codes: 0 success, 1 I/O failure, 2 bad config or usage, 3 numeric
failure (refused simulation, singular information matrix, overflow).

Every file-writing command drops a sibling ``<out>.manifest.json`` with the
sha256 of the canonicalized config, the effective seed, the tool version,
and the wall time, so results can be traced back to their inputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import jsonschema
import numpy as np

from . import __version__, asymptotics, contrast, models, noise as noise_mod
from .models import (ConstraintError, InvertibilityError, NumericError,
                     StationarityError)
from .montecarlo import ExperimentConfig, RmseTable, run_experiment
from .optimize import OptimConfig, fit
from .simulate import read_trajectory_csv, simulate, write_trajectory_csv


class ConfigError(Exception):
    pass


_MODEL_SCHEMA = {
    "type": "object",
    "required": ["family"],
    "additionalProperties": False,
    "properties": {
        "family": {"enum": list(models.FAMILIES)},
        "p": {"type": "integer", "minimum": 0},
        "q": {"type": "integer", "minimum": 0},
        "vol_p": {"type": "integer", "minimum": 0},
        "vol_q": {"type": "integer", "minimum": 0},
        "J": {"type": "integer", "minimum": 1},
        "param_box": {
            "type": "array", "minItems": 1,
            "items": {"type": "array", "minItems": 2, "maxItems": 2,
                      "items": {"type": "number"}},
        },
        "scale_floor": {"type": "number", "exclusiveMinimum": 0},
    },
}

_SEED_SCHEMA = {
    "oneOf": [
        {"type": "integer", "minimum": 0},
        {"type": "array", "minItems": 1,
         "items": {"type": "integer", "minimum": 0}},
    ],
}

_OPTIM_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "n_starts": {"type": "integer", "minimum": 1},
        "max_evals": {"type": "integer", "minimum": 10},
        "xatol": {"type": "number", "exclusiveMinimum": 0},
        "fatol": {"type": "number", "exclusiveMinimum": 0},
        "start_seed": {"type": "integer", "minimum": 0},
    },
}

_THETA_SCHEMA = {"type": "array", "minItems": 1, "items": {"type": "number"}}

_SIMULATE_SCHEMA = {
    "type": "object",
    "required": ["model", "theta", "noise", "n"],
    "additionalProperties": False,
    "properties": {
        "model": _MODEL_SCHEMA,
        "theta": _THETA_SCHEMA,
        "noise": {"enum": list(noise_mod.LAWS)},
        "n": {"type": "integer", "minimum": 1},
        "burn_in": {"type": "integer", "minimum": 0},
        "seed": _SEED_SCHEMA,
    },
}

_FIT_SCHEMA = {
    "type": "object",
    "required": ["model", "contrast"],
    "additionalProperties": False,
    "properties": {
        "model": _MODEL_SCHEMA,
        "contrast": {"enum": list(contrast.KINDS)},
        "calibration": {"type": "number", "exclusiveMinimum": 0},
        "optim": _OPTIM_SCHEMA,
        "asymptotics": {"type": "boolean"},
        "level": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    },
}

_EXPERIMENT_SCHEMA = {
    "type": "object",
    "required": ["model", "theta0", "noises", "sizes"],
    "additionalProperties": False,
    "properties": {
        "model": _MODEL_SCHEMA,
        "theta0": _THETA_SCHEMA,
        "noises": {"type": "array", "minItems": 1,
                   "items": {"enum": list(noise_mod.LAWS)}},
        "sizes": {"type": "array", "minItems": 1,
                  "items": {"type": "integer", "minimum": 1}},
        "contrasts": {"type": "array", "minItems": 1,
                      "items": {"enum": list(contrast.KINDS)}},
        "reps": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "burn_in": {"type": "integer", "minimum": 0},
        "optim": _OPTIM_SCHEMA,
        "workers": {"type": "integer", "minimum": 1},
    },
}

_CHECK_SCHEMA = {
    "type": "object",
    "required": ["model", "theta", "noise"],
    "additionalProperties": False,
    "properties": {
        "model": _MODEL_SCHEMA,
        "theta": _THETA_SCHEMA,
        "noise": {"enum": list(noise_mod.LAWS)},
        "r": {"type": "number", "minimum": 1},
    },
}


def _load_config(path, schema):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    try:
        jsonschema.validate(raw, schema)
    except jsonschema.ValidationError as e:
        raise ConfigError(f"{path}: {e.json_path}: {e.message}") from e
    return raw


def _model_from(cfg):
    kw = dict(cfg)
    if "param_box" in kw:
        kw["param_box"] = [tuple(pair) for pair in kw["param_box"]]
    return models.make_model(**kw)


def _optim_from(cfg):
    return OptimConfig(**cfg) if cfg else OptimConfig()


def _seed_from(raw):
    return tuple(raw) if isinstance(raw, list) else raw


def _write_manifest(out_path, command, raw_config, seed, t0):
    canon = json.dumps(raw_config, sort_keys=True, separators=(",", ":"))
    manifest = {
        "command": command,
        "config_digest": hashlib.sha256(canon.encode()).hexdigest(),
        "seed": seed,
        "tool_version": __version__,
        "wall_time": round(time.perf_counter() - t0, 3),
    }
    with open(f"{out_path}.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_simulate(args):
    t0 = time.perf_counter()
    raw = _load_config(args.config, _SIMULATE_SCHEMA)
    spec = _model_from(raw["model"])
    seed = args.seed if args.seed is not None else _seed_from(raw.get("seed", 0))
    traj = simulate(spec, raw["theta"], noise_mod.make_noise(raw["noise"]),
                    raw["n"], seed=seed, burn_in=raw.get("burn_in", 500))
    write_trajectory_csv(args.out, traj)
    _write_manifest(args.out, "simulate", raw, seed, t0)
    print(f"wrote {args.out} (model={traj.model_tag} noise={traj.noise_tag} "
          f"n={traj.n} seed={seed})")
    return 0


def _cmd_fit(args):
    t0 = time.perf_counter()
    raw = _load_config(args.config, _FIT_SCHEMA)
    spec = _model_from(raw["model"])
    data = read_trajectory_csv(args.data).data
    est = fit(raw["contrast"], spec, data,
              calibration=raw.get("calibration", 1.0),
              config=_optim_from(raw.get("optim")))
    names = models.param_names(spec)
    report = {
        "model": models.model_tag(spec),
        "contrast": est.kind,
        "n": int(data.size),
        "converged": est.converged,
        "n_evals": est.n_evals,
        "loglik": est.loglik,
        "theta": {k: float(v) for k, v in zip(names, est.theta)},
    }
    if raw.get("asymptotics", True):
        asym = asymptotics.attach(est, data)
        ci = asymptotics.confidence_intervals(est.theta, asym.avar, asym.n,
                                              level=raw.get("level", 0.95))
        report["se"] = {k: float(v) for k, v in zip(names, asym.se)}
        report["ci"] = {k: [float(a), float(b)]
                        for k, (a, b) in zip(names, ci)}
        report["sigma2"] = asym.sigma2
        report["g0"] = asym.g0
        report["kurtosis"] = asym.kurtosis
    for name in names:
        line = f"{name} = {report['theta'][name]:.6g}"
        if "se" in report:
            lo, hi = report["ci"][name]
            line += f"  se {report['se'][name]:.3g}  ci [{lo:.6g}, {hi:.6g}]"
        print(line)
    print(f"loglik {est.loglik:.6g}  converged {est.converged}  "
          f"evals {est.n_evals}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _write_manifest(args.out, "fit", raw, None, t0)
    return 0


def _cmd_experiment(args):
    t0 = time.perf_counter()
    raw = _load_config(args.config, _EXPERIMENT_SCHEMA)
    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    cfg = ExperimentConfig(
        spec=_model_from(raw["model"]),
        theta0=tuple(raw["theta0"]),
        noises=tuple(raw["noises"]),
        sizes=tuple(raw["sizes"]),
        contrasts=tuple(raw.get("contrasts", ("gaussian", "laplacian"))),
        n_reps=raw.get("reps", 100),
        seed=seed,
        burn_in=raw.get("burn_in", 500),
        optim=_optim_from(raw.get("optim")),
        workers=args.workers if args.workers is not None
        else raw.get("workers", 1),
    )
    table = run_experiment(cfg)
    table.to_csv(args.out)
    _write_manifest(args.out, "experiment", raw, seed, t0)
    print(table.render())
    print(f"wrote {args.out}")
    return 0


def _cmd_table(args):
    print(RmseTable.from_csv(args.path).render())
    return 0


def _cmd_check(args):
    raw = _load_config(args.config, _CHECK_SCHEMA)
    spec = _model_from(raw["model"])
    res = models.stationarity_check(spec, raw["theta"], r=raw.get("r", 2),
                                    noise=noise_mod.make_noise(raw["noise"]))
    print(f"member={'true' if res.member else 'false'} "
          f"margin={res.margin:.9g} tail_bound={res.tail_bound:.3g}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="affineqml",
        description="Simulate and estimate conditional location-scale "
                    "time series models.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw one trajectory to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="estimate parameters from a CSV sample")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("experiment", help="replicated RMSE comparison")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("table", help="render a saved RMSE table")
    p.add_argument("path")
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("check-stationarity",
                       help="evaluate the contraction margin at a parameter")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StationarityError, InvertibilityError, NumericError) as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return 3
    except ConstraintError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, TypeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 1


def console():
    sys.exit(main(sys.argv[1:]))
