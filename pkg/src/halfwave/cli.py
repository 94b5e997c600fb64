"""Command-line experiment runner.

Usage: halfwave <experiment> [flags]

Experiments: decoupling | approximation | besov | inflation | spectrum |
normalform | strichartz | resonances.  Each run writes <experiment>.csv
and summary.json into the output directory and exits 0 when every pass
band holds, 2 on a numerical failure or a violated band, 1 on a
configuration error.

A config file is plain text, one `key = value` per line, `#` comments;
keys match the flags (experiment, grid, eps, deltas, sobolev, horizon,
seed, threads, dt, out, profile, profile_delta, profile_rate,
profile_amplitude, profile_support, profile_path).  Flags given on the
command line override file values.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (
    EXPERIMENTS,
    HorizonRule,
    NumericalFailure,
    Profile,
    default_config,
    run_and_write,
)
from .hankel import EigensolverError
from .integrate import BlowUpError

_CONFIG_KEYS = {
    "experiment", "grid", "eps", "deltas", "sobolev", "horizon", "seed",
    "threads", "dt", "out", "profile", "profile_delta", "profile_rate",
    "profile_amplitude", "profile_support", "profile_path",
}


class ConfigError(ValueError):
    pass


def _parse_float_list(text: str):
    try:
        values = tuple(float(p) for p in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}") from exc
    if not values:
        raise ConfigError(f"empty numeric list {text!r}")
    return values


def _parse_horizon(text: str) -> HorizonRule:
    """fixed:<T>, inv_eps_sq:<a> (T = a/eps^2) or log:<c>."""
    if ":" not in text:
        raise ConfigError(f"horizon must look like kind:value, got {text!r}")
    kind, _, raw = text.partition(":")
    try:
        return HorizonRule(kind.strip(), float(raw))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def read_config_file(path: str) -> dict:
    values = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfwave",
        description="half-wave / cubic Szego experiment runner",
    )
    parser.add_argument("experiment", nargs="?", choices=EXPERIMENTS,
                        help="which experiment to run")
    parser.add_argument("--config", help="plain-text key=value config file")
    parser.add_argument("--out", help="output directory (default: .)")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--threads", type=int, help="sweep workers")
    parser.add_argument("--eps", help="comma-separated decreasing eps sweep")
    parser.add_argument("--deltas", help="comma-separated delta list (inflation)")
    parser.add_argument("--grid", type=int, help="retained band max mode N")
    parser.add_argument("--sobolev", type=float, help="Sobolev index s")
    parser.add_argument("--horizon", help="fixed:<T> | inv_eps_sq:<a> | log:<c>")
    parser.add_argument("--dt", type=float, help="time step override")
    parser.add_argument("--profile",
                        choices=["single_mode_plus_constant", "random_decay", "custom"],
                        help="initial-state family")
    parser.add_argument("--profile-delta", type=float, dest="profile_delta")
    parser.add_argument("--profile-rate", type=float, dest="profile_rate")
    parser.add_argument("--profile-amplitude", type=float, dest="profile_amplitude")
    parser.add_argument("--profile-support", type=int, dest="profile_support")
    parser.add_argument("--profile-path", dest="profile_path")
    return parser


def _assemble_config(args) -> "ExperimentConfig":
    values = {}
    if args.config:
        values.update(read_config_file(args.config))

    def pick(key):
        flag = getattr(args, key, None)
        return flag if flag is not None else values.get(key)

    experiment = args.experiment or values.get("experiment")
    if not experiment:
        raise ConfigError("no experiment given (argument or config file)")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")

    overrides = {}
    if pick("grid") is not None:
        overrides["grid_n"] = int(pick("grid"))
    if pick("eps") is not None:
        raw = pick("eps")
        overrides["eps_list"] = (raw if isinstance(raw, tuple)
                                 else _parse_float_list(str(raw)))
    if pick("deltas") is not None:
        raw = pick("deltas")
        overrides["delta_list"] = (raw if isinstance(raw, tuple)
                                   else _parse_float_list(str(raw)))
    if pick("sobolev") is not None:
        overrides["sobolev"] = float(pick("sobolev"))
    if pick("horizon") is not None:
        raw = pick("horizon")
        overrides["horizon"] = raw if isinstance(raw, HorizonRule) else _parse_horizon(str(raw))
    if pick("seed") is not None:
        overrides["seed"] = int(pick("seed"))
    if pick("threads") is not None:
        overrides["threads"] = int(pick("threads"))
    if pick("dt") is not None:
        overrides["dt"] = float(pick("dt"))
    if pick("out") is not None:
        overrides["output_dir"] = str(pick("out"))

    profile_keys = ("profile", "profile_delta", "profile_rate",
                    "profile_amplitude", "profile_support", "profile_path")
    if any(pick(k) is not None for k in profile_keys):
        base = default_config(experiment).profile
        kind = str(pick("profile")) if pick("profile") is not None else base.kind
        overrides["profile"] = Profile(
            kind=kind,
            delta=float(pick("profile_delta")) if pick("profile_delta") is not None else base.delta,
            rate=float(pick("profile_rate")) if pick("profile_rate") is not None else base.rate,
            amplitude=float(pick("profile_amplitude")) if pick("profile_amplitude") is not None else base.amplitude,
            support=int(pick("profile_support")) if pick("profile_support") is not None else base.support,
            path=str(pick("profile_path")) if pick("profile_path") is not None else base.path,
        )

    try:
        return default_config(experiment, **overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _assemble_config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        result = run_and_write(cfg)
    except (ValueError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, BlowUpError, EigensolverError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2

    slope = ("" if result.fitted_slope is None
             else f"  slope={result.fitted_slope:.4f}")
    print(f"{cfg.experiment}: rows={len(result.rows)}{slope}  "
          f"passed={result.passed}")
    if not result.passed:
        print(f"{cfg.experiment}: pass band violated", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
