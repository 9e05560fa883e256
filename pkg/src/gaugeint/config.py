"""Experiment configuration: one TOML file, flat keys plus per-command
tables.  Every CLI flag has a config equivalent; flags win."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .errors import ConfigError
from .scalars import parse_scalar

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ENV_OUT_DIR = "GAUGEINT_OUT"

MAX_N = 10**6
MAX_TRIALS = 10**5
MAX_DEPTH = 24
MAX_SEED = 2**64 - 1


@dataclass
class ExperimentConfig:
    corpus: str = "builtin:default"
    backend: str = "rational"
    seed: int = 0
    out_dir: str = ""
    jobs: int = 1
    functions: Optional[List[str]] = None

    # integrate
    monotone_n: List[int] = field(default_factory=lambda: [10, 100, 1000])
    order_n: int = 10
    adaptive_eps: Fraction = Fraction(1, 10**6)
    max_depth: int = 20

    # verify
    checks: Optional[List[str]] = None
    check_n: int = 8
    trials: int = 40
    with_controls: bool = True
    variational_eps: Fraction = Fraction(1, 100)

    # modulus
    modulus_depth: int = 6

    # sweep
    d_list: List[int] = field(default_factory=lambda: [1, 2, 4, 8, 16, 32])
    sweep_n: int = 4
    sweep_scaled: bool = True
    sweep_trials: int = 12

    def validate(self) -> "ExperimentConfig":
        if self.backend not in ("rational", "float"):
            raise ConfigError(f"backend must be rational or float, got {self.backend!r}")
        if not (0 <= self.seed <= MAX_SEED):
            raise ConfigError(f"seed out of range: {self.seed}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        for n in [self.order_n, self.check_n, self.sweep_n, *self.monotone_n]:
            if not (1 <= n <= MAX_N):
                raise ConfigError(f"n parameter out of range [1, {MAX_N}]: {n}")
        for t in [self.trials, self.sweep_trials]:
            if not (1 <= t <= MAX_TRIALS):
                raise ConfigError(f"trials out of range [1, {MAX_TRIALS}]: {t}")
        for depth in [self.modulus_depth, self.max_depth]:
            if not (0 <= depth <= MAX_DEPTH):
                raise ConfigError(f"depth out of range [0, {MAX_DEPTH}]: {depth}")
        for d in self.d_list:
            if not (1 <= d <= 64):
                raise ConfigError(f"sweep dimension out of range [1, 64]: {d}")
        for eps in [self.adaptive_eps, self.variational_eps]:
            if eps <= 0:
                raise ConfigError("eps must be positive")
        return self

    def resolved_out_dir(self) -> str:
        return self.out_dir or os.environ.get(ENV_OUT_DIR, "results")


def _parse_eps(raw) -> Fraction:
    if isinstance(raw, str):
        val = parse_scalar(raw)
        return Fraction(val) if not isinstance(val, float) else Fraction(val).limit_denominator(10**12)
    if isinstance(raw, (int, float)):
        return Fraction(raw).limit_denominator(10**12) if isinstance(raw, float) else Fraction(raw)
    raise ConfigError(f"cannot parse tolerance {raw!r}")


def load_config(path: Optional[str]) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if path is None:
        return cfg.validate()
    try:
        with open(path, "rb") as src:
            data = tomllib.load(src)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config {path} is not valid TOML: {exc}") from exc

    def take(table: dict, key: str, cast, default):
        if key not in table:
            return default
        try:
            return cast(table[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config {path}: bad value for {key!r}: {exc}") from exc

    cfg.corpus = take(data, "corpus", str, cfg.corpus)
    cfg.backend = take(data, "backend", str, cfg.backend)
    cfg.seed = take(data, "seed", int, cfg.seed)
    cfg.out_dir = take(data, "out_dir", str, cfg.out_dir)
    cfg.jobs = take(data, "jobs", int, cfg.jobs)
    if "functions" in data:
        cfg.functions = [str(x) for x in data["functions"]]

    integrate = data.get("integrate", {})
    cfg.monotone_n = take(integrate, "monotone_n", lambda v: [int(x) for x in v], cfg.monotone_n)
    cfg.order_n = take(integrate, "order_n", int, cfg.order_n)
    cfg.adaptive_eps = take(integrate, "eps", _parse_eps, cfg.adaptive_eps)
    cfg.max_depth = take(integrate, "max_depth", int, cfg.max_depth)

    verify = data.get("verify", {})
    if "checks" in verify:
        cfg.checks = [str(x) for x in verify["checks"]]
    cfg.check_n = take(verify, "n", int, cfg.check_n)
    cfg.trials = take(verify, "trials", int, cfg.trials)
    cfg.with_controls = take(verify, "with_controls", bool, cfg.with_controls)
    cfg.variational_eps = take(verify, "eps", _parse_eps, cfg.variational_eps)

    modulus = data.get("modulus", {})
    cfg.modulus_depth = take(modulus, "depth", int, cfg.modulus_depth)

    sweep = data.get("sweep", {})
    cfg.d_list = take(sweep, "d_list", lambda v: [int(x) for x in v], cfg.d_list)
    cfg.sweep_n = take(sweep, "n", int, cfg.sweep_n)
    cfg.sweep_scaled = take(sweep, "scaled", bool, cfg.sweep_scaled)
    cfg.sweep_trials = take(sweep, "trials", int, cfg.sweep_trials)

    return cfg.validate()
