"""Experiment configuration: flat ``key = value`` files with dotted sections.

Example::

    # synthetic benchmark
    horizon = 10000
    k = 3
    psi_max = 3
    runs = 10
    seed = 2024
    policy.name = ts
    strategy.name = pbsb-re
    env.kind = synthetic
    env.arms = 20
    env.mu_seed = 7

Lists are comma-separated. Blank lines and ``#`` comments are ignored.
Relative paths are resolved against the configuration file's directory.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..environments import (
    Environment,
    SyntheticBernoulliEnv,
    load_classification_table,
    load_ratings_table,
)
from ..feedback import BANDIT_REWARD_MODES, Strategy
from ..policies import canonical_policy_name


class ConfigError(ValueError):
    pass


def _as_bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _as_list(text):
    if isinstance(text, (list, tuple)):
        return [str(v).strip() for v in text]
    return [part.strip() for part in str(text).split(",") if part.strip()]


def _as_float_list(text):
    return [float(v) for v in _as_list(text)]


def _optional_int(text):
    if text is None or str(text).strip().lower() in ("", "none"):
        return None
    return int(text)


# key -> (attribute, converter)
_TOP_LEVEL = {
    "horizon": ("horizon", int),
    "k": ("k", int),
    "psi_max": ("psi_max", _optional_int),
    "psi_fixed": ("psi_fixed", _optional_int),
    "delta": ("delta", float),
    "runs": ("runs", int),
    "seed": ("base_seed", int),
    "workers": ("workers", int),
    "alpha": ("alpha", float),
    "common_random_numbers": ("common_random_numbers", _as_bool),
    "policy.name": ("policy", str),
    "strategy.name": ("strategy", str),
    "strategy.bandit_reward": ("bandit_reward", str),
    "grid.policies": ("grid_policies", _as_list),
    "grid.strategies": ("grid_strategies", _as_list),
    "output.dir": ("out_dir", str),
    "output.round_log": ("round_log", _as_bool),
}

_POLICY_KEYS = {
    "epsilon": float,
    "alpha": float,
    "alpha_lin": float,
    "v": float,
    "ridge": float,
}

_ENV_KEYS = {
    "kind": str,
    "mu": _as_float_list,
    "arms": int,
    "mu_seed": int,
    "mu_low": float,
    "mu_high": float,
    "d": int,
    "path": str,
    "delimiter": str,
    "context_columns": _as_list,
    "label_column": str,
    "user_column": str,
    "item_column": str,
    "rating_column": str,
    "threshold": float,
    "user_context_path": str,
    "user_context_columns": _as_list,
    "user_context_key": str,
}

_PATH_KEYS = ("path", "user_context_path")


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse flat ``key = value`` lines into a dict of raw strings."""
    out = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{line_no}: expected 'key = value', got {line!r}")
        key, value = stripped.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"{source}:{line_no}: empty key")
        if key in out:
            raise ConfigError(f"{source}:{line_no}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


@dataclass
class ExperimentConfig:
    horizon: int = 10_000
    k: int = 3
    psi_max: int | None = None  # defaults to k
    psi_fixed: int | None = None  # forces psi_t; diagnostic use
    delta: float = 0.01
    runs: int = 10
    base_seed: int = 0
    workers: int = 1
    alpha: float = 0.05
    common_random_numbers: bool = True
    policy: str = "ts"
    policy_params: dict = field(default_factory=dict)
    strategy: str = "semi-bandit"
    bandit_reward: str = "normalized"
    env: dict = field(default_factory=lambda: {"kind": "synthetic", "arms": 20, "mu_seed": 0})
    grid_policies: list = field(default_factory=list)
    grid_strategies: list = field(default_factory=list)
    out_dir: str | None = None
    round_log: bool = False

    # -- construction ---------------------------------------------------
    @classmethod
    def from_mapping(cls, flat: dict, base_dir=None) -> "ExperimentConfig":
        cfg = cls()
        return cfg.with_overrides(flat, base_dir=base_dir)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_mapping(parse_config_text(text, str(path)), base_dir=path.parent)

    def with_overrides(self, flat: dict, base_dir=None) -> "ExperimentConfig":
        """Copy with dotted-key overrides applied (values may be strings)."""
        cfg = dataclasses.replace(
            self,
            policy_params=dict(self.policy_params),
            env=dict(self.env),
            grid_policies=list(self.grid_policies),
            grid_strategies=list(self.grid_strategies),
        )
        env_touched = False
        for key, value in flat.items():
            if value is None:
                continue
            try:
                if key in _TOP_LEVEL:
                    attr, conv = _TOP_LEVEL[key]
                    setattr(cfg, attr, conv(value))
                elif key.startswith("policy.") and key[7:] in _POLICY_KEYS:
                    cfg.policy_params[key[7:]] = _POLICY_KEYS[key[7:]](value)
                elif key.startswith("env.") and key[4:] in _ENV_KEYS:
                    name = key[4:]
                    if not env_touched:
                        cfg.env = {}
                        env_touched = True
                    converted = _ENV_KEYS[name](value)
                    if name in _PATH_KEYS and base_dir is not None and not Path(converted).is_absolute():
                        converted = str(Path(base_dir) / converted)
                    cfg.env[name] = converted
                else:
                    raise ConfigError(f"unknown configuration key {key!r}")
            except ConfigError:
                raise
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key!r}: {exc}") from None
        if cfg.out_dir is not None and base_dir is not None and not Path(cfg.out_dir).is_absolute():
            cfg.out_dir = str(Path(base_dir) / cfg.out_dir)
        return cfg

    # -- derived --------------------------------------------------------
    @property
    def effective_psi_max(self) -> int:
        return self.k if self.psi_max is None else self.psi_max

    def cells(self, grid: bool = False) -> list[tuple[str, str]]:
        """(policy, strategy) pairs to run, in report order."""
        if grid:
            policies = self.grid_policies or [self.policy]
            strategies = self.grid_strategies or [self.strategy]
        else:
            policies, strategies = [self.policy], [self.strategy]
        return [
            (canonical_policy_name(p), Strategy.parse(s).value)
            for p in policies
            for s in strategies
        ]

    def validate(self, n_arms: int | None = None, grid: bool = False):
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not 0.0 <= self.delta <= 1.0:
            raise ConfigError(f"delta must lie in [0, 1], got {self.delta}")
        psi_max = self.effective_psi_max
        if not 0 <= psi_max <= self.k:
            raise ConfigError(f"psi_max must lie in [0, k={self.k}], got {psi_max}")
        if self.psi_fixed is not None and self.psi_fixed < 0:
            raise ConfigError(f"psi_fixed must be >= 0, got {self.psi_fixed}")
        if self.bandit_reward not in BANDIT_REWARD_MODES:
            raise ConfigError(f"strategy.bandit_reward must be one of {BANDIT_REWARD_MODES}")
        try:
            cells = self.cells(grid)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.bandit_reward == "raw" and any(p == "ts" for p, _ in cells):
            raise ConfigError("raw cumulative rewards cannot drive the Beta posterior of 'ts'")
        if n_arms is not None and self.k > n_arms:
            raise ConfigError(f"k={self.k} exceeds the environment's {n_arms} arms")
        return cells

    def as_flat(self) -> dict:
        """Dotted-key view, used to echo the configuration in reports."""
        out = {}
        for key, (attr, _) in _TOP_LEVEL.items():
            value = getattr(self, attr)
            # execution details that must not change the report bytes
            if key in ("output.dir", "workers"):
                continue
            out[key] = list(value) if isinstance(value, list) else value
        out["psi_max"] = self.effective_psi_max
        for name, value in sorted(self.policy_params.items()):
            out[f"policy.{name}"] = value
        for name, value in sorted(self.env.items()):
            out[f"env.{name}"] = value
        return out


def build_environment(options: dict) -> Environment:
    """Instantiate the environment described by the ``env.*`` keys."""
    kind = options.get("kind", "synthetic")
    delimiter = options.get("delimiter", ",")
    if kind == "synthetic":
        if "mu" in options:
            mu = np.asarray(options["mu"], dtype=float)
        else:
            if "arms" not in options:
                raise ConfigError("synthetic environment needs env.mu or env.arms")
            rng = np.random.default_rng(options.get("mu_seed", 0))
            mu = rng.uniform(options.get("mu_low", 0.1), options.get("mu_high", 0.9), size=options["arms"])
        return SyntheticBernoulliEnv(mu, d=options.get("d", 0))
    if kind == "classification":
        for key in ("path", "label_column"):
            if key not in options:
                raise ConfigError(f"classification environment needs env.{key}")
        return load_classification_table(
            options["path"], options.get("context_columns", []), options["label_column"], delimiter=delimiter
        )
    if kind == "ratings":
        for key in ("path", "user_column", "item_column", "rating_column"):
            if key not in options:
                raise ConfigError(f"ratings environment needs env.{key}")
        return load_ratings_table(
            options["path"],
            options["user_column"],
            options["item_column"],
            options["rating_column"],
            threshold=options.get("threshold", 4.0),
            delimiter=delimiter,
            user_context_path=options.get("user_context_path"),
            user_context_columns=options.get("user_context_columns", []),
            user_context_key=options.get("user_context_key"),
        )
    raise ConfigError(f"unknown env.kind {kind!r}; expected synthetic, classification or ratings")
