"""Suite configuration: defaults, a key=value file, then command-line overrides.

Only the seed may come from the environment (SYMDOUBLE_SEED).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

SEED_ENV = "SYMDOUBLE_SEED"
FORMATS = ("json", "text")
KEYS = ("suite", "dims", "trials", "seed", "format", "golden", "fault", "timing")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    suite: str = ""
    dims: tuple | None = None       # suite-specific bounds; None means the suite default
    trials: int | None = None
    seed: int = 0
    format: str = "json"
    golden: str | None = None
    fault: bool = False
    timing: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, not {self.format!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.trials is not None and self.trials < 1:
            raise ConfigError("trials must be positive")
        if self.dims is not None and (not self.dims or any(d < 0 for d in self.dims)):
            raise ConfigError("dims must be a nonempty list of nonnegative integers")

    def echo(self) -> dict:
        """The fields that determine the report (no output options)."""
        return {"suite": self.suite, "dims": list(self.dims) if self.dims else None,
                "trials": self.trials, "seed": self.seed, "fault": self.fault,
                "golden": self.golden is not None}


def parse_dims(text) -> tuple:
    if isinstance(text, (tuple, list)):
        return tuple(int(v) for v in text)
    try:
        return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)
    except ValueError:
        raise ConfigError(f"dims must be comma-separated integers, got {text!r}") from None


def parse_int(text, what) -> int:
    try:
        return int(str(text), 0)
    except ValueError:
        raise ConfigError(f"{what} must be an integer, got {text!r}") from None


def parse_bool(text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _convert(key, value):
    if key == "dims":
        return parse_dims(value)
    if key in ("trials", "seed"):
        return parse_int(value, key)
    if key in ("fault", "timing"):
        return parse_bool(value)
    return value


def read_config_file(path) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, value)
    return out


def build_config(suite: str, file=None, env=None, **overrides) -> SuiteConfig:
    """defaults < config file < environment seed < explicit overrides (None = unset)."""
    env = os.environ if env is None else env
    values = {}
    if file is not None:
        values.update(read_config_file(file))
    if env.get(SEED_ENV):
        values["seed"] = parse_int(env[SEED_ENV], SEED_ENV)
    for k, v in overrides.items():
        if k not in KEYS:
            raise ConfigError(f"unknown option {k!r}")
        if v is not None:
            values[k] = _convert(k, v)
    values["suite"] = suite
    return replace(SuiteConfig(), **values)
