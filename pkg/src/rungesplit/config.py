"""Run configuration and the flat constants file."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

ENV_VAR = "RUNGE_CONSTANTS"
SLACK_KEYS = ("S1", "S2", "C0", "S_pga", "pana_slack")
FILE_KEYS = SLACK_KEYS + ("C_runge", "precision_target")


class ConfigError(ValueError):
    pass


def parse_constants(text: str, source: str = "<string>") -> dict[str, float]:
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        if key not in FILE_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = float(value)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: {value!r} is not a number") from None
    missing = [k for k in FILE_KEYS if k not in values]
    if missing:
        raise ConfigError(f"{source}: missing keys {', '.join(missing)}")
    return values


def default_constants_text() -> str:
    return resources.files("rungesplit").joinpath("data/constants.txt").read_text()


def resolve_constants_path(explicit: str | None = None) -> str | None:
    """--constants beats $RUNGE_CONSTANTS beats the packaged file (None)."""
    if explicit:
        return explicit
    return os.environ.get(ENV_VAR) or None


@dataclass(frozen=True)
class RunConfig:
    S1: float
    S2: float
    C0: float
    S_pga: float
    pana_slack: float
    C_runge: float = 10.0
    precision_target: float = 1e-12
    kappa2: float | None = None
    output_format: str = "json"
    workers: int = 1
    constants_source: str = "builtin"

    def __post_init__(self):
        for key in SLACK_KEYS:
            if not getattr(self, key) > 0:
                raise ConfigError(f"slack constant {key} must be positive")
        if not self.precision_target > 0:
            raise ConfigError("precision_target must be positive")
        if self.output_format not in ("json", "csv", "text"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.kappa2 is not None and not self.kappa2 > 0:
            raise ConfigError("kappa2 must be positive")

    @classmethod
    def load(cls, path: str | None = None, **overrides) -> "RunConfig":
        path = resolve_constants_path(path)
        if path is None:
            values = parse_constants(default_constants_text(), "builtin constants")
            source = "builtin"
        else:
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read constants file {path}: {exc}") from None
            values = parse_constants(text, path)
            source = str(path)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(constants_source=source, **values)

    def as_dict(self) -> dict:
        return asdict(self)
