"""Runtime configuration: defaults, config file, UNIEVAL_* environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ValidationError

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter version
    tomllib = None

ENV_PREFIX = "UNIEVAL_"


@dataclass(frozen=True)
class ServiceConfig:
    image_root: str | None = None
    port: int = 8080
    lambda1: float = 0.5
    lambda2: float = 0.25
    alpha: float = 0.1
    beta: float = 0.1
    size_tolerance: float = 0.1
    direction_tolerance: float = 0.05
    crop_padding: float = 0.15
    grid_cap: int = 2500
    iou_threshold: float = 0.5
    confidence_threshold: float = 0.5


_FIELD_TYPES = {"image_root": str, "port": int, "grid_cap": int}  # all others float


def _coerce(value: str, target_type: type):
    if target_type is int:
        return int(value)
    if target_type is float:
        return float(value)
    return value


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    """Config file values (JSON, or TOML when the interpreter ships tomllib)
    overridden by UNIEVAL_-prefixed environment variables."""
    cfg = ServiceConfig()
    if path is not None:
        path = Path(path)
        if path.suffix == ".toml":
            if tomllib is None:
                raise ValidationError("TOML config requires Python 3.11+; use JSON instead")
            doc = tomllib.loads(path.read_text())
        else:
            doc = json.loads(path.read_text())
        known = {f.name: f for f in fields(ServiceConfig)}
        unknown = set(doc) - set(known)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **doc)
    env = os.environ if env is None else env
    overrides = {}
    for f in fields(ServiceConfig):
        key = ENV_PREFIX + f.name.upper()
        if key in env:
            try:
                overrides[f.name] = _coerce(env[key], _FIELD_TYPES.get(f.name, float))
            except ValueError as exc:
                raise ValidationError(f"bad value for {key}: {env[key]!r}") from exc
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg
