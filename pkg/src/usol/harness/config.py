"""Experiment configuration: plain `key = value` files plus CLI overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Tuple

__all__ = ["ExperimentConfig", "load_config", "ConfigError", "parse_pair",
           "parse_lambda_seq", "parse_z_sweep"]


class ConfigError(ValueError):
    """Invalid configuration; the CLI maps this to exit code 2."""


def parse_pair(text: str) -> Tuple[Fraction, Fraction]:
    """'5/6,1/6' or '0.75,0.25' -> exact rationals."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"pair must be 'ip,iq', got {text!r}")
    try:
        return Fraction(parts[0].strip()), Fraction(parts[1].strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse pair {text!r}: {exc}") from None


def parse_lambda_seq(text: str) -> Tuple[float, ...]:
    """'a:b:count' -> geometric sequence from a to b inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"lambda sequence must be 'a:b:count', got {text!r}")
    try:
        a, b, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"cannot parse lambda sequence {text!r}: {exc}") from None
    if count < 2 or not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        raise ConfigError("lambda sequence needs count >= 2 and values in (0, 1)")
    import numpy as np

    return tuple(float(v) for v in np.geomspace(a, b, count))


def parse_z_sweep(text: str) -> Tuple[complex, ...]:
    """'circle:N' (unit circle, poles excluded) or 'line:re:b0:b1:N'."""
    parts = text.split(":")
    import numpy as np

    if parts[0] == "circle":
        if len(parts) != 2:
            raise ConfigError("circle sweep is 'circle:N'")
        n = int(parts[1])
        return tuple(complex(np.exp(1j * np.pi * (2 * j + 1) / n)) for j in range(n))
    if parts[0] == "line":
        if len(parts) != 5:
            raise ConfigError("line sweep is 'line:re:b0:b1:N'")
        re, b0, b1, n = float(parts[1]), float(parts[2]), float(parts[3]), int(parts[4])
        return tuple(complex(re, b) for b in np.linspace(b0, b1, n))
    raise ConfigError(f"unknown z sweep {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    dim: int = 3
    signature_k: int = 1
    grid_n: int = 32
    box_L: float = 12.0
    lambda_seq: Tuple[float, ...] = tuple(2.0 ** -e for e in range(3, 8))
    z_sweep: Tuple[complex, ...] = parse_z_sweep("circle:16")
    pair: Tuple[Fraction, Fraction] = (Fraction(5, 6), Fraction(1, 6))
    seed: int = 0
    profile: str = "quick"
    out_path: Optional[str] = None
    svg_path: Optional[str] = None
    ratio_threshold: float = 5.0
    lorentz_ratio_threshold: float = 8.0
    workers: int = field(default_factory=lambda: _workers_from_env())

    def validate(self) -> "ExperimentConfig":
        if self.dim < 3:
            raise ConfigError("dim must be >= 3")
        if not 1 <= self.signature_k <= self.dim - 1:
            raise ConfigError("signature_k must satisfy 1 <= k <= d-1")
        n = self.grid_n
        if n < 2 or n & (n - 1):
            raise ConfigError("grid_n must be a power of two")
        if self.box_L <= 0:
            raise ConfigError("box_L must be positive")
        for lam in self.lambda_seq:
            if not 0.0 < lam < 1.0:
                raise ConfigError("lambda values must lie in (0, 1)")
        if self.profile not in ("quick", "full"):
            raise ConfigError("profile must be quick or full")
        ip, iq = self.pair
        if not (0 <= iq <= ip <= 1):
            raise ConfigError("pair must satisfy 0 <= 1/q <= 1/p <= 1")
        return self


def _workers_from_env() -> int:
    try:
        return max(1, int(os.environ.get("USOL_WORKERS", "0"))) \
            if os.environ.get("USOL_WORKERS") else max(1, os.cpu_count() or 1)
    except ValueError:
        return 1


_FIELD_PARSERS = {
    "dim": int,
    "signature_k": int,
    "grid_n": int,
    "box_L": float,
    "lambda_seq": parse_lambda_seq,
    "z_sweep": parse_z_sweep,
    "pair": parse_pair,
    "seed": int,
    "profile": str,
    "out_path": str,
    "svg_path": str,
    "ratio_threshold": float,
    "lorentz_ratio_threshold": float,
    "workers": int,
}


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Base defaults, then the config file, then CLI overrides."""
    cfg = ExperimentConfig()
    updates = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                key, value = (s.strip() for s in line.split("=", 1))
                if key not in _FIELD_PARSERS:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                try:
                    updates[key] = _FIELD_PARSERS[key](value)
                except ConfigError:
                    raise
                except Exception as exc:
                    raise ConfigError(f"{path}:{lineno}: {exc}") from None
    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in _FIELD_PARSERS:
                raise ConfigError(f"unknown config key {key!r}")
            updates[key] = value
    cfg = replace(cfg, **updates)
    return cfg.validate()
