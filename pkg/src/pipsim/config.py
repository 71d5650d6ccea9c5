"""JSON run configuration.

Schema (unknown keys are rejected)::

    {
      "n_levels": 10, "lambda": 0.025, "delta_e": 1.0, "delta_eps": 0.5,
      "seed": 2009,                        # default 0
      "times": [0.0, 0.1, ...],            # default: 201 points on [0, 20]
      "realizations": 1,                   # coupling draws, default 1
      "pip": {                             # optional
        "convention": "paper",             # paper | pure_bipartite | both
        "base": 2,                         # 2 | "e"
        "enumeration_cap": 100000,
        "batch_size": 200,
        "stderr_tol": 0.001,
        "max_samples": 100000,
        "times": [5, 7, 10]                # default: top-level times
      },
      "output": {"prefix": "out/run", "format": "csv"}   # csv | json
    }
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from pipsim.model import SystemParams

TOP_KEYS = {"n_levels", "lambda", "delta_e", "delta_eps", "seed", "times", "realizations", "pip", "output"}
REQUIRED = ("n_levels", "lambda", "delta_e", "delta_eps")
PIP_KEYS = {"convention", "base", "enumeration_cap", "batch_size", "stderr_tol", "max_samples", "times"}
OUTPUT_KEYS = {"prefix", "format"}


class ConfigError(ValueError):
    pass


def default_times() -> list[float]:
    return [float(t) for t in np.linspace(0.0, 20.0, 201)]


@dataclass(frozen=True)
class PipSettings:
    convention: str = "paper"
    base: object = 2
    enumeration_cap: int = 100_000
    batch_size: int = 200
    stderr_tol: float = 1e-3
    max_samples: int = 100_000
    times: tuple[float, ...] | None = None

    @property
    def conventions(self) -> tuple[str, ...]:
        if self.convention == "both":
            return ("paper", "pure_bipartite")
        return (self.convention,)


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    times: tuple[float, ...]
    realizations: int = 1
    pip: PipSettings | None = None
    output_prefix: str = "pipsim"
    output_format: str = "csv"
    source: str | None = field(default=None, compare=False)

    @property
    def pip_times(self) -> tuple[float, ...]:
        if self.pip is not None and self.pip.times is not None:
            return self.pip.times
        return self.times

    def canonical(self) -> dict:
        """Everything that affects numerical output (not paths or formats)."""
        p = self.params
        d = {
            "n_levels": p.n_levels,
            "lambda": p.lam,
            "delta_e": p.delta_e,
            "delta_eps": p.delta_eps,
            "seed": p.seed,
            "times": list(self.times),
            "realizations": self.realizations,
        }
        if self.pip is not None:
            d["pip"] = {
                "convention": self.pip.convention,
                "base": self.pip.base,
                "enumeration_cap": self.pip.enumeration_cap,
                "batch_size": self.pip.batch_size,
                "stderr_tol": self.pip.stderr_tol,
                "max_samples": self.pip.max_samples,
                "times": list(self.pip_times),
            }
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_overrides(self, seed=None, convention=None, base=None) -> "RunConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, params=replace(cfg.params, seed=int(seed)))
        if convention is not None or base is not None:
            pip = cfg.pip or PipSettings()
            if convention is not None:
                pip = replace(pip, convention=_convention(convention))
            if base is not None:
                pip = replace(pip, base=_base(base))
            cfg = replace(cfg, pip=pip)
        return cfg


def _convention(value) -> str:
    value = str(value).replace("-", "_")
    if value not in ("paper", "pure_bipartite", "both"):
        raise ConfigError(f"convention must be paper, pure_bipartite or both, got {value!r}")
    return value


def _base(value):
    if value in (2, "2"):
        return 2
    if value in ("e", "natural"):
        return "e"
    raise ConfigError(f"base must be 2 or 'e', got {value!r}")


def _times(value, where: str) -> tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where} must be a non-empty list of numbers")
    try:
        times = tuple(float(t) for t in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where} must contain only numbers") from None
    if times[0] < 0:
        raise ConfigError(f"{where} must be non-negative")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigError(f"{where} must be strictly ascending")
    return times


def _int(value, where: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{where} must be an integer >= {minimum}, got {value!r}")
    return value


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def _unknown(keys, allowed, where: str) -> None:
    extra = sorted(set(keys) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(extra)}")


def parse_config(raw: dict, source: str | None = None) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _unknown(raw, TOP_KEYS, "config")
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    try:
        params = SystemParams(
            n_levels=_int(raw["n_levels"], "n_levels", 2),
            delta_e=_number(raw["delta_e"], "delta_e"),
            delta_eps=_number(raw["delta_eps"], "delta_eps"),
            lam=_number(raw["lambda"], "lambda"),
            seed=_int(raw.get("seed", 0), "seed", 0),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    times = _times(raw["times"], "times") if "times" in raw else tuple(default_times())
    realizations = _int(raw.get("realizations", 1), "realizations", 1)

    pip = None
    if "pip" in raw:
        block = raw["pip"]
        if not isinstance(block, dict):
            raise ConfigError("pip must be an object")
        _unknown(block, PIP_KEYS, "pip")
        defaults = PipSettings()
        stderr_tol = _number(block.get("stderr_tol", defaults.stderr_tol), "pip.stderr_tol")
        if stderr_tol <= 0:
            raise ConfigError("pip.stderr_tol must be > 0")
        pip = PipSettings(
            convention=_convention(block.get("convention", defaults.convention)),
            base=_base(block.get("base", defaults.base)),
            enumeration_cap=_int(block.get("enumeration_cap", defaults.enumeration_cap), "pip.enumeration_cap", 1),
            batch_size=_int(block.get("batch_size", defaults.batch_size), "pip.batch_size", 1),
            stderr_tol=stderr_tol,
            max_samples=_int(block.get("max_samples", defaults.max_samples), "pip.max_samples", 1),
            times=_times(block["times"], "pip.times") if "times" in block else None,
        )

    prefix, fmt = "pipsim", "csv"
    if "output" in raw:
        block = raw["output"]
        if not isinstance(block, dict):
            raise ConfigError("output must be an object")
        _unknown(block, OUTPUT_KEYS, "output")
        prefix = str(block.get("prefix", prefix))
        fmt = block.get("format", fmt)
        if fmt not in ("csv", "json"):
            raise ConfigError(f"output.format must be csv or json, got {fmt!r}")

    return RunConfig(params, times, realizations, pip, prefix, fmt, source)


def _key_line(text: str, message: str) -> int | None:
    # Best-effort: point at the first line mentioning a key named in the message.
    for key in re.findall(r"[a-z_]+(?:\.[a-z_]+)?", message):
        needle = f'"{key.split(".")[-1]}"'
        for lineno, line in enumerate(text.splitlines(), 1):
            if needle in line:
                return lineno
    return None


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return parse_config(raw, str(path))
    except ConfigError as exc:
        line = _key_line(text, str(exc))
        loc = f"{path}:{line}" if line else str(path)
        raise ConfigError(f"{loc}: {exc}") from None
