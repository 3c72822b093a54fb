"""Run configuration: flat ``key = value`` files overridden by command-line flags."""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

DEFAULT_ELL_GRID = (0.1, 0.07, 0.05, 0.035, 0.025)
ROUTES = ("direct", "birman_schwinger", "both")
COMMANDS = ("dispersion", "threshold", "symbol", "assemble", "solve", "fit", "constants", "reproduce")
_CLASS_RE = re.compile(r"^(s|as|all|m=[+-]?\d+)$")


@dataclass(frozen=True)
class RunConfig:
    command: str = "reproduce"
    dimension: int = 2
    class_: str = "all"
    ell: tuple = DEFAULT_ELL_GRID
    N: int = 32
    tol: float = 1e-12
    out: str = "out"
    route: str = "direct"
    workers: int = 1
    seed: int = 0
    dry_run: bool = False
    cache: bool = True
    branches: int = 3
    xi: tuple = (0.0, 3.0, 0.01)
    omega: float | None = None
    gap: float = 1e-3
    channels: tuple = field(default=(-2, -1, 0, 1, 2))

    def classes(self) -> tuple:
        """Class labels selected for the sweep.

        ``all`` means both parities in 2D and the channels ``m = 0, 1`` in 3D
        (``rho_{-m} = rho_m``, and channels with ``|m| >= 2`` have gaps below
        the resolvable window on the default grid).
        """
        if self.class_ != "all":
            return (self.class_,)
        return ("s", "as") if self.dimension == 2 else ("m=0", "m=1")

    def xi_grid(self):
        a, b, step = self.xi
        n = int(round((b - a) / step))
        return [a + i * step for i in range(n + 1)]

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["class"] = d.pop("class_")
        d["ell"] = list(self.ell)
        d["xi"] = list(self.xi)
        d["channels"] = list(self.channels)
        return d

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.dimension not in (2, 3):
            raise ConfigError("dimension must be 2 or 3")
        if not _CLASS_RE.match(self.class_):
            raise ConfigError(f"class must be s, as, m=<int> or all, got {self.class_!r}")
        if self.dimension == 2 and self.class_.startswith("m="):
            raise ConfigError("channel classes m=<int> need --dimension 3")
        if self.dimension == 3 and self.class_ in ("s", "as"):
            raise ConfigError("parity classes s/as need --dimension 2")
        if self.class_.startswith("m=") and abs(int(self.class_[2:])) > 20:
            raise ConfigError("channel outside |m| <= 20")
        if self.N < 8:
            raise ConfigError("N must be at least 8")
        if not self.ell or any(v <= 0 for v in self.ell):
            raise ConfigError("ell grid values must be positive")
        if any(a <= b for a, b in zip(self.ell, self.ell[1:])):
            raise ConfigError("ell grid must be sorted strictly descending")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.route not in ROUTES:
            raise ConfigError(f"route must be one of {ROUTES}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.branches < 1:
            raise ConfigError("branches must be at least 1")
        a, b, step = self.xi
        if not (step > 0 and b >= a and a >= 0):
            raise ConfigError("xi range must be a:b:step with 0 <= a <= b and step > 0")
        if not self.gap > 0:
            raise ConfigError("gap must be positive")
        if any(abs(m) > 20 for m in self.channels):
            raise ConfigError("channel outside |m| <= 20")
        return self


def parse_float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.replace(" ", "").split(",") if v)
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def parse_int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(",") if v)
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def parse_range(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must be a:b:step, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad range {text!r}") from exc


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"bad boolean {text!r}")


_CONVERTERS = {
    "command": str,
    "dimension": int,
    "class": str,
    "ell": parse_float_list,
    "N": int,
    "tol": float,
    "out": str,
    "route": str,
    "workers": int,
    "seed": int,
    "dry_run": _parse_bool,
    "cache": _parse_bool,
    "branches": int,
    "xi": parse_range,
    "omega": float,
    "gap": float,
    "channels": parse_int_list,
}


def convert(key: str, text: str):
    if key not in _CONVERTERS:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        return _CONVERTERS[key](text)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc


def parse_config_text(text: str) -> dict:
    """``key = value`` per line; ``#`` starts a comment; dashes in keys read as underscores."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        values[key] = convert(key, val)
    return values


def load_config_file(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge defaults, file values and flag overrides (later wins) and validate."""
    merged = {}
    for src in (file_values or {}, overrides or {}):
        merged.update({k: v for k, v in src.items() if v is not None})
    if "class" in merged:
        merged["class_"] = merged.pop("class")
    try:
        cfg = RunConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()
