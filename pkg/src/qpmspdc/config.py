"""Run configuration: ``key = value`` files overlaid by command-line flags."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigError

DIRECTIONS = ("co", "counter")
BETA_MODES = ("bulk", "guided")
BRACKETS = ("squared", "linear")
SOLVES = ("pairs", "period", "angles")


def parse_range(text: str) -> tuple[float, float, float]:
    """'start:stop:step' -> floats."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if not all(math.isfinite(v) for v in (start, stop, step)) or step <= 0 or stop < start:
        raise ValueError(f"range {text!r} needs finite start <= stop and step > 0")
    return start, stop, step


def parse_ints(text: str) -> tuple[int, ...]:
    values = tuple(int(tok) for tok in text.split(",") if tok.strip())
    if not values:
        raise ValueError("expected a comma-separated list of integers")
    return values


def parse_floats(text: str) -> tuple[float, ...]:
    """Comma list of reals, or a start:stop:step range (stop included when on-grid)."""
    if ":" in text:
        start, stop, step = parse_range(text)
        n = int(math.floor((stop - start) / step + 1e-9))
        return tuple(start + k * step for k in range(n + 1))
    values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    if not values:
        raise ValueError("expected a comma-separated list of reals")
    return values


@dataclass(frozen=True)
class RunConfig:
    sellmeier_path: Optional[str] = None
    pump_wavelength_nm: float = 532.0
    theta_deg: float = 0.0
    poling_period_um: float = 6.8
    orders: tuple[int, ...] = (-1, 1)
    length_mm: float = 1.0
    grin_alpha_per_m: float = 4e5
    beta_mode: str = "bulk"
    directions: str = "counter"
    bracket: str = "squared"
    output_path: str = "-"
    signal_nm: Optional[float] = None
    idler_nm: Optional[float] = None
    wavelengths_nm: Optional[tuple[float, ...]] = None
    window_nm: Optional[tuple[float, float, float]] = None
    theta_range_deg: tuple[float, float, float] = (65.0, 90.0, 0.1)
    period_range_um: tuple[float, float, float] = (4.0, 10.0, 0.1)
    signals_nm: Optional[tuple[float, ...]] = None
    reference_nm: float = 880.0
    solve: str = "pairs"
    theta_step_deg: float = 0.01
    lambda_step_nm: float = 0.1

    def validate(self) -> "RunConfig":
        positive = ("pump_wavelength_nm", "poling_period_um", "length_mm", "reference_nm", "theta_step_deg", "lambda_step_nm")
        for key in positive:
            value = getattr(self, key)
            if not math.isfinite(value) or value <= 0:
                raise ConfigError(f"{key} must be a positive number, got {value}")
        if not math.isfinite(self.grin_alpha_per_m) or self.grin_alpha_per_m < 0:
            raise ConfigError(f"grin_alpha_per_m must be >= 0, got {self.grin_alpha_per_m}")
        if not 0.0 <= self.theta_deg <= 90.0:
            raise ConfigError(f"theta_deg must lie in [0, 90], got {self.theta_deg}")
        lo, hi, _ = self.theta_range_deg
        if lo < 0 or hi > 90:
            raise ConfigError(f"theta_range_deg must lie within [0, 90], got {self.theta_range_deg}")
        if self.period_range_um[0] <= 0:
            raise ConfigError(f"period_range_um must be positive, got {self.period_range_um}")
        for key in ("signal_nm", "idler_nm"):
            value = getattr(self, key)
            if value is not None and (not math.isfinite(value) or value <= 0):
                raise ConfigError(f"{key} must be a positive number, got {value}")
        for key, allowed in (("directions", DIRECTIONS), ("beta_mode", BETA_MODES), ("bracket", BRACKETS), ("solve", SOLVES)):
            if getattr(self, key) not in allowed:
                raise ConfigError(f"{key} must be one of {', '.join(allowed)}; got {getattr(self, key)!r}")
        if not self.orders:
            raise ConfigError("orders must be non-empty")
        if self.window_nm is not None and self.window_nm[0] <= 0:
            raise ConfigError(f"window_nm must be positive, got {self.window_nm}")
        return self

    def provenance(self) -> dict:
        """Effective configuration for output headers (output location excluded)."""
        out = {}
        for key, value in asdict(self).items():
            if key == "output_path":
                continue
            if isinstance(value, tuple):
                sep = ":" if key.endswith(("range_deg", "range_um")) or key == "window_nm" else ","
                value = sep.join(f"{v:g}" if isinstance(v, float) else str(v) for v in value)
            out[key] = "default" if value is None else value
        return out


def _optional_float(text):
    return None if text.lower() in ("", "none", "na") else float(text)


PARSERS = {
    "sellmeier_path": lambda s: s or None,
    "pump_wavelength_nm": float,
    "theta_deg": float,
    "poling_period_um": float,
    "orders": parse_ints,
    "length_mm": float,
    "grin_alpha_per_m": float,
    "beta_mode": str,
    "directions": str,
    "bracket": str,
    "output_path": str,
    "signal_nm": _optional_float,
    "idler_nm": _optional_float,
    "wavelengths_nm": parse_floats,
    "window_nm": parse_range,
    "theta_range_deg": parse_range,
    "period_range_um": parse_range,
    "signals_nm": parse_floats,
    "reference_nm": float,
    "solve": str,
    "theta_step_deg": float,
    "lambda_step_nm": float,
}
assert set(PARSERS) == {f.name for f in fields(RunConfig)}


def parse_config_text(text: str, origin: str = "<string>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}, line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in PARSERS:
            raise ConfigError(f"{origin}, line {lineno}: unknown key {key!r}")
        try:
            values[key] = PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{origin}, line {lineno}: key {key!r}: {exc}") from None
    return values


def load_config(path=None, overrides: Optional[dict] = None) -> RunConfig:
    """Defaults, then the file at ``path`` (if any), then ``overrides``; validated."""
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        values.update(parse_config_text(text, origin=str(path)))
    values.update(overrides or {})
    return replace(RunConfig(), **values).validate()
