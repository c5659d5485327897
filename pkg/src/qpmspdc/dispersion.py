"""Extraordinary refractive index from data-driven Sellmeier coefficient sets.

A model is a named coefficient list plus a ``form_id`` that selects the
functional form, so alternative coefficient sets can be swapped in by
editing a data file.  Wavelengths are vacuum wavelengths in nm; every form
works internally in micrometres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ArityError, InputError, SellmeierParseError, WavelengthRangeError
from .units import NM, _scalar


def _handbook4(lam_um, a, b, c_, d):
    l2 = lam_um**2
    return a + b / (l2 - c_) - d * l2


def _sellmeier3(lam_um, b1, c1, b2, c2, b3, c3):
    l2 = lam_um**2
    return 1 + b1 * l2 / (l2 - c1) + b2 * l2 / (l2 - c2) + b3 * l2 / (l2 - c3)


# form_id -> (n^2 as a function of wavelength in um, coefficient arity)
FORMS = {
    "handbook4": (_handbook4, 4),
    "sellmeier3": (_sellmeier3, 6),
}

ALLOWED_RANGE_NM = (300.0, 5000.0)


@dataclass(frozen=True)
class SellmeierModel:
    """Named Sellmeier coefficient set with its validity window (nm)."""

    name: str
    coefficients: tuple[float, ...]
    form_id: str
    valid_range: tuple[float, float]
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(x) for x in self.coefficients))
        object.__setattr__(self, "valid_range", tuple(float(x) for x in self.valid_range))
        if self.form_id not in FORMS:
            raise SellmeierParseError(
                f"unknown form_id {self.form_id!r}; known forms: {sorted(FORMS)}"
            )
        arity = FORMS[self.form_id][1]
        if len(self.coefficients) != arity:
            raise ArityError(
                f"form {self.form_id!r} takes {arity} coefficients, got {len(self.coefficients)}"
            )
        lo, hi = self.valid_range
        if not (ALLOWED_RANGE_NM[0] <= lo < hi <= ALLOWED_RANGE_NM[1]):
            raise SellmeierParseError(
                f"valid_range {self.valid_range} must satisfy "
                f"{ALLOWED_RANGE_NM[0]:g} <= min < max <= {ALLOWED_RANGE_NM[1]:g} nm"
            )
        # reject coefficient sets that are unphysical somewhere in their own window
        n = self(np.linspace(lo, hi, 401))
        if not np.all(np.isfinite(n)) or n.min() <= 1.0 or n.max() >= 4.0:
            raise SellmeierParseError(
                f"model {self.name!r} yields an index outside (1, 4) inside its valid range"
            )

    def __call__(self, wavelength_nm):
        return refractive_index(self, wavelength_nm)

    def contains(self, wavelength_nm):
        """Boolean mask of wavelengths inside the validity window."""
        lam = np.asarray(wavelength_nm, dtype=float)
        return (lam >= self.valid_range[0]) & (lam <= self.valid_range[1])


def refractive_index(model: SellmeierModel, wavelength_nm):
    """Return n_e at ``wavelength_nm`` (scalar or array).

    Raises WavelengthRangeError naming the violated bound when any wavelength
    lies outside ``model.valid_range``.
    """
    lam = np.asarray(wavelength_nm, dtype=float)
    if not np.all(np.isfinite(lam)):
        raise InputError(f"non-finite wavelength: {wavelength_nm!r}")
    lo, hi = model.valid_range
    if lam.size:
        if lam.min() < lo:
            raise WavelengthRangeError(
                f"wavelength {lam.min():.6g} nm is below valid_range minimum {lo:g} nm "
                f"of model {model.name!r}"
            )
        if lam.max() > hi:
            raise WavelengthRangeError(
                f"wavelength {lam.max():.6g} nm is above valid_range maximum {hi:g} nm "
                f"of model {model.name!r}"
            )
    func = FORMS[model.form_id][0]
    n2 = func(lam * NM / 1e-6, *model.coefficients)
    return _scalar(np.sqrt(n2))


def wavenumber(model: SellmeierModel, wavelength_nm):
    """Bulk wavenumber k = 2*pi*n/lambda in rad/m."""
    lam = np.asarray(wavelength_nm, dtype=float)
    return _scalar(2 * np.pi * refractive_index(model, lam) / (lam * NM))


_REQUIRED = ("name", "form_id", "coefficients", "valid_range_nm", "source")


def _floats(text, key, lineno):
    try:
        values = [float(tok) for tok in text.split(",")]
    except ValueError:
        raise SellmeierParseError(f"line {lineno}: key {key!r}: expected comma-separated reals, got {text!r}") from None
    if not all(math.isfinite(v) for v in values):
        raise SellmeierParseError(f"line {lineno}: key {key!r}: non-finite value in {text!r}")
    return values


def parse_sellmeier(text: str, origin: str = "<string>") -> SellmeierModel:
    """Parse the ``key = value`` Sellmeier format."""
    fields = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SellmeierParseError(f"{origin}, line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _REQUIRED:
            raise SellmeierParseError(f"{origin}, line {lineno}: unknown key {key!r}")
        if key in fields:
            raise SellmeierParseError(f"{origin}, line {lineno}: duplicate key {key!r}")
        fields[key] = value
        lines[key] = lineno
    missing = [k for k in _REQUIRED if k not in fields]
    if missing:
        raise SellmeierParseError(f"{origin}: missing required key(s) {', '.join(missing)}")
    coefficients = _floats(fields["coefficients"], "coefficients", lines["coefficients"])
    valid_range = _floats(fields["valid_range_nm"], "valid_range_nm", lines["valid_range_nm"])
    if len(valid_range) != 2:
        raise SellmeierParseError(
            f"{origin}, line {lines['valid_range_nm']}: key 'valid_range_nm' needs two values"
        )
    try:
        return SellmeierModel(
            name=fields["name"],
            coefficients=tuple(coefficients),
            form_id=fields["form_id"],
            valid_range=tuple(valid_range),
            source=fields["source"],
        )
    except SellmeierParseError as exc:
        raise type(exc)(f"{origin}: {exc}") from None


def load_sellmeier(path) -> SellmeierModel:
    """Load and validate a Sellmeier model from a data file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SellmeierParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_sellmeier(text, origin=str(path))


@lru_cache(maxsize=None)
def ppln_e() -> SellmeierModel:
    """The shipped congruent LiNbO3 extraordinary-index set."""
    text = resources.files("qpmspdc").joinpath("data/ppln_e.sellmeier").read_text(encoding="utf-8")
    return parse_sellmeier(text, origin="ppln_e.sellmeier")
