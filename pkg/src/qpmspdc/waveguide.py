"""Fundamental TE mode of a parabolic graded-index slab.

For n^2(x) = n0^2 (1 - alpha^2 x^2) the fundamental mode is a Gaussian
exp(-(gamma x)^2 / 2) with

    gamma^2 = n0 omega alpha / c
    beta    = (n0 omega / c) sqrt(1 - c alpha / (n0 omega))

and the next mode up has the same form with alpha replaced by 3 alpha,
which is used as the single-mode cutoff constant.  n0 is evaluated from the
core Sellmeier model at each field's own wavelength.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c

from .dispersion import SellmeierModel, refractive_index
from .errors import GuidanceError, InputError
from .units import _scalar, nm_from_omega


@dataclass(frozen=True)
class WaveguideSpec:
    alpha: float  # gradient constant, 1/m
    length: float  # interaction length, m
    core_index_model: SellmeierModel

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise InputError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not np.isfinite(self.length) or self.length <= 0:
            raise InputError(f"length must be finite and > 0, got {self.length}")


@dataclass(frozen=True)
class GuidedMode:
    gamma: float
    beta: float
    omega: float
    single_mode: bool


def _check_omega(omega):
    w = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise InputError(f"omega must be finite and > 0, got {omega!r}")
    return w


def bulk_wavenumber(wg: WaveguideSpec, omega):
    """n0(omega) omega / c, the unguided limit."""
    w = _check_omega(omega)
    n0 = refractive_index(wg.core_index_model, nm_from_omega(w))
    return _scalar(n0 * w / c)


def _bracket(wg, omega, multiplier):
    w = _check_omega(omega)
    n0 = np.asarray(refractive_index(wg.core_index_model, nm_from_omega(w)))
    k = n0 * w / c
    bracket = 1.0 - multiplier * wg.alpha / k
    if np.any(bracket <= 0):
        lam = np.atleast_1d(nm_from_omega(w))[np.argmin(np.atleast_1d(bracket))]
        raise GuidanceError(
            f"mode not supported at this frequency (lambda = {lam:.6g} nm, "
            f"1 - {multiplier:g} c alpha / (n0 omega) = {np.min(bracket):.3g})"
        )
    return k, bracket


def mode_gamma(wg: WaveguideSpec, omega):
    """Transverse decay parameter gamma = sqrt(n0 omega alpha / c), 1/m."""
    w = _check_omega(omega)
    n0 = refractive_index(wg.core_index_model, nm_from_omega(w))
    return _scalar(np.sqrt(n0 * w * wg.alpha / c))


def propagation_constant(wg: WaveguideSpec, omega):
    """Fundamental-mode propagation constant beta in rad/m."""
    k, bracket = _bracket(wg, omega, 1.0)
    return _scalar(k * np.sqrt(bracket))


def cutoff_constant(wg: WaveguideSpec, omega):
    """Critical propagation constant beta_c (the alpha -> 3 alpha mode)."""
    k, bracket = _bracket(wg, omega, 3.0)
    return _scalar(k * np.sqrt(bracket))


def is_single_mode(wg: WaveguideSpec, omega):
    """True where beta > beta_c.  False in the unguided limit alpha = 0."""
    result = np.asarray(propagation_constant(wg, omega)) > np.asarray(cutoff_constant(wg, omega))
    return bool(result) if result.ndim == 0 else result


def guided_mode(wg: WaveguideSpec, omega: float) -> GuidedMode:
    return GuidedMode(
        gamma=float(mode_gamma(wg, omega)),
        beta=float(propagation_constant(wg, omega)),
        omega=float(omega),
        single_mode=bool(is_single_mode(wg, omega)),
    )
