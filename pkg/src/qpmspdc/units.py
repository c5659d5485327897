"""Unit conversions between the nm/deg interface and SI internals."""

import numpy as np
from scipy.constants import c

NM = 1e-9
UM = 1e-6
MM = 1e-3


def omega_from_nm(wavelength_nm):
    """Angular frequency (rad/s) of a vacuum wavelength in nm."""
    return 2 * np.pi * c / (np.asarray(wavelength_nm, dtype=float) * NM)


def nm_from_omega(omega):
    """Vacuum wavelength in nm of an angular frequency in rad/s."""
    return 2 * np.pi * c / np.asarray(omega, dtype=float) / NM


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x
