"""Quasi-phase-matched SPDC in periodically poled GRIN waveguides."""

__version__ = "0.1.0"

from .dispersion import SellmeierModel, load_sellmeier, ppln_e, refractive_index
from .errors import QPMError
from .qpm import InteractionConfig, PolingSpec, PumpGeometry, solve_poling_period, solve_pump_angles, solve_signal_idler
from .spectrum import spectrum_slice, spectral_map, bandwidth_ratio_sweep
from .waveguide import WaveguideSpec, guided_mode

__all__ = [
    "SellmeierModel", "load_sellmeier", "ppln_e", "refractive_index", "QPMError",
    "InteractionConfig", "PolingSpec", "PumpGeometry", "solve_poling_period", "solve_pump_angles",
    "solve_signal_idler", "spectrum_slice", "spectral_map", "bandwidth_ratio_sweep",
    "WaveguideSpec", "guided_mode",
]
