"""Quasi-phase-matching residual and its solvers.

The grating-corrected mismatch for a pump crossing the waveguide at
internal angle theta is

    dbeta' = k_p cos(theta) - s_s beta_s - s_i beta_i - 2 pi m / period

with direction signs s_s, s_i = +/-1 (a negative idler sign gives
counter-propagation).  The idler wavelength always follows from energy
conservation with the pump.  Solvers bracket sign changes on a uniform grid
and refine by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.special import cosdg

from .dispersion import SellmeierModel, ppln_e, refractive_index, wavenumber
from .errors import InputError, NoSolutionError, NonPhysicalPairError, OrderError, QPMError
from .roots import grid_roots
from .units import MM, NM, UM, _scalar, omega_from_nm
from .waveguide import WaveguideSpec, propagation_constant

MIN_FEASIBLE_PERIOD = 4e-6  # smallest poling period currently fabricable in LiNbO3, m
RELATIVE_TOLERANCE = 1e-6  # |dbeta'| tolerance as a fraction of k_p
THETA_STEP_DEG = 0.01
LAMBDA_STEP_NM = 0.1
BETA_MODES = ("bulk", "guided")


@dataclass(frozen=True)
class PolingSpec:
    period: float  # m
    duty: float = 0.5
    orders: tuple[int, ...] = (-1, 1)

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(m) for m in self.orders))
        if not math.isfinite(self.period) or self.period <= 0:
            raise InputError(f"poling period must be > 0, got {self.period}")
        if not 0.0 <= self.duty <= 1.0:
            raise InputError(f"duty cycle must be in [0, 1], got {self.duty}")
        if not self.orders:
            raise InputError("poling orders must be non-empty")

    def fourier_coefficient(self, m: int) -> float:
        """G_m of a +/-1 square wave with this duty cycle."""
        if m == 0:
            return 2 * self.duty - 1
        md = m * self.duty
        if md == round(md):  # exact zero, not sin(pi k) ~ 1e-16
            return 0.0
        return 2 * math.sin(math.pi * md) / (math.pi * m)


def _grating_k(period, m):
    return 2 * np.pi * m / period


def grating_wavenumber(poling: PolingSpec, m: int) -> float:
    """K_m = 2 pi m / period (rad/m) for a registered order m."""
    if m not in poling.orders:
        raise OrderError(f"order m = {m} is not in the registered orders {poling.orders}")
    return _grating_k(poling.period, m)


@dataclass(frozen=True)
class PumpGeometry:
    wavelength: float  # nm
    theta: float  # internal incidence angle, degrees
    index: float

    def __post_init__(self):
        if not math.isfinite(self.theta) or not 0.0 <= self.theta <= 90.0:
            raise InputError(f"pump angle must be in [0, 90] degrees, got {self.theta}")
        if not math.isfinite(self.wavelength) or self.wavelength <= 0:
            raise InputError(f"pump wavelength must be > 0, got {self.wavelength}")

    @classmethod
    def from_model(cls, model: SellmeierModel, wavelength_nm: float, theta_deg: float):
        return cls(float(wavelength_nm), float(theta_deg), float(refractive_index(model, wavelength_nm)))

    @property
    def k(self) -> float:
        return self.index * 2 * np.pi / (self.wavelength * NM)

    @property
    def beta(self) -> float:
        """Longitudinal pump constant k_p cos(theta)."""
        return self.k * float(cosdg(self.theta))


@dataclass(frozen=True)
class DirectionPair:
    signal_sign: int = 1
    idler_sign: int = -1

    def __post_init__(self):
        if self.signal_sign not in (1, -1) or self.idler_sign not in (1, -1):
            raise InputError(f"direction signs must be +1 or -1, got {self}")

    @property
    def counter(self) -> bool:
        return self.signal_sign * self.idler_sign == -1

    @property
    def label(self) -> str:
        return "counter" if self.counter else "co"

    @classmethod
    def parse(cls, text: str) -> "DirectionPair":
        try:
            return {"co": CO, "counter": COUNTER}[text]
        except KeyError:
            raise InputError(f"directions must be 'co' or 'counter', got {text!r}") from None


CO = DirectionPair(1, 1)
COUNTER = DirectionPair(1, -1)


@dataclass(frozen=True)
class InteractionConfig:
    pump: PumpGeometry
    poling: PolingSpec
    waveguide: WaveguideSpec
    dirs: DirectionPair = COUNTER
    beta_mode: str = "bulk"

    def __post_init__(self):
        if self.beta_mode not in BETA_MODES:
            raise InputError(f"beta_mode must be one of {BETA_MODES}, got {self.beta_mode!r}")

    @classmethod
    def build(
        cls,
        *,
        model: Optional[SellmeierModel] = None,
        pump_nm: float = 532.0,
        theta_deg: float = 0.0,
        period_um: float = 6.8,
        orders: Sequence[int] = (-1, 1),
        length_mm: float = 1.0,
        alpha: float = 4e5,
        dirs: DirectionPair | str = COUNTER,
        beta_mode: str = "bulk",
        duty: float = 0.5,
    ) -> "InteractionConfig":
        """Convenience constructor in interface units (nm, deg, um, mm)."""
        model = model or ppln_e()
        if isinstance(dirs, str):
            dirs = DirectionPair.parse(dirs)
        return cls(
            pump=PumpGeometry.from_model(model, pump_nm, theta_deg),
            poling=PolingSpec(period_um * UM, duty, tuple(orders)),
            waveguide=WaveguideSpec(alpha, length_mm * MM, model),
            dirs=dirs,
            beta_mode=beta_mode,
        )

    @property
    def model(self) -> SellmeierModel:
        return self.waveguide.core_index_model

    @property
    def tolerance(self) -> float:
        """Root acceptance tolerance on |dbeta'| in rad/m."""
        return RELATIVE_TOLERANCE * self.pump.k

    def with_theta(self, theta_deg: float) -> "InteractionConfig":
        return replace(self, pump=replace(self.pump, theta=float(theta_deg)))

    def with_period(self, period_m: float) -> "InteractionConfig":
        return replace(self, poling=replace(self.poling, period=float(period_m)))

    def with_orders(self, orders: Sequence[int]) -> "InteractionConfig":
        return replace(self, poling=replace(self.poling, orders=tuple(orders)))

    def describe(self) -> dict:
        """Flat, interface-unit description used for provenance headers."""
        return {
            "sellmeier": self.model.name,
            "pump_wavelength_nm": self.pump.wavelength,
            "theta_deg": self.pump.theta,
            "poling_period_um": self.poling.period / UM,
            "duty": self.poling.duty,
            "orders": ",".join(str(m) for m in self.poling.orders),
            "length_mm": self.waveguide.length / MM,
            "grin_alpha_per_m": self.waveguide.alpha,
            "directions": self.dirs.label,
            "beta_mode": self.beta_mode,
        }


@dataclass(frozen=True)
class PhaseMatchSolution:
    lambda_s: float  # nm
    lambda_i: float  # nm
    order: int
    residual: float  # rad/m
    theta_deg: float
    period_m: float
    solved: str  # which unknown was solved: "theta", "period" or "lambda_s"
    feasible_poling: bool
    divergent: bool = False

    @property
    def period_um(self) -> float:
        return self.period_m / UM


def idler_from_energy(lambda_p, lambda_s):
    """Idler wavelength (nm) from 1/lambda_i = 1/lambda_p - 1/lambda_s."""
    lp = np.asarray(lambda_p, dtype=float)
    ls = np.asarray(lambda_s, dtype=float)
    if not (np.all(np.isfinite(lp)) and np.all(np.isfinite(ls))):
        raise InputError("non-finite wavelength")
    if np.any(ls <= lp):
        raise NonPhysicalPairError(
            f"signal wavelength must exceed the pump wavelength (lambda_p = {lambda_p}, lambda_s = {lambda_s})"
        )
    return _scalar(1.0 / (1.0 / lp - 1.0 / ls))


def _resolve_idler(cfg, lambda_s, lambda_i):
    derived = idler_from_energy(cfg.pump.wavelength, lambda_s)
    if lambda_i is not None and abs(lambda_i - derived) > 1e-3 * derived:
        raise NonPhysicalPairError(
            f"idler {lambda_i} nm is inconsistent with pump {cfg.pump.wavelength} nm and "
            f"signal {lambda_s} nm (energy conservation gives {derived:.6g} nm)"
        )
    return derived


def field_betas(cfg: InteractionConfig, lambda_s):
    """Signal and idler propagation constants (rad/m) at signal wavelength(s) in nm."""
    lam_s = np.asarray(lambda_s, dtype=float)
    lam_i = np.asarray(idler_from_energy(cfg.pump.wavelength, lam_s))
    if cfg.beta_mode == "bulk":
        return wavenumber(cfg.model, lam_s), wavenumber(cfg.model, lam_i)
    wg = cfg.waveguide
    return propagation_constant(wg, omega_from_nm(lam_s)), propagation_constant(wg, omega_from_nm(lam_i))


def mismatch(cfg: InteractionConfig, lambda_s):
    """Direction-signed mismatch without the grating term, rad/m."""
    beta_s, beta_i = field_betas(cfg, lambda_s)
    d = cfg.dirs
    return _scalar(cfg.pump.beta - d.signal_sign * np.asarray(beta_s) - d.idler_sign * np.asarray(beta_i))


def phase_mismatch(cfg: InteractionConfig, lambda_s, m: int):
    """Grating-corrected mismatch dbeta' (rad/m) for order m."""
    return _scalar(np.asarray(mismatch(cfg, lambda_s)) - _grating_k(cfg.poling.period, m))


def _feasible(period_m):
    return bool(period_m >= MIN_FEASIBLE_PERIOD)


def solve_poling_period(cfg: InteractionConfig, lambda_s: float, *, lambda_i=None, m: int = 1) -> PhaseMatchSolution:
    """Poling period giving perfect QPM at the configured pump angle.

    A vanishing grating-free mismatch returns a solution with an infinite
    period (``divergent=True``).  Raises NoSolutionError when the required
    period has the wrong sign for order m.
    """
    if m == 0:
        raise OrderError("order m = 0 carries no grating; a poling period cannot be solved for it")
    lam_i = _resolve_idler(cfg, lambda_s, lambda_i)
    d = float(mismatch(cfg, lambda_s))
    common = dict(lambda_s=float(lambda_s), lambda_i=float(lam_i), order=m, theta_deg=cfg.pump.theta, solved="period")
    if abs(d) <= cfg.tolerance:
        return PhaseMatchSolution(residual=d, period_m=math.inf, feasible_poling=True, divergent=True, **common)
    period = 2 * np.pi * m / d
    if period <= 0:
        raise NoSolutionError(
            f"no positive poling period for m = {m} at theta = {cfg.pump.theta} deg "
            f"(grating-free mismatch {d:.6g} rad/m has the opposite sign)"
        )
    residual = d - _grating_k(period, m)
    return PhaseMatchSolution(residual=float(residual), period_m=float(period), feasible_poling=_feasible(period), **common)


def _theta_grid(step_deg):
    n = int(round(90.0 / step_deg))
    return np.linspace(0.0, 90.0, n + 1)


def solve_pump_angles(
    cfg: InteractionConfig,
    lambda_s: float,
    *,
    lambda_i=None,
    orders: Optional[Sequence[int]] = None,
    step_deg: float = THETA_STEP_DEG,
) -> list[PhaseMatchSolution]:
    """Every pump angle in [0, 90] deg giving perfect QPM, one entry per (root, m)."""
    orders = cfg.poling.orders if orders is None else tuple(orders)
    if not orders:
        raise InputError("orders must be non-empty")
    lam_i = _resolve_idler(cfg, lambda_s, lambda_i)
    beta_s, beta_i = (float(b) for b in field_betas(cfg, lambda_s))
    fixed = cfg.dirs.signal_sign * beta_s + cfg.dirs.idler_sign * beta_i
    k_p = cfg.pump.k
    grid = _theta_grid(step_deg)
    out = []
    for m in orders:
        K = _grating_k(cfg.poling.period, m)

        def f(theta, K=K):
            return k_p * cosdg(theta) - fixed - K

        for theta, res in grid_roots(f, grid, cfg.tolerance, xtol=1e-11):
            out.append(
                PhaseMatchSolution(
                    lambda_s=float(lambda_s),
                    lambda_i=float(lam_i),
                    order=m,
                    residual=res,
                    theta_deg=theta,
                    period_m=cfg.poling.period,
                    solved="theta",
                    feasible_poling=_feasible(cfg.poling.period),
                )
            )
    out.sort(key=lambda s: (s.theta_deg, s.order))
    return out


def signal_window(cfg: InteractionConfig) -> tuple[float, float]:
    """Signal wavelengths (nm) for which both signal and idler lie in the model window."""
    lo, hi = cfg.model.valid_range
    lp = cfg.pump.wavelength
    start = max(lo, 1.0 / (1.0 / lp - 1.0 / hi)) if hi > lp else math.inf
    stop = hi if lo <= lp else min(hi, 1.0 / (1.0 / lp - 1.0 / lo))
    if not start < stop:
        raise InputError(f"no signal wavelength keeps both fields inside {cfg.model.valid_range} nm")
    # keep clear of rounding at the window edges
    return start * (1 + 1e-12), stop * (1 - 1e-12)


def solve_signal_idler(
    cfg: InteractionConfig,
    *,
    orders: Optional[Sequence[int]] = None,
    window: Optional[tuple[float, float]] = None,
    step_nm: float = LAMBDA_STEP_NM,
) -> list[PhaseMatchSolution]:
    """Every signal wavelength (with its idler) giving perfect QPM at the configured angle.

    Signal wavelengths are scanned over ``window`` (default: the whole range
    keeping both fields inside the dispersion model).  The scanned variable is
    reported as the signal; a degenerate root is reported once.
    """
    if isinstance(orders, int):
        orders = (orders,)
    orders = cfg.poling.orders if orders is None else tuple(orders)
    if not orders:
        raise InputError("orders must be non-empty")
    full = signal_window(cfg)
    if window is None:
        window = full
    start, stop = max(window[0], full[0]), min(window[1], full[1])
    if not start < stop:
        return []
    n = max(int(math.ceil((stop - start) / step_nm)), 1)
    grid = np.linspace(start, stop, n + 1)
    base = np.asarray(mismatch(cfg, grid))
    out = []
    for m in orders:
        K = _grating_k(cfg.poling.period, m)

        def f(lam, m=m):
            return phase_mismatch(cfg, lam, m)

        for lam_s, res in grid_roots(f, grid, cfg.tolerance, xtol=1e-10, values=base - K):
            lam_i = float(idler_from_energy(cfg.pump.wavelength, lam_s))
            if math.isclose(lam_s, lam_i, rel_tol=1e-9):
                lam_s, lam_i = min(lam_s, lam_i), max(lam_s, lam_i)
            out.append(
                PhaseMatchSolution(
                    lambda_s=lam_s,
                    lambda_i=lam_i,
                    order=m,
                    residual=res,
                    theta_deg=cfg.pump.theta,
                    period_m=cfg.poling.period,
                    solved="lambda_s",
                    feasible_poling=_feasible(cfg.poling.period),
                )
            )
    out.sort(key=lambda s: (s.lambda_s, s.order))
    return out


@dataclass(frozen=True)
class TuningRow:
    axis_value: float
    order: int
    solution: Optional[PhaseMatchSolution] = None
    error: Optional[str] = None


@dataclass
class TuningCurve:
    solve: str
    axis_name: str  # "theta_deg" or "period_um"
    rows: list[TuningRow] = field(default_factory=list)

    def solutions(self) -> list[PhaseMatchSolution]:
        return [r.solution for r in self.rows if r.solution is not None]

    @property
    def failed(self) -> list[TuningRow]:
        return [r for r in self.rows if r.error is not None]


SWEEP_AXES = {"pairs": "theta_deg", "period": "theta_deg", "angles": "period_um"}


def tuning_sweep(
    cfg: InteractionConfig,
    solve: str,
    values: Sequence[float],
    *,
    orders: Optional[Sequence[int]] = None,
    lambda_s: Optional[float] = None,
    lambda_i: Optional[float] = None,
    window: Optional[tuple[float, float]] = None,
    step_nm: float = LAMBDA_STEP_NM,
    step_deg: float = THETA_STEP_DEG,
) -> TuningCurve:
    """Run one solver per axis value and collect rows in axis order.

    ``solve`` picks the solver and the axis:

    * ``"pairs"``  - signal/idler roots vs pump angle (deg)
    * ``"period"`` - poling period vs pump angle (deg) for a fixed pair
    * ``"angles"`` - pump angles vs poling period (um) for a fixed pair

    A solver error in one row is recorded on that row and the sweep goes on.
    Orders without a root get a row with no solution.
    """
    if solve not in SWEEP_AXES:
        raise InputError(f"solve must be one of {sorted(SWEEP_AXES)}, got {solve!r}")
    orders = cfg.poling.orders if orders is None else tuple(orders)
    if not orders:
        raise InputError("orders must be non-empty")
    if solve in ("period", "angles") and lambda_s is None:
        raise InputError(f"solve={solve!r} needs a signal wavelength")
    curve = TuningCurve(solve=solve, axis_name=SWEEP_AXES[solve])
    for value in values:
        value = float(value)
        for m in orders:
            try:
                if solve == "pairs":
                    sols = solve_signal_idler(cfg.with_theta(value), orders=(m,), window=window, step_nm=step_nm)
                elif solve == "period":
                    try:
                        sols = [solve_poling_period(cfg.with_theta(value), lambda_s, lambda_i=lambda_i, m=m)]
                    except NoSolutionError:
                        sols = []
                else:
                    sols = solve_pump_angles(
                        cfg.with_period(value * UM), lambda_s, lambda_i=lambda_i, orders=(m,), step_deg=step_deg
                    )
            except QPMError as exc:
                curve.rows.append(TuningRow(value, m, error=str(exc)))
                continue
            if not sols:
                curve.rows.append(TuningRow(value, m))
            for s in sols:
                curve.rows.append(TuningRow(value, m, solution=s))
    return curve
