"""SPDC spectrum of a periodically poled GRIN waveguide with a tilted plane-wave pump.

The spectrum as a function of signal wavelength is

    |Phi|^2 = A sqrt(pi / (g_s^2 + g_i^2)) exp(-zeta^2 / (4 g_eff^2)) * B(dbeta)

with g_j the Gaussian mode parameters, zeta = k_p sin(theta),
g_eff^2 = (g_s^2 + g_i^2) / 2, and B the grating bracket built from
sinc((dbeta - K_m) L / 2) over the active orders m (+/-1 by default).
``dbeta`` is the direction-signed mismatch without the grating term.  The
constant A is fixed by normalising to the peak.

Two bracket conventions are offered:

* ``"squared"`` (default) - sum of sinc^2 terms, i.e. the magnitude squared
  of each grating contribution with no cross terms.
* ``"linear"`` - the bracket summed as written, sinc + sinc, clamped at zero
  from below for reporting.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import sindg

from .csvio import fingerprint
from .errors import GuidanceError, InputError, QPMError
from .qpm import (
    CO,
    COUNTER,
    InteractionConfig,
    _grating_k,
    idler_from_energy,
    mismatch,
    signal_window,
    solve_poling_period,
    solve_pump_angles,
    solve_signal_idler,
)
from .units import _scalar, nm_from_omega, omega_from_nm
from .waveguide import is_single_mode, mode_gamma

log = logging.getLogger(__name__)

BRACKET_MODES = ("squared", "linear")
FIRST_ORDER_G = 2 / math.pi  # |G_1| of a 50% duty square wave


def _check_mode(mode):
    if mode not in BRACKET_MODES:
        raise InputError(f"bracket mode must be one of {BRACKET_MODES}, got {mode!r}")


def _sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


def order_weights(cfg: InteractionConfig, orders: Sequence[int]) -> np.ndarray:
    """|G_m| relative to the first order of a 50% square wave (1 for m = +/-1 at 50% duty)."""
    return np.array([abs(cfg.poling.fourier_coefficient(m)) / FIRST_ORDER_G for m in orders])


def sinc_bracket(delta_beta, period, length, orders=(-1, 1), mode="squared", weights=None):
    """Grating bracket as a function of the grating-free mismatch (rad/m)."""
    _check_mode(mode)
    db = np.asarray(delta_beta, dtype=float)
    if weights is None:
        weights = np.ones(len(orders))
    total = np.zeros_like(db)
    for m, w in zip(orders, weights):
        if w == 0:
            continue
        s = _sinc((db - _grating_k(period, m)) * length / 2)
        total = total + (w * w * s * s if mode == "squared" else w * s)
    if mode == "linear":
        total = np.maximum(total, 0.0)
    return _scalar(total)


def log_prefactor(cfg: InteractionConfig, lambda_s):
    """Natural log of the waveguide prefactor at signal wavelength(s) in nm.

    With alpha = 0 (no waveguide) the prefactor is dropped in bulk mode.
    """
    lam_s = np.asarray(lambda_s, dtype=float)
    lam_i = np.asarray(idler_from_energy(cfg.pump.wavelength, lam_s))
    wg = cfg.waveguide
    if wg.alpha == 0:
        if cfg.beta_mode == "guided":
            raise GuidanceError("guided mode needs alpha > 0 (the alpha = 0 slab supports no single guided mode)")
        return _scalar(np.zeros_like(lam_s))
    g2 = np.asarray(mode_gamma(wg, omega_from_nm(lam_s))) ** 2 + np.asarray(mode_gamma(wg, omega_from_nm(lam_i))) ** 2
    zeta = cfg.pump.k * float(sindg(cfg.pump.theta))
    # exp(-zeta^2 / (4 g_eff^2)) with 4 g_eff^2 = 2 (g_s^2 + g_i^2)
    return _scalar(0.5 * np.log(np.pi / g2) - zeta**2 / (2 * g2))


def _parts(cfg, lambda_s, mode, orders=None):
    lam = np.asarray(lambda_s, dtype=float)
    if cfg.beta_mode == "guided":
        wg = cfg.waveguide
        lam_i = np.asarray(idler_from_energy(cfg.pump.wavelength, lam))
        if cfg.waveguide.alpha == 0 or not (
            np.all(is_single_mode(wg, omega_from_nm(lam))) and np.all(is_single_mode(wg, omega_from_nm(lam_i)))
        ):
            raise GuidanceError("signal or idler is not single-mode in the waveguide")
    orders = cfg.poling.orders if orders is None else tuple(orders)
    bracket = sinc_bracket(
        mismatch(cfg, lam), cfg.poling.period, cfg.waveguide.length, orders, mode, order_weights(cfg, orders)
    )
    return np.asarray(log_prefactor(cfg, lam)), np.asarray(bracket)


def spectrum_value(cfg: InteractionConfig, lambda_s, *, mode: str = "squared"):
    """Unnormalised spectral intensity at signal wavelength(s) in nm."""
    logp, bracket = _parts(cfg, lambda_s, mode)
    return _scalar(np.exp(logp) * bracket)


def fwhm_from_samples(x, y, around=None):
    """FWHM of the peak of sampled ``y`` by linear interpolation of the half-maximum crossings.

    The peak is the global maximum, or with ``around`` the local maximum
    reached by climbing from the sample nearest to ``around``.  Returns
    (fwhm, peak_x, (lo, hi)) or (None, peak_x, None) when a crossing lies
    outside the samples.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if around is None:
        i = int(np.argmax(y))
    else:
        i = int(np.argmin(np.abs(x - around)))
        while True:
            if i + 1 < len(y) and y[i + 1] > y[i]:
                i += 1
            elif i > 0 and y[i - 1] > y[i]:
                i -= 1
            else:
                break
    half = 0.5 * y[i]
    j = i
    while j > 0 and y[j] >= half:
        j -= 1
    k = i
    while k < len(y) - 1 and y[k] >= half:
        k += 1
    if y[j] >= half or y[k] >= half:
        return None, float(x[i]), None
    lo = x[j] + (half - y[j]) * (x[j + 1] - x[j]) / (y[j + 1] - y[j])
    hi = x[k - 1] + (half - y[k - 1]) * (x[k] - x[k - 1]) / (y[k] - y[k - 1])
    return float(hi - lo), float(x[i]), (float(lo), float(hi))


@dataclass
class SpectrumSlice:
    lambda_s_grid: np.ndarray
    values: np.ndarray
    peak_lambda: Optional[float]
    fwhm: Optional[float]
    fingerprint: str
    beta_mode: str
    bracket_mode: str
    has_root: bool
    prefactor_variation: float
    half_max_band: Optional[tuple[float, float]] = None
    meta: dict = field(default_factory=dict)

    @property
    def step(self) -> float:
        return float(self.lambda_s_grid[1] - self.lambda_s_grid[0])

    @property
    def points_in_fwhm(self) -> int:
        if self.half_max_band is None:
            return 0
        lo, hi = self.half_max_band
        return int(np.count_nonzero((self.lambda_s_grid >= lo) & (self.lambda_s_grid <= hi)))

    @property
    def flagged(self) -> bool:
        return self.fwhm is None


def _grid(start, stop, step):
    if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)) or step <= 0 or stop <= start:
        raise InputError(f"invalid grid {start}:{stop}:{step}")
    n = int(math.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(n + 1)


def _window_has_root(cfg, grid, orders):
    db = np.asarray(mismatch(cfg, grid))
    for m in orders:
        f = db - _grating_k(cfg.poling.period, m)
        if np.any(np.abs(f) <= cfg.tolerance) or np.any(f[:-1] * f[1:] < 0):
            return True
    return False


def spectrum_slice(
    cfg: InteractionConfig,
    start: float,
    stop: float,
    step: float,
    *,
    mode: str = "squared",
    around: Optional[float] = None,
) -> SpectrumSlice:
    """Peak-normalised spectrum on a signal-wavelength grid (nm) with its FWHM."""
    _check_mode(mode)
    grid = _grid(start, stop, step)
    logp, bracket = _parts(cfg, grid, mode)
    rel = np.exp(logp - logp.max())
    raw = rel * bracket
    meta = dict(cfg.describe(), bracket=mode)
    fp = fingerprint(meta)
    has_root = _window_has_root(cfg, grid, cfg.poling.orders)
    if not has_root:
        log.warning("window %g-%g nm contains no perfect-QPM root for orders %s", start, stop, cfg.poling.orders)
    variation = float((rel.max() - rel.min()) / rel.max())
    peak = raw.max()
    if not peak > 0:
        return SpectrumSlice(grid, np.zeros_like(grid), None, None, fp, cfg.beta_mode, mode, has_root, variation, None, meta)
    values = raw / peak
    width, peak_lambda, band = fwhm_from_samples(grid, values, around=around)
    return SpectrumSlice(grid, values, peak_lambda, width, fp, cfg.beta_mode, mode, has_root, variation, band, meta)


def _relative(cfg, mode, ref_logp):
    def g(lam):
        logp, bracket = _parts(cfg, lam, mode)
        return float(np.exp(logp - ref_logp) * bracket)

    return g


def _half_max_offset(g, x0, ref, direction, limit, h0):
    """Distance from x0 to where g drops below ref/2, searching one way (bounded by limit)."""
    h = h0
    inside = 0.0
    while True:
        x = x0 + direction * h
        if (direction > 0 and x >= limit) or (direction < 0 and x <= limit):
            return abs(limit - x0)
        if g(x) < 0.5 * ref:
            break
        inside = h
        h *= 2
    lo, hi = inside, h
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if g(x0 + direction * mid) < 0.5 * ref:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def half_max_offsets(cfg: InteractionConfig, center_nm: float, *, mode: str = "squared"):
    """Distances (nm) from ``center_nm`` to the half-maximum points on either side."""
    lo_lim, hi_lim = signal_window(cfg)
    ref_logp = float(log_prefactor(cfg, center_nm))
    g = _relative(cfg, mode, ref_logp)
    ref = g(center_nm)
    if not ref > 0:
        raise InputError(f"spectrum vanishes at {center_nm} nm")
    h0 = 1e-6 * center_nm
    return (
        _half_max_offset(g, center_nm, ref, -1, lo_lim, h0),
        _half_max_offset(g, center_nm, ref, +1, hi_lim, h0),
    )


def slice_around(
    cfg: InteractionConfig, center_nm: float, *, mode: str = "squared", span: float = 3.0, points_per_fwhm: int = 200
) -> SpectrumSlice:
    """Spectrum slice with a window and step sized from the lobe at ``center_nm``."""
    left, right = half_max_offsets(cfg, center_nm, mode=mode)
    width = left + right
    lo_lim, hi_lim = signal_window(cfg)
    start = max(center_nm - span * width, lo_lim)
    stop = min(center_nm + span * width, hi_lim)
    return spectrum_slice(cfg, start, stop, width / points_per_fwhm, mode=mode, around=center_nm)


@dataclass(frozen=True)
class BandwidthRow:
    lambda_s: float
    abscissa: float  # lambda_s / (2 lambda_p)
    fwhm_co: Optional[float]
    fwhm_counter: Optional[float]
    ratio_co: Optional[float]
    ratio_counter: Optional[float]
    period_co_um: Optional[float]
    theta_counter_deg: Optional[float]
    merged_co: bool = False
    error: Optional[str] = None


def _co_width(cfg, lam, mode):
    sol = solve_poling_period(cfg, lam, m=1)
    s = slice_around(cfg.with_period(sol.period_m), lam, mode=mode)
    return s, sol.period_um


def _counter_width(cfg, lam, mode, order):
    sols = solve_pump_angles(cfg, lam, orders=(order,))
    if not sols:
        raise QPMError(f"no counter-propagating pump angle for lambda_s = {lam} nm, m = {order}")
    theta = sols[0].theta_deg
    s = slice_around(cfg.with_theta(theta), lam, mode=mode)
    return s, theta


def bandwidth_ratio_sweep(
    cfg: InteractionConfig,
    signals_nm: Sequence[float],
    reference_nm: float = 880.0,
    *,
    mode: str = "squared",
    counter_order: int = 1,
    co_theta_deg: float = 0.0,
) -> list[BandwidthRow]:
    """FWHM vs central signal wavelength, relative to the FWHM at ``reference_nm``.

    Counter-propagating rows keep the template's poling period and solve the
    pump angle (order ``counter_order``); co-propagating rows keep the pump
    at ``co_theta_deg`` and solve the first-order poling period.  Each FWHM
    is that of the lobe around the phase-matched signal wavelength.
    ``merged_co`` marks co-propagating lobes whose half-maximum band reaches
    the degenerate wavelength, i.e. signal and idler lobes have coalesced.
    """
    signals = [float(s) for s in signals_nm]
    if not any(math.isclose(s, reference_nm) for s in signals):
        raise InputError(f"reference wavelength {reference_nm} nm must be one of the sampled signal wavelengths")
    co_cfg = InteractionConfig(cfg.pump, cfg.poling, cfg.waveguide, CO, cfg.beta_mode).with_theta(co_theta_deg)
    counter_cfg = InteractionConfig(cfg.pump, cfg.poling, cfg.waveguide, COUNTER, cfg.beta_mode)
    degenerate = 2 * cfg.pump.wavelength
    raw = []
    for lam in signals:
        entry = dict(lambda_s=lam, abscissa=lam / degenerate)
        try:
            s_co, period = _co_width(co_cfg, lam, mode)
            s_ct, theta = _counter_width(counter_cfg, lam, mode, counter_order)
        except QPMError as exc:
            raw.append(dict(entry, error=str(exc)))
            continue
        merged = bool(
            s_co.half_max_band is not None
            and s_co.half_max_band[0] <= degenerate <= s_co.half_max_band[1]
            and not math.isclose(lam, degenerate)
        )
        raw.append(
            dict(entry, fwhm_co=s_co.fwhm, fwhm_counter=s_ct.fwhm, period_co_um=period, theta_counter_deg=theta, merged_co=merged)
        )
    ref = next(r for r in raw if math.isclose(r["lambda_s"], reference_nm))
    if ref.get("error") or ref.get("fwhm_co") is None or ref.get("fwhm_counter") is None:
        raise QPMError(f"reference row at {reference_nm} nm could not be evaluated: {ref.get('error')}")
    rows = []
    for r in raw:
        fc, ft = r.get("fwhm_co"), r.get("fwhm_counter")
        rows.append(
            BandwidthRow(
                lambda_s=r["lambda_s"],
                abscissa=r["abscissa"],
                fwhm_co=fc,
                fwhm_counter=ft,
                ratio_co=None if fc is None else fc / ref["fwhm_co"],
                ratio_counter=None if ft is None else ft / ref["fwhm_counter"],
                period_co_um=r.get("period_co_um"),
                theta_counter_deg=r.get("theta_counter_deg"),
                merged_co=r.get("merged_co", False),
                error=r.get("error"),
            )
        )
    return rows


@dataclass
class SpectralMap:
    theta_grid: np.ndarray
    lambda_grid: np.ndarray
    values: np.ndarray  # shape (len(theta_grid), len(lambda_grid))
    failed_cells: int
    fingerprint: str
    beta_mode: str
    bracket_mode: str
    meta: dict = field(default_factory=dict)

    def row_maxima(self, i: int, threshold: float = 0.5) -> np.ndarray:
        """Signal wavelengths of local maxima in row i that reach ``threshold`` x the row maximum."""
        row = self.values[i]
        top = row.max()
        if not top > 0:
            return np.array([])
        inner = (row[1:-1] >= row[:-2]) & (row[1:-1] > row[2:]) & (row[1:-1] >= threshold * top)
        return self.lambda_grid[1:-1][inner]


def spectral_map(
    cfg: InteractionConfig,
    theta_range: tuple[float, float, float],
    lambda_window: tuple[float, float, float],
    *,
    orders: Optional[Sequence[int]] = None,
    mode: str = "squared",
) -> SpectralMap:
    """Globally normalised spectrum over a (pump angle, signal wavelength) grid.

    Columns whose signal or idler leaves the dispersion model (or the guided
    mode) are zero and counted in ``failed_cells``.
    """
    _check_mode(mode)
    orders = cfg.poling.orders if orders is None else tuple(orders)
    if not orders:
        raise InputError("orders must be non-empty")
    thetas = _grid(*theta_range)
    if thetas.min() < 0 or thetas.max() > 90:
        raise InputError("pump angles must lie in [0, 90] degrees")
    lams = _grid(*lambda_window)
    cfg = cfg.with_orders(orders)
    lo, hi = signal_window(cfg)
    ok = (lams >= lo) & (lams <= hi)
    logp = np.full((len(thetas), len(lams)), -np.inf)
    bracket = np.zeros((len(thetas), len(lams)))
    cols = np.flatnonzero(ok)
    base = np.zeros(len(lams))
    lp0 = np.zeros(len(lams))
    good = np.zeros(len(lams), dtype=bool)
    # theta-independent pieces per column: signed beta sum and the prefactor without the zeta term
    probe = cfg.with_theta(0.0)
    try:
        base[cols] = probe.pump.beta - np.asarray(mismatch(probe, lams[cols]))
        lp0[cols] = log_prefactor(probe, lams[cols])
        good[cols] = True
    except (GuidanceError, QPMError):
        for j in cols:
            try:
                base[j] = probe.pump.beta - float(mismatch(probe, lams[j]))
                lp0[j] = float(log_prefactor(probe, lams[j]))
                good[j] = True
            except QPMError:
                pass
    if cfg.waveguide.alpha > 0:
        lam_g = lams[good]
        lam_i = np.asarray(idler_from_energy(cfg.pump.wavelength, lam_g))
        g2 = np.asarray(mode_gamma(cfg.waveguide, omega_from_nm(lam_g))) ** 2 + np.asarray(
            mode_gamma(cfg.waveguide, omega_from_nm(lam_i))
        ) ** 2
    weights = order_weights(cfg, orders)
    for r, theta in enumerate(thetas):
        pumped = cfg.with_theta(theta)
        db = pumped.pump.beta - base[good]
        bracket[r, good] = sinc_bracket(db, cfg.poling.period, cfg.waveguide.length, orders, mode, weights)
        if cfg.waveguide.alpha > 0:
            zeta = pumped.pump.k * float(sindg(theta))
            logp[r, good] = lp0[good] - zeta**2 / (2 * g2)
        else:
            logp[r, good] = 0.0
    finite = np.isfinite(logp)
    values = np.zeros_like(bracket)
    if finite.any():
        values[finite] = np.exp(logp[finite] - logp[finite].max()) * bracket[finite]
    top = values.max()
    if top > 0:
        values = values / top
    failed = int(np.count_nonzero(~good)) * len(thetas)
    meta = dict(cfg.describe(), bracket=mode)
    meta.pop("theta_deg")
    return SpectralMap(thetas, lams, values, failed, fingerprint(meta), cfg.beta_mode, mode, meta)


@dataclass(frozen=True)
class SuperpositionTerm:
    lambda_s: float
    lambda_i: float
    order: int
    weight: float


def _lobe_integral(cfg, lambda_s, mode, n=4001):
    left, right = half_max_offsets(cfg, lambda_s, mode=mode)
    w0 = float(omega_from_nm(lambda_s))
    # half-max offsets converted to angular frequency; symmetric omega grid about the root
    dw = max(
        abs(float(omega_from_nm(lambda_s - left)) - w0),
        abs(float(omega_from_nm(lambda_s + right)) - w0),
    )
    offsets = np.linspace(-4 * dw, 4 * dw, n)
    omegas = w0 + offsets
    lo, hi = signal_window(cfg)
    lam = np.clip(nm_from_omega(omegas), lo, hi)
    logp, bracket = _parts(cfg, lam, mode)
    ref = float(log_prefactor(cfg, lambda_s))
    y = np.exp(logp - ref) * bracket
    c0 = n // 2
    i = c0
    while i > 0 and y[i - 1] <= y[i]:
        i -= 1
    k = c0
    while k < n - 1 and y[k + 1] <= y[k]:
        k += 1
    return float(trapezoid(y[i : k + 1], omegas[i : k + 1])), ref


def superposition_weights(
    cfg: InteractionConfig,
    theta_deg: Optional[float] = None,
    *,
    window: Optional[tuple[float, float]] = None,
    mode: str = "squared",
) -> list[SuperpositionTerm]:
    """Discrete-frequency decomposition of the two-photon state at one pump angle.

    One term per perfect-QPM root.  A term's weight is the area of its main
    spectral lobe integrated over signal angular frequency, with all lobes on
    a common normalisation, rescaled so the weights sum to one.  This is a
    convention: the physical amplitudes depend on pump details not modelled
    here.
    """
    if theta_deg is not None:
        cfg = cfg.with_theta(theta_deg)
    roots = solve_signal_idler(cfg, window=window)
    if not roots:
        return []
    areas = []
    for r in roots:
        area, ref = _lobe_integral(cfg, r.lambda_s, mode)
        areas.append((area, ref))
    top = max(ref for _, ref in areas)
    scaled = [a * math.exp(ref - top) for a, ref in areas]
    total = sum(scaled)
    return [
        SuperpositionTerm(r.lambda_s, r.lambda_i, r.order, s / total) for r, s in zip(roots, scaled)
    ]
