import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.constants import c

from qpmspdc.dispersion import refractive_index
from qpmspdc.errors import GuidanceError, InputError
from qpmspdc.units import omega_from_nm
from qpmspdc.waveguide import (
    WaveguideSpec,
    bulk_wavenumber,
    cutoff_constant,
    guided_mode,
    is_single_mode,
    mode_gamma,
    propagation_constant,
)

W1064 = 2 * math.pi * c / 1064e-9


def wg(model, alpha=4e5, length=1e-3):
    return WaveguideSpec(alpha, length, model)


def test_gamma_zero_alpha(model):
    assert mode_gamma(wg(model, 0.0), W1064) == 0.0


def test_gamma_sqrt_law(model):
    assert mode_gamma(wg(model, 8e5), W1064) == pytest.approx(math.sqrt(2) * mode_gamma(wg(model, 4e5), W1064), rel=1e-14)


def test_gamma_hand_value(model):
    # n0 = 2.1560, omega = 1.7703e15 rad/s, alpha = 4e5 /m
    n0 = 2.15599779
    expected = math.sqrt(n0 * W1064 * 4e5 / 299792458.0)
    assert mode_gamma(wg(model), W1064) == pytest.approx(expected, rel=1e-8)
    assert expected == pytest.approx(2.2567e6, rel=1e-4)


def test_bulk_limit(model):
    n = refractive_index(model, 1064.0)
    assert propagation_constant(wg(model, 0.0), W1064) == pytest.approx(n * 2 * math.pi / 1064e-9, rel=1e-13)
    assert bulk_wavenumber(wg(model), W1064) == pytest.approx(n * 2 * math.pi / 1064e-9, rel=1e-13)


def test_guided_below_bulk(model):
    assert propagation_constant(wg(model), W1064) < bulk_wavenumber(wg(model), W1064)


def test_bracket_nonpositive_is_guidance_error(model):
    k = bulk_wavenumber(wg(model), W1064)
    with pytest.raises(GuidanceError, match="not supported"):
        propagation_constant(wg(model, 1.01 * k), W1064)
    with pytest.raises(GuidanceError):
        cutoff_constant(wg(model, 0.34 * k), W1064)


def test_cutoff_unguided_limit(model):
    g = wg(model, 0.0)
    assert cutoff_constant(g, W1064) == propagation_constant(g, W1064)
    assert is_single_mode(g, W1064) is False


def test_cutoff_is_triple_alpha(model):
    assert cutoff_constant(wg(model, 2e5), W1064) == pytest.approx(propagation_constant(wg(model, 6e5), W1064), rel=1e-15)


def test_single_mode_default(model):
    assert is_single_mode(wg(model), W1064) is True
    m = guided_mode(wg(model), W1064)
    assert m.single_mode and m.gamma > 0 and m.beta > 0


def test_spec_validation(model):
    with pytest.raises(InputError):
        WaveguideSpec(-1.0, 1e-3, model)
    with pytest.raises(InputError):
        WaveguideSpec(1.0, 0.0, model)
    with pytest.raises(InputError):
        mode_gamma(wg(model), -1.0)


def test_ordering_on_grid(model):
    rng = np.random.default_rng(7)
    lam = rng.uniform(450.0, 4500.0, 1000)
    frac = rng.uniform(1e-6, 0.33, 1000)
    for f, w in zip(frac, omega_from_nm(lam)):
        # admissible: 3 alpha below the bulk wavenumber
        g = wg(model, f * bulk_wavenumber(wg(model), w))
        assert cutoff_constant(g, w) < propagation_constant(g, w) < bulk_wavenumber(g, w)


def test_beta_increasing_in_omega(model):
    w = omega_from_nm(np.linspace(4999.0, 401.0, 5000))
    beta = propagation_constant(wg(model), w)
    assert np.all(np.diff(beta) > 0)


@settings(max_examples=200, deadline=None)
@given(lam=st.floats(401.0, 4999.0), alpha=st.floats(1e-3, 1e6))
def test_gamma_round_trip(model, lam, alpha):
    w = float(omega_from_nm(lam))
    n0 = refractive_index(model, lam)
    g = mode_gamma(wg(model, alpha), w)
    assert g * g * c / (n0 * w) == pytest.approx(alpha, rel=1e-12)
