import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinoptomech import (ModelParams, NoiseKernel, KernelKind, normalize_params, to_absolute,
                          brownian_psd, coupling_from_power, input_noise_kernels)
from spinoptomech.errors import NonPositiveRate, NonFiniteInput, NegativePower
from spinoptomech.params import RATE_FIELDS

import oracles

# k_B * 300 K / (hbar * 2 pi * 3800 Hz), evaluated at 40 digits with the exact SI constants
KBT_300K_3800HZ = 1644996246.5784926
# small-frequency limit of the Brownian kernel at the same point, gamma_m = 0.05
BROWNIAN_ZERO_LIMIT = 164499624.65784926


def test_kappa_normalization_ratio():
    p = normalize_params({"omega_m": 2 * math.pi * 3.8e3, "kappa": 2 * math.pi * 0.38e3})
    assert p.kappa == pytest.approx(0.1, rel=1e-12)


def test_identity_scaling():
    assert normalize_params({"omega_m": 1.0, "kappa": 1.0}).kappa == 1.0


def test_thermal_energy_in_mechanical_quanta():
    p = ModelParams(omega_m=2 * math.pi * 3800, T_bath=300.0)
    assert p.kbT_norm == pytest.approx(KBT_300K_3800HZ, rel=1e-12)
    assert p.kbT_norm == pytest.approx(oracles.K_B * 300 / (oracles.HBAR * 2 * math.pi * 3800),
                                       rel=1e-12)


def test_kbt_is_recomputed_after_replace():
    p = ModelParams(T_bath=300.0)
    assert p.replace(T_bath=600.0).kbT_norm == pytest.approx(2 * p.kbT_norm, rel=1e-12)


@pytest.mark.parametrize("name", ["kappa", "gamma_m", "omega_m", "N_atoms"])
def test_non_positive_rate_names_the_field(name):
    with pytest.raises(NonPositiveRate) as info:
        ModelParams(**{name: 0.0})
    assert info.value.field == name


def test_negative_temperature_rejected():
    with pytest.raises(NonPositiveRate):
        ModelParams(T_bath=-1.0)


def test_non_finite_rejected():
    with pytest.raises(NonFiniteInput):
        ModelParams(eta=float("nan"))
    with pytest.raises(NonFiniteInput):
        normalize_params({"omega_m": 1.0, "kappa": float("inf")})


def test_missing_omega_m():
    with pytest.raises(NonPositiveRate):
        normalize_params({"kappa": 1.0})


def test_resolved_sideband_default():
    assert ModelParams().resolved_sideband
    assert not ModelParams(kappa=2.0).resolved_sideband


positive = st.floats(min_value=1e-3, max_value=1e6, allow_nan=False)


@given(st.lists(positive, min_size=len(RATE_FIELDS) + 1, max_size=len(RATE_FIELDS) + 1))
def test_normalization_round_trip(values):
    raw = dict(zip(("omega_m",) + RATE_FIELDS, values))
    back = to_absolute(normalize_params(raw))
    for key, value in raw.items():
        assert back[key] == pytest.approx(value, rel=1e-12)


def test_brownian_small_frequency_limit():
    p = ModelParams(omega_m=2 * math.pi * 3800, gamma_m=0.05)
    assert brownian_psd(0.0, p) == pytest.approx(BROWNIAN_ZERO_LIMIT, rel=1e-12)
    assert brownian_psd(1e-8, p) == pytest.approx(BROWNIAN_ZERO_LIMIT, rel=1e-12)


def test_brownian_quantum_limit():
    p = ModelParams(T_bath=0.0, gamma_m=0.05)
    assert brownian_psd(1.0, p) == pytest.approx(2 * 0.05)
    assert brownian_psd(-1.0, p) == 0.0


def test_brownian_negative_frequency_as_written():
    p = ModelParams(T_bath=1e-3, gamma_m=0.05)
    kT = p.kbT_norm
    expected = 0.05 * -1.0 * (1 + 1 / math.tanh(-1.0 / (2 * kT)))
    assert brownian_psd(-1.0, p) == pytest.approx(expected, rel=1e-12)


@given(st.floats(min_value=1e-6, max_value=50.0), st.floats(min_value=1e-4, max_value=1e4))
def test_brownian_positive_and_monotone_in_temperature(w, T):
    p = ModelParams(T_bath=T)
    hotter = p.replace(T_bath=2 * T)
    assert brownian_psd(w, p) > 0
    assert brownian_psd(w, hotter) >= brownian_psd(w, p)


def test_kernel_kinds():
    p = ModelParams()
    flat = NoiseKernel(KernelKind.MARKOVIAN_FLAT, 3.0)
    w = np.linspace(-4, 4, 9)
    assert np.all(flat(w, p) == 3.0)
    coth = NoiseKernel(KernelKind.BROWNIAN_COTH)
    assert np.all(coth(w[w > 0], p) > 0)
    kernels = input_noise_kernels(p)
    assert kernels["mirror"].kind is KernelKind.BROWNIAN_COTH
    assert kernels["cavity"].scale == pytest.approx(2 * math.pi * 2 * p.kappa)


def test_zero_pump_gives_zero_coupling():
    assert coupling_from_power(0.0, 1.0, ModelParams(), Delta=1.0) == (0.0, 0.0)


@given(st.floats(min_value=1e-6, max_value=1e6))
def test_coupling_square_root_law(P):
    p = ModelParams()
    g1 = coupling_from_power(P, 1.0, p, Delta=1.0)
    g4 = coupling_from_power(4 * P, 1.0, p, Delta=1.0)
    assert g4[0] / g1[0] == pytest.approx(2.0, rel=1e-12)
    assert g4[1] / g1[1] == pytest.approx(2.0, rel=1e-12)


def test_equal_frequencies_give_equal_couplings():
    p = ModelParams(Omega_rec=1.0)
    for P in (0.3, 1.0, 17.0):
        G_m, G_a = coupling_from_power(P, 1.0, p, Delta=0.7)
        assert G_a / G_m == pytest.approx(1.0, rel=1e-14)


@given(st.floats(min_value=0.0, max_value=5.0), st.floats(min_value=0.01, max_value=5.0))
def test_coupling_decreases_with_detuning(D, dD):
    p = ModelParams()
    assert coupling_from_power(1.0, 1.0, p, D + dD)[0] < coupling_from_power(1.0, 1.0, p, D)[0]


def test_negative_power_rejected():
    with pytest.raises(NegativePower):
        coupling_from_power(-1.0, 1.0, ModelParams(), Delta=0.0)
    with pytest.raises(NegativePower):
        coupling_from_power(1.0, 0.0, ModelParams(), Delta=0.0)
