import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinoptomech import ModelParams, SteadyState, dsf, dsf_prefactor, output_dns, presets
from spinoptomech.errors import ZeroPump


def _decoupled():
    params, ss = presets.thermal()
    params = params.replace(eta=0.5)
    ss = SteadyState.prescribed_point(params, 0.05, 0.0, 0.0, n_s=2.0)
    return params, ss


def test_prefactor():
    params = ModelParams(kappa=0.1, N_atoms=1e5)
    assert dsf_prefactor(1.0, 0.5, params) == pytest.approx(4 * 1.01 / (1e5 * 0.25), rel=1e-15)


def test_zero_pump():
    params, ss = _decoupled()
    with pytest.raises(ZeroPump):
        dsf_prefactor(1.0, 0.0, params)
    with pytest.raises(ZeroPump):
        dsf("k0", 1.0, np.linspace(-5, 5, 11), ss, params.replace(eta=0.0))


def test_shot_noise_shape_without_coupling():
    params, ss = _decoupled()
    w = np.linspace(-5, 5, 1001)
    curve = dsf("k0", 1.0, w, ss, params)
    k, D = params.kappa, ss.Delta
    shot = (k ** 2 + w ** 2 + D ** 2 + 2 * k * D) / np.abs((k + 1j * w) ** 2 - D ** 2) ** 2
    assert np.allclose(curve.inelastic / shot, curve.prefactor, rtol=1e-12)
    assert not curve.warning_flags.any()


@given(st.floats(0.1, 10.0))
def test_pointwise_algebra(P):
    params, ss = _decoupled()
    w = np.linspace(-5, 5, 201)
    curve = dsf("k1", P, w, ss, params)
    eta = params.eta * math.sqrt(P)
    pref = 4 * (params.kappa ** 2 + ss.Delta ** 2) / (params.N_atoms * eta ** 2)
    s_out = output_dns(P, w, ss, params)
    assert np.max(np.abs(curve.inelastic - pref * s_out / (2 * math.pi))
                  / np.abs(pref * s_out / (2 * math.pi))) < 1e-12
    assert curve.elastic_weight == pref * (ss.n_s * P) ** 2


def test_doubling_atoms_halves_everything():
    params, ss = _decoupled()
    w = np.linspace(-5, 5, 201)
    a = dsf("k", 2.0, w, ss, params)
    b = dsf("k", 2.0, w, ss, params.replace(N_atoms=2 * params.N_atoms))
    assert np.array_equal(b.inelastic, a.inelastic / 2)
    assert b.elastic_weight == a.elastic_weight / 2


def test_elastic_term_stays_off_grid():
    params, ss = _decoupled()
    w = np.linspace(-5, 5, 201)
    a = dsf("k", 1.0, w, ss, params)
    b = dsf("k", 1.0, w, SteadyState.prescribed_point(params, ss.Delta, 0.0, 0.0, n_s=6.0),
            params)
    # the photon number enters only through the separate elastic weight
    assert np.array_equal(a.inelastic, b.inelastic)
    assert b.elastic_weight == pytest.approx(9 * a.elastic_weight, rel=1e-15)


def test_flags_follow_output_spectrum():
    params, ss = presets.fig6()
    w = np.linspace(-5, 5, 401)
    curve = dsf("k", 3.0, w, ss, params, allow_unstable=True)
    s_out = output_dns(3.0, w, ss, params, allow_unstable=True)
    assert np.array_equal(curve.warning_flags, s_out < 0)
    d = curve.to_dict()
    assert d["n_warnings"] == int(np.count_nonzero(s_out < 0)) and d["P"] == 3.0
