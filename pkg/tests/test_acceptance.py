"""Acceptance criteria, one test each.

Each test records a single "criterion N PASS/FAIL: ..." line that is printed in
the terminal summary, then asserts.  Figure-level criteria run at prescribed
operating points whose atomic diagonal is positive, so they pass
``allow_unstable=True``; the closed forms are still well defined there.
"""
import math
import os
import time
import warnings

import numpy as np
from scipy import integrate

from conftest import ACCEPTANCE_LINES
from spinoptomech import (ModelParams, SteadyState, band_scan,
                          bloch_matrix, band_energies, drift_matrix, eigen_stability,
                          dns_atomic, dns_mirror, output_dns, resolvent_spectrum,
                          effective_temperature, sideband_peaks, dsf, parse_config,
                          presets, Observable, Spin)
from spinoptomech.io import read_json
from spinoptomech.runner import run

import oracles


def _record(number, ok, detail, elapsed=None, limit=None):
    if limit is not None:
        ok = ok and elapsed < limit
        detail = f"{detail}; {elapsed:.2f} s (limit {limit} s)"
    ACCEPTANCE_LINES.append(f"criterion {number} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def test_criterion_01_gap_law():
    t0 = time.perf_counter()
    worst = 0.0
    for oz in (0.0, 2.0, 4.0, 6.0, 8.0):
        p = ModelParams(U=0.0, delta_R=0.0, Omega_z=oz)
        lo, hi = band_energies(bloch_matrix(0.0, 0.0, p))
        gap = (hi - lo).real
        err = abs(gap - oz) / oz if oz else abs(gap)
        worst = max(worst, err)
    _record(1, worst <= 1e-12, f"max relative gap error {worst:.2e} (tol 1e-12)",
            time.perf_counter() - t0, 1)


def test_criterion_02_dispersion_parity():
    t0 = time.perf_counter()
    base, _ = presets.fig2()
    k0, k1 = presets.fig2_window(base)

    def asym(delta_R):
        bs = band_scan(k0, k1, 801, base.replace(delta_R=delta_R))
        return max(np.max(np.abs(e - e[::-1])) for e in (bs.e_minus, bs.e_plus))

    sym, plus, minus = asym(0.0), asym(1.0), asym(-1.0)
    ok = sym < 1e-10 and plus > 1e-3 and minus > 1e-3
    _record(2, ok, f"delta=0: {sym:.1e} (<1e-10); delta=+1: {plus:.3g}, delta=-1: {minus:.3g} (>1e-3)",
            time.perf_counter() - t0, 1)


def test_criterion_03_double_well():
    t0 = time.perf_counter()
    a = 20 * math.pi
    p = ModelParams(U=0.0, Omega_z=0.0, delta_R=0.0, gamma_a=0.0, g_a=0.0, alpha_tilde=a)
    bs = band_scan(-2 * a, 2 * a, 2001, p)
    step = bs.k_grid[1] - bs.k_grid[0]
    ks = sorted(m.k for m in bs.minima)
    ok = len(ks) == 2 and abs(ks[0] + a) <= step and abs(ks[1] - a) <= step
    _record(3, ok, f"minima {['%.6f' % k for k in ks]} vs +/-{a:.6f}, step {step:.4f}",
            time.perf_counter() - t0, 1)


def test_criterion_04_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    w = np.linspace(-5, 5, 2001)
    worst, n = 0.0, 0
    while n < 50:
        params, ss = oracles.random_system(rng, "stable")
        ds = drift_matrix(ss, params)
        if not eigen_stability(ds).stable:
            continue
        n += 1
        for obs, closed in (
                (Observable.SPIN_UP, dns_atomic(w, None, Spin.UP, ss, params)),
                (Observable.SPIN_DOWN, dns_atomic(w, None, Spin.DOWN, ss, params)),
                (Observable.MIRROR, dns_mirror(w, None, ss, params))):
            ref = resolvent_spectrum(obs, w, ds).values
            worst = max(worst, float(np.max(np.abs(closed - ref) / np.abs(ref))))
    _record(4, worst <= 1e-6, f"50 stable sets, max relative deviation {worst:.2e} (tol 1e-6)",
            time.perf_counter() - t0, 60)


def test_criterion_05_stability_ground_truth():
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    counts = {"stable": 0, "unstable": 0}
    disagreements = 0
    while min(counts.values()) < 20:
        target = "stable" if counts["stable"] < 20 else "unstable"
        params, ss = oracles.random_system(rng, target)
        ds = drift_matrix(ss, params)
        v = eigen_stability(ds)
        # keep the margin resolvable by a finite-time integration
        if (target == "stable") != v.stable or not 0.02 < abs(v.margin) < 2.0:
            continue
        counts[target] += 1
        x0 = rng.normal(size=8)
        t_end = 50 / abs(v.margin)
        steps = int(np.ceil(t_end * max(1.0, np.max(np.abs(v.spectrum))) / 0.05))
        x = oracles.rk4_propagate(ds.K, x0, t_end, steps)
        ratio = np.linalg.norm(x) / np.linalg.norm(x0)
        decays = ratio < 1e-3
        grows = ratio > 10
        if (v.stable and not decays) or (not v.stable and not grows):
            disagreements += 1
    _record(5, disagreements == 0, f"20 stable + 20 unstable, {disagreements} disagreements",
            time.perf_counter() - t0, 30)


def test_criterion_06_thermal_scaling():
    t0 = time.perf_counter()
    params, ss = presets.thermal(300.0)
    hot = params.replace(T_bath=600.0)
    ratio_t = effective_temperature(ss, hot).T_eff / effective_temperature(ss, params).T_eff
    w = np.linspace(-5, 5, 2001)
    ratio_s = dns_mirror(w, None, ss, hot) / dns_mirror(w, None, ss, params)
    dev = float(np.max(np.abs(ratio_s - 2.0)) / 2.0)
    ok = abs(ratio_t - 2.0) <= 0.02 and dev <= 1e-3
    _record(6, ok, f"T_eff ratio {ratio_t:.6f} (2 +/- 1%); S_m pointwise max deviation {dev:.1e} (0.1%)",
            time.perf_counter() - t0, 10)


def _spin_up_area(ss, params, Delta, w):
    s = dns_atomic(w, Delta, Spin.UP, ss, params, allow_unstable=True)
    return integrate.simpson(s, x=w)


def test_criterion_07_optimal_cooling_shift():
    t0 = time.perf_counter()
    w = np.linspace(-5, 5, 2001)
    deltas = np.round(np.arange(0.0, 2.0 + 1e-9, 0.05), 10)
    best = {}
    for alpha in (0.0, 250 * math.pi):
        params, ss = presets.fig3(alpha=alpha)
        areas = [_spin_up_area(ss, params, D, w) for D in deltas]
        best[alpha] = float(deltas[int(np.argmin(areas))])
    a0, a1 = best[0.0], best[250 * math.pi]
    ok = 0.3 <= a0 <= 0.7 and a1 > a0
    _record(7, ok, f"argmin at alpha=0: {a0:.2f} (want [0.3, 0.7]); at alpha=250pi: {a1:.2f} "
                   f"(want > {a0:.2f})", time.perf_counter() - t0, 300)


def _teff_curve(params, ss, deltas):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return np.array([effective_temperature(ss, params, Delta=D, allow_unstable=True).T_eff
                         for D in deltas])


def test_criterion_08_teff_optimum():
    t0 = time.perf_counter()
    deltas = np.round(np.arange(0.5, 2.5 + 1e-9, 0.05), 10)
    params, ss = presets.fig5(alpha=0.0)
    curve = _teff_curve(params, ss, deltas)
    arg = float(deltas[int(np.argmin(curve))])
    minima = []
    for G_a in presets.FIG5B_COUPLINGS:
        p, s = presets.fig5(alpha=presets.FIG5B_ALPHA, G_a=G_a)
        minima.append(float(np.min(_teff_curve(p, s, deltas))))
    monotone = all(b <= a for a, b in zip(minima, minima[1:]))
    ok = 1.0 <= arg <= 1.6 and monotone
    _record(8, ok, f"argmin {arg:.2f} (want [1.0, 1.6]); min T_eff over G_a "
                   f"{list(presets.FIG5B_COUPLINGS)}: {['%.4g' % m for m in minima]} "
                   f"non-increasing={monotone}", time.perf_counter() - t0, 300)


def _sideband_position(params, ss, P, w):
    s = output_dns(P, w, ss, params, allow_unstable=True)
    peaks = sideband_peaks(w, s)
    return peaks.mean_abs_omega, float(np.min(s)), float(np.max(s))


def test_criterion_09_sideband_motion():
    t0 = time.perf_counter()
    w = np.linspace(-5, 5, 2001)
    params, ss = presets.fig6(alpha=0.0)
    w3, lo3, hi3 = _sideband_position(params, ss, 3.0, w)
    w5, lo5, hi5 = _sideband_position(params, ss, 5.0, w)
    pa, sa = presets.fig6(alpha=80 * math.pi)
    w5a, lo5a, hi5a = _sideband_position(pa, sa, 5.0, w)
    ok = w5 < w3 and w5a > w5
    _record(9, ok, f"|w| of positive sideband peaks: P=3: {w3}, P=5: {w5}, P=5 alpha=80pi: {w5a}; "
                   f"S_out range P=3 [{lo3:.3g}, {hi3:.3g}], P=5 [{lo5:.3g}, {hi5:.3g}], "
                   f"alpha=80pi [{lo5a:.3g}, {hi5a:.3g}]", time.perf_counter() - t0, 120)


def test_criterion_10_dsf_algebra():
    t0 = time.perf_counter()
    params, _ = presets.thermal()
    params = params.replace(eta=0.5)
    ss = SteadyState.prescribed_point(params, 0.05, 0.01, 0.02, n_s=1.5)
    P = 2.0
    assert eigen_stability(drift_matrix(ss.at_power(P, 1.0), params)).stable
    w = np.linspace(-5, 5, 2001)
    curve = dsf("k0", P, w, ss, params)
    eta = params.eta * math.sqrt(P)
    pref = 4 * (params.kappa ** 2 + ss.Delta ** 2) / (params.N_atoms * eta ** 2)
    expected = pref * output_dns(P, w, ss, params) / (2 * math.pi)
    inel_err = float(np.max(np.abs(curve.inelastic - expected) / np.abs(expected)))
    elastic_exact = curve.elastic_weight == pref * (ss.n_s * P) ** 2
    doubled = dsf("k0", P, w, ss, params.replace(N_atoms=2 * params.N_atoms))
    halves = bool(np.all(doubled.inelastic == curve.inelastic / 2)) \
        and doubled.elastic_weight == curve.elastic_weight / 2
    ok = inel_err <= 1e-12 and elastic_exact and halves
    _record(10, ok, f"inelastic max relative error {inel_err:.1e}; elastic exact={elastic_exact}; "
                    f"2N halves both={halves}", time.perf_counter() - t0, 1)


SWEEP_CONFIG = """\
[run]
preset = fig5
allow_unstable = true
seed = 11
[sweep]
Delta = 0:3:61
alpha = 0, 70*pi, 100*pi, 130*pi
"""


def _data_section(path):
    with open(path, encoding="utf-8") as fh:
        return "".join(l for l in fh if not l.startswith("#"))


def _json_payloads(out):
    folder = os.path.join(out, "json")
    result = {}
    for name in sorted(os.listdir(folder)):
        with open(os.path.join(folder, name), "rb") as fh:
            result[name] = fh.read()
    return result


def test_criterion_11_cli_determinism_and_cache(tmp_path):
    t0 = time.perf_counter()
    config = parse_config(SWEEP_CONFIG)
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        t = time.perf_counter()
        first = run(config, "teff", a, workers=1)
        cold = time.perf_counter() - t
        t = time.perf_counter()
        cached = run(config, "teff", a, workers=1)
        warm = time.perf_counter() - t
        second = run(parse_config(SWEEP_CONFIG), "teff", b, workers=1)
    records = len(read_json(first.manifest_path)["records"])
    same_dirs = _data_section(os.path.join(a, "teff_sweep.csv")) == \
        _data_section(os.path.join(b, "teff_sweep.csv")) and _json_payloads(a) == _json_payloads(b)
    speedup = cold / warm
    ok = (records == 244 and first.computed == 244 and cached.cached == 244
          and second.computed == 244 and same_dirs and speedup >= 10)
    _record(11, ok, f"{records} records, {first.failed} failed points; cold {cold:.2f} s, "
                    f"cached {warm:.2f} s, speedup {speedup:.1f}x (want >= 10); "
                    f"byte-identical across runs={same_dirs}", time.perf_counter() - t0, 300)
