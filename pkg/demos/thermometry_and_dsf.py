"""Effective mirror temperature and the structure factor from output light.

Run with ``python3 demos/thermometry_and_dsf.py``.
"""
import warnings

import numpy as np

from spinoptomech import SteadyState, effective_temperature, dsf, presets, sideband_peaks

# Equilibrium check: with every coupling off, T_eff is linear in the bath temperature.
params, ss = presets.thermal(300.0)
for T in (150.0, 300.0, 600.0):
    r = effective_temperature(ss, params.replace(T_bath=T))
    print(f"T_bath = {T:5.0f} K -> T_eff = {r.T_eff:.4f} K  (var_q = {r.var_q:.4e})")

# Detuning scan on the fig5 preset; the point is unstable, so opt in explicitly.
params, ss = presets.fig5()
deltas = np.arange(0.5, 2.51, 0.25)
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    temps = [effective_temperature(ss, params, Delta=D, allow_unstable=True).T_eff
             for D in deltas]
print("\nfig5 preset, T_eff vs detuning")
for D, T in zip(deltas, temps):
    print(f"  Delta = {D:4.2f}: {T:.5g} K")

# Structure factor: a decoupled cavity gives the two-Lorentzian shot-noise shape.
params, _ = presets.thermal()
params = params.replace(eta=0.5)
ss = SteadyState.prescribed_point(params, Delta=0.05, G_m=0.0, G_a=0.0, n_s=1.0)
w = np.linspace(-5, 5, 2001)
curve = dsf("k0", 1.0, w, ss, params)
print(f"\nDSF prefactor {curve.prefactor:.4e}, elastic weight {curve.elastic_weight:.4e}")
print(f"inelastic peak {curve.inelastic.max():.4e} at w = {w[np.argmax(curve.inelastic)]:.3f}")

# The fig6 output combination is negative here, so no positive sideband exists.
params, ss = presets.fig6()
curve = dsf("k0", 3.0, w, ss, params, allow_unstable=True)
print(f"fig6 preset at P = 3: {curve.warning_flags.mean():.0%} of the grid flagged negative;",
      "sidebands:", sideband_peaks(w, curve.inelastic))
