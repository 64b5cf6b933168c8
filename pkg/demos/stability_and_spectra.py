"""Drift matrix, stability, and two independent routes to the noise spectra.

Run with ``python3 demos/stability_and_spectra.py``.
"""
import numpy as np

from spinoptomech import (SteadyState, drift_matrix, eigen_stability, routh_hurwitz_flags,
                          dns_mirror, dns_atomic, resolvent_spectrum, presets, Observable, Spin)

# A weakly coupled point with a damped atomic block is stable.
params, _ = presets.thermal()
ss = SteadyState.prescribed_point(params, Delta=0.05, G_m=0.02, G_a=0.03)
ds = drift_matrix(ss, params)
verdict = eigen_stability(ds)
print(f"stable: {verdict.stable}, margin max Re(lambda) = {verdict.margin:.5f}")
print("printed inequality flags:", routh_hurwitz_flags(ds, params).flags)

# Closed-form transfer functions against a direct solve of (i w - K)^-1.
w = np.linspace(-5, 5, 2001)
for obs, closed in ((Observable.MIRROR, dns_mirror(w, None, ss, params)),
                    (Observable.SPIN_UP, dns_atomic(w, None, Spin.UP, ss, params))):
    ref = resolvent_spectrum(obs, w, ds).values
    print(f"{obs.value:>10}: max relative difference {np.max(np.abs(closed - ref) / ref):.2e}")

# The mirror resonance sits at the mechanical frequency.
s = dns_mirror(w, None, ss, params)
print(f"mirror spectrum peaks at |w| = {abs(w[np.argmax(s)]):.3f}")

# The quoted figure operating points have a large positive atomic diagonal.
params, ss = presets.fig3()
v = eigen_stability(drift_matrix(ss, params))
print(f"\nfig3 preset: stable = {v.stable}, margin = {v.margin:.4g}")
