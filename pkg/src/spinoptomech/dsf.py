"""Dynamic structure factor reconstructed from the output-light spectrum.

S_D(k, w) = [4 (kappa^2 + Delta^2) / (N eta^2)] (S_out(w) / 2pi + n_s^2 delta(w)).
The delta-function term is kept as a separate scalar weight and never placed
on the frequency grid.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import ZeroPump
from .spectra import Mode, output_dns


@dataclass(frozen=True)
class DsfCurve:
    k_label: str
    omega_grid: np.ndarray
    inelastic: np.ndarray
    elastic_weight: float
    prefactor: float
    warning_flags: np.ndarray
    mode: Mode = Mode.CORRECTED
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "k_label": self.k_label,
            "elastic_weight": self.elastic_weight,
            "prefactor": self.prefactor,
            "mode": self.mode.value,
            "n_warnings": int(np.count_nonzero(self.warning_flags)),
            **self.metadata,
        }


def dsf_prefactor(Delta, eta, params):
    if eta == 0:
        raise ZeroPump("eta = 0 leaves the structure-factor prefactor undefined")
    return 4.0 * (params.kappa ** 2 + Delta ** 2) / (params.N_atoms * eta ** 2)


def dsf(k_label, P, omega_grid, ss, params, mode=Mode.CORRECTED, P_ref=1.0,
        allow_unstable=False):
    """Inelastic structure factor on a grid plus the elastic weight.

    ``ss`` holds the operating point at ``P_ref``.  At power P the pump
    amplitude is eta sqrt(P / P_ref) and the photon number n_s P / P_ref.
    """
    mode = Mode(mode)
    w = np.asarray(omega_grid, dtype=float)
    if P_ref <= 0:
        raise ValueError("reference power must be positive")
    eta = params.eta * math.sqrt(P / P_ref)
    pref = dsf_prefactor(ss.Delta, eta, params)
    s_out = np.asarray(output_dns(P, w, ss, params, mode, P_ref, allow_unstable), dtype=float)
    n_s = ss.at_power(P, P_ref).n_s
    return DsfCurve(k_label=str(k_label), omega_grid=w,
                    inelastic=pref * s_out / (2.0 * math.pi),
                    elastic_weight=pref * n_s ** 2, prefactor=pref,
                    warning_flags=s_out < 0, mode=mode,
                    metadata={"P": P, "P_ref": P_ref, "n_s": n_s})
