"""Mean-field steady state and the bistability threshold.

The mirror position follows from setting the time derivatives of the mirror
rows of the drift equations to zero, q_s = -(g_m / sqrt2) n_s w_m / (w_m^2 + gamma_m^2),
so that Delta = Delta_0 + beta n_s with Delta_0 = delta_tilde + g_a N.  The
photon number then solves

    beta^2 n^3 + 2 Delta_0 beta n^2 + (kappa^2 + Delta_0^2) n - eta^2 = 0.
"""
from dataclasses import dataclass, replace
from enum import Enum
import math

import numpy as np

from .errors import NoRealRoot, ScanRangeExhausted, NegativePower
from .params import HBAR

PUMP_ANGULAR_FREQUENCY = 2 * math.pi * 8.8e6


class Branch(str, Enum):
    LOWER = "Lower"
    MIDDLE = "Middle"
    UPPER = "Upper"


@dataclass(frozen=True)
class SteadyState:
    c_s: complex
    n_s: float
    q_s: float
    Delta: float
    G_m: float
    G_a: float
    branch: Branch = Branch.LOWER
    prescribed: bool = False

    @classmethod
    def prescribed_point(cls, params, Delta, G_m, G_a, n_s=None):
        """Operating point fixed by (Delta, G_m, G_a) rather than solved for.

        Figure presets quote these three numbers directly.  Unless given,
        n_s is the cavity photon number at the prescribed detuning; it only
        enters the drift matrix through the small shift g_a n_s.
        """
        c_s = params.eta / complex(params.kappa, float(Delta))
        if n_s is None:
            n_s = abs(c_s) ** 2
        q_s = (params.delta_tilde + params.g_a * params.N_atoms - Delta) / params.g_m \
            if params.g_m else 0.0
        return cls(c_s=c_s, n_s=float(n_s), q_s=float(q_s), Delta=float(Delta),
                   G_m=float(G_m), G_a=float(G_a), prescribed=True)

    def with_delta(self, Delta):
        """Same couplings at a different effective detuning (figure-style sweep)."""
        return replace(self, Delta=float(Delta), prescribed=True)

    def at_power(self, P, P_ref):
        """Amplitudes rescaled by sqrt(P / P_ref), photon number by P / P_ref, at fixed detuning."""
        if P < 0:
            raise NegativePower(f"pump power must be non-negative (got {P!r})")
        if P_ref <= 0:
            raise NegativePower(f"reference power must be positive (got {P_ref!r})")
        x = P / P_ref
        s = math.sqrt(x)
        return replace(self, c_s=self.c_s * s, n_s=self.n_s * x, q_s=self.q_s * x,
                       G_m=self.G_m * s, G_a=self.G_a * s, prescribed=True)

    def to_dict(self):
        return {
            "c_s": [self.c_s.real, self.c_s.imag],
            "n_s": self.n_s, "q_s": self.q_s, "Delta": self.Delta,
            "G_m": self.G_m, "G_a": self.G_a,
            "branch": self.branch.value, "prescribed": self.prescribed,
        }


def detuning_offset(params):
    return params.delta_tilde + params.g_a * params.N_atoms


def detuning_slope(params):
    return params.g_m ** 2 / (math.sqrt(2.0) * (1.0 + params.gamma_m ** 2))


def cubic_coefficients(params, eta=None):
    """(a, b, c, d) of the photon-number cubic, highest power first."""
    eta = params.eta if eta is None else eta
    d0 = detuning_offset(params)
    beta = detuning_slope(params)
    return beta ** 2, 2.0 * d0 * beta, params.kappa ** 2 + d0 ** 2, -eta ** 2


def cubic_discriminant(a, b, c, d):
    return 18 * a * b * c * d - 4 * b ** 3 * d + b * b * c * c - 4 * a * c ** 3 - 27 * a * a * d * d


def _polish(n, coeffs, steps=3):
    a, b, c, d = coeffs
    for _ in range(steps):
        f = ((a * n + b) * n + c) * n + d
        df = (3 * a * n + 2 * b) * n + c
        if df == 0:
            break
        n -= f / df
    return n


def _real_roots(coeffs):
    a, b, c, d = coeffs
    if a == 0:
        return [-d / c]
    poly = [a, b, c, d]
    while True:
        # a vanishing leading term sends its roots past float range; drop it and retry
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            try:
                roots = np.roots(poly)
                break
            except np.linalg.LinAlgError:
                poly = poly[1:]
    roots = roots[np.isfinite(roots)]
    scale = max(1.0, np.max(np.abs(roots)))
    real = sorted(r.real for r in roots if abs(r.imag) <= 1e-9 * scale)
    return [float(_polish(r, coeffs)) for r in real]


def _state_from_n(n, params, branch):
    d0 = detuning_offset(params)
    q_s = -(params.g_m / math.sqrt(2.0)) * n / (1.0 + params.gamma_m ** 2)
    Delta = d0 - params.g_m * q_s
    c_s = params.eta / complex(params.kappa, Delta)
    n_s = abs(c_s) ** 2
    amp = math.sqrt(2.0) * abs(c_s)
    return SteadyState(c_s=complex(c_s), n_s=float(n_s), q_s=float(q_s), Delta=float(Delta),
                       G_m=float(amp * params.g_m), G_a=float(amp * params.g_a), branch=branch)


def steady_state_branches(params):
    """All physical (real, non-negative) steady states ordered by photon number."""
    if params.eta < 0:
        raise NegativePower(f"eta must be non-negative (got {params.eta!r})")
    coeffs = cubic_coefficients(params)
    roots = [r for r in _real_roots(coeffs) if r >= -1e-14]
    if not roots:
        raise NoRealRoot(f"photon-number cubic {coeffs} has no non-negative real root")
    roots = [max(r, 0.0) for r in roots]
    if len(roots) == 3:
        labels = (Branch.LOWER, Branch.MIDDLE, Branch.UPPER)
    elif len(roots) == 2:
        # tangent double root at the edge of the bistable window
        labels = (Branch.LOWER, Branch.UPPER)
    else:
        labels = (Branch.LOWER,)
    return [_state_from_n(n, params, lab) for n, lab in zip(roots, labels)]


def steady_state(params):
    """Operating point: the outer branch closest to the uncoupled photon number."""
    branches = [s for s in steady_state_branches(params) if s.branch is not Branch.MIDDLE]
    d0 = detuning_offset(params)
    n0 = params.eta ** 2 / (params.kappa ** 2 + d0 ** 2)
    return min(branches, key=lambda s: abs(s.n_s - n0))


@dataclass(frozen=True)
class BistabilityResult:
    found: bool
    eta_cr: float = float("nan")
    P_cr: float = float("nan")
    reason: str = ""


def pump_power_from_eta(eta, params, omega_p=PUMP_ANGULAR_FREQUENCY):
    """Absolute pump power (W) for a normalized pump amplitude: |eta|^2 hbar w_p / kappa."""
    eta_abs = eta * params.omega_m
    kappa_abs = params.kappa * params.omega_m
    return eta_abs ** 2 * HBAR * omega_p / kappa_abs


def bistability_threshold(params, eta_min=1e-6, eta_max=1e3, n_scan=400, rtol=1e-6,
                          omega_p=PUMP_ANGULAR_FREQUENCY):
    """Smallest pump amplitude at which the photon-number cubic has three real roots."""
    if not 0 < eta_min < eta_max:
        raise ValueError("scan bounds must satisfy 0 < eta_min < eta_max")
    beta = detuning_slope(params)
    d0 = detuning_offset(params)
    if beta == 0.0:
        return BistabilityResult(False, reason="no back-action: cubic is linear")
    if d0 >= -math.sqrt(3.0) * params.kappa:
        return BistabilityResult(False, reason="detuning too small for bistability")

    def disc(eta):
        return cubic_discriminant(*cubic_coefficients(params, eta))

    etas = np.geomspace(eta_min, eta_max, n_scan)
    # a narrow window near the cusp can fall between scan points, so also probe
    # its centre: the folds of m (kappa^2 + (d0 + m)^2) = beta eta^2 with m = beta n
    folds = np.roots([3.0, 4.0 * d0, params.kappa ** 2 + d0 ** 2]).real
    centre = np.mean([m * (params.kappa ** 2 + (d0 + m) ** 2) for m in folds])
    eta_centre = math.sqrt(centre / beta)
    if eta_min < eta_centre < eta_max:
        etas = np.sort(np.append(etas, eta_centre))
    signs = np.array([disc(e) > 0 for e in etas])
    if signs[0]:
        lo, hi = 0.0, eta_min
    else:
        idx = np.flatnonzero(signs)
        if idx.size == 0:
            raise ScanRangeExhausted(
                f"no three-root window for eta in [{eta_min}, {eta_max}]")
        lo, hi = etas[idx[0] - 1], etas[idx[0]]
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if disc(mid) > 0:
            hi = mid
        else:
            lo = mid
    eta_cr = float(0.5 * (lo + hi))
    return BistabilityResult(True, eta_cr=eta_cr,
                             P_cr=pump_power_from_eta(eta_cr, params, omega_p))
