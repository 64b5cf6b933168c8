"""Physical parameters, unit normalization and noise kernels.

All rates are stored in units of the mechanical frequency ``omega_m`` with
hbar = 1; ``omega_m`` itself is kept as an absolute angular frequency (rad/s)
so results can be converted back to SI at the I/O boundary.
"""
from dataclasses import dataclass, fields, replace, asdict
from enum import Enum
import math

import numpy as np
from scipy import constants

from .errors import NonPositiveRate, NonFiniteInput, NegativePower

HBAR = constants.hbar
K_B = constants.k

# Fields that are angular rates and get divided by omega_m on normalization.
RATE_FIELDS = (
    "kappa", "gamma_m", "gamma_a", "delta_tilde", "eta", "g_m", "g_a",
    "alpha", "Omega_z", "delta_R", "Omega_rec", "U",
)
# Fields passed through unchanged (dimensionless or SI).
PLAIN_FIELDS = ("alpha_tilde", "epsilon", "N_atoms", "T_bath", "m_mirror")

_STRICTLY_POSITIVE = ("omega_m", "kappa", "gamma_m", "N_atoms", "m_mirror")
_NON_NEGATIVE = ("gamma_a", "T_bath")


@dataclass(frozen=True)
class ModelParams:
    """Model parameters in normalized units (rates in units of omega_m).

    Defaults reproduce the parameter set shared by the band-structure and
    atomic noise-spectrum figures: N = 1.8e5 Rb atoms, kappa = 0.1,
    gamma_m = 0.05, gamma_a = 0.01, U = 5.5, epsilon = 0.1, T = 300 K and
    omega_m = 2*pi*3.8 kHz.  Values the figures never fix (``delta_tilde``,
    ``eta``, ``g_a``, ``m_mirror``) are set to something that gives a
    well-defined, bistable-capable cavity.
    """

    omega_m: float = 2 * math.pi * 3.8e3
    kappa: float = 0.1
    gamma_m: float = 0.05
    gamma_a: float = 0.01
    delta_tilde: float = -1.0
    eta: float = 0.5
    g_m: float = 0.1
    g_a: float = 1e-6
    alpha: float = 0.0
    alpha_tilde: float = 20 * math.pi
    Omega_z: float = 1.0
    delta_R: float = 1.0
    Omega_rec: float = 70.8
    U: float = 5.5
    epsilon: float = 0.1
    N_atoms: float = 1.8e5
    T_bath: float = 300.0
    m_mirror: float = 1e-12

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise NonFiniteInput(f.name, value)
        for name in _STRICTLY_POSITIVE:
            if getattr(self, name) <= 0:
                raise NonPositiveRate(name, getattr(self, name))
        for name in _NON_NEGATIVE:
            if getattr(self, name) < 0:
                raise NonPositiveRate(name, getattr(self, name))

    @property
    def kbT_norm(self):
        """k_B T / (hbar omega_m); recomputed on every access."""
        return K_B * self.T_bath / (HBAR * self.omega_m)

    @property
    def resolved_sideband(self):
        return self.kappa < 1.0

    @property
    def atomic_diagonal(self):
        """Bare atomic drift entry Omega/2 + U N (1 - eps) - gamma_a (no photon term)."""
        return (0.5 * self.Omega_rec + self.U * self.N_atoms * (1.0 - self.epsilon)
                - self.gamma_a)

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def field_names(cls):
        return tuple(f.name for f in fields(cls))


def normalize_params(raw):
    """Build :class:`ModelParams` from absolute quantities.

    ``raw`` maps field names to values where every rate (see ``RATE_FIELDS``)
    is an angular frequency in rad/s.  ``omega_m`` is required.  Missing keys
    fall back to the normalized defaults.

    >>> p = normalize_params({"omega_m": 2 * math.pi * 3800, "kappa": 2 * math.pi * 380})
    >>> round(p.kappa, 12)
    0.1
    """
    raw = dict(raw)
    if "omega_m" not in raw:
        raise NonPositiveRate("omega_m", None)
    omega_m = float(raw.pop("omega_m"))
    if not math.isfinite(omega_m):
        raise NonFiniteInput("omega_m", omega_m)
    if omega_m <= 0:
        raise NonPositiveRate("omega_m", omega_m)

    known = set(RATE_FIELDS) | set(PLAIN_FIELDS)
    unknown = set(raw) - known
    if unknown:
        raise KeyError(f"unknown parameter(s): {sorted(unknown)}")

    values = {"omega_m": omega_m}
    for name, value in raw.items():
        value = float(value)
        if not math.isfinite(value):
            raise NonFiniteInput(name, value)
        values[name] = value / omega_m if name in RATE_FIELDS else value
    return ModelParams(**values)


def to_absolute(params):
    """Inverse of :func:`normalize_params`: rates back in rad/s."""
    out = {"omega_m": params.omega_m}
    for name in RATE_FIELDS:
        out[name] = getattr(params, name) * params.omega_m
    for name in PLAIN_FIELDS:
        out[name] = getattr(params, name)
    return out


def brownian_psd(omega, params):
    """Thermal mirror kernel gamma_m * w * (1 + coth(w / 2 kT)), w in units of omega_m.

    The removable point w = 0 takes its limit 2 gamma_m kT.  For T = 0 the
    kernel is 2 gamma_m w for w > 0 and 0 for w < 0.
    """
    w = np.asarray(omega, dtype=float)
    gm = params.gamma_m
    kT = params.kbT_norm
    if kT == 0.0:
        out = np.where(w > 0, 2.0 * gm * w, 0.0)
        return out if out.ndim else float(out)

    x = w / (2.0 * kT)
    small = np.abs(x) < 1e-6
    xs = np.where(small, 1.0, x)
    # w * coth(x) = 2 kT * x / tanh(x)
    x_coth = np.where(small, 1.0 + x * x / 3.0, xs / np.tanh(xs))
    out = gm * (w + 2.0 * kT * x_coth)
    return out if out.ndim else float(out)


class KernelKind(str, Enum):
    MARKOVIAN_FLAT = "MarkovianFlat"
    BROWNIAN_COTH = "BrownianCoth"


@dataclass(frozen=True)
class NoiseKernel:
    kind: KernelKind
    scale: float = 1.0

    def __call__(self, omega, params):
        if self.kind is KernelKind.MARKOVIAN_FLAT:
            return self.scale * np.ones_like(np.asarray(omega, dtype=float))
        return self.scale * brownian_psd(omega, params)


def input_noise_kernels(params):
    """Noise PSD seen by each fluctuation equation, keyed by source.

    The squared amplitude of each entry of the Langevin force vector is folded
    into ``scale``; the delta-correlated inputs also carry the 2*pi that the
    Fourier convention puts in front of white noise.
    """
    two_pi = 2.0 * math.pi
    return {
        "cavity": NoiseKernel(KernelKind.MARKOVIAN_FLAT, two_pi * 2.0 * params.kappa),
        "mirror": NoiseKernel(KernelKind.BROWNIAN_COTH, 4.0 * params.gamma_m),
        "atom": NoiseKernel(KernelKind.MARKOVIAN_FLAT, two_pi * 4.0 * params.gamma_a),
    }


def coupling_from_power(P, P_ref, params, Delta, scale=1.0):
    """Pump-power dependent dressed couplings (G_m, G_a) in units of omega_m.

    G_m = s * sqrt(x kappa / (omega_m (kappa^2 + Delta^2)^2)) and the atomic
    analog with the recoil frequency in place of omega_m, where x = P / P_ref.
    The dimensional prefactor (2 omega_c / L) / sqrt(m omega_p) is absorbed
    into ``P_ref`` and ``scale``.
    """
    if P < 0:
        raise NegativePower(f"pump power must be non-negative (got {P!r})")
    if P_ref <= 0:
        raise NegativePower(f"reference power must be positive (got {P_ref!r})")
    if params.Omega_rec <= 0:
        raise NonPositiveRate("Omega_rec", params.Omega_rec)
    x = P / P_ref
    d2 = (params.kappa ** 2 + Delta ** 2) ** 2
    G_m = scale * math.sqrt(x * params.kappa / (1.0 * d2))
    G_a = scale * math.sqrt(x * params.kappa / (params.Omega_rec * d2))
    return G_m, G_a
