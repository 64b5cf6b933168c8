"""Density-noise spectra of the atomic, mirror and output-light quadratures.

Two evaluation paths are provided:

* the closed form, built from explicit transfer functions of the linearized
  quantum Langevin equations, and
* the resolvent, S(w) = [H N H^dagger]_ii with H = (i w - K)^-1, which only
  needs the drift matrix and serves as an independent check.

The closed form runs in one of two modes.  ``Mode.CORRECTED`` uses transfer
functions that solve the drift equations exactly, weights each noise channel
by the squared magnitude of its coefficient, and agrees with the resolvent.
``Mode.AS_PRINTED`` composes the auxiliary functions A, B, C, L1..L4, A_m,
B_m, C_m literally and weights them as the literature spectral formulas do
(unsquared L and B_m coefficients, thermal kernel on L1/L3 and C_m).  It is
kept for literature comparison and may return negative or complex values; the
real part is returned and negative entries are flagged.

Frequencies are in units of omega_m and the Fourier convention is
d/dt -> i w.
"""
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .errors import SingularResolvent, UnstableOperatingPoint
from .params import brownian_psd
from .stability import drift_matrix, eigen_stability, atomic_diagonal


class Mode(str, Enum):
    CORRECTED = "corrected"
    AS_PRINTED = "as-printed"


class Observable(str, Enum):
    SPIN_UP = "SpinUp"
    SPIN_DOWN = "SpinDown"
    MIRROR = "Mirror"
    OUTPUT = "Output"


class Path(str, Enum):
    CLOSED_FORM = "ClosedForm"
    RESOLVENT = "Resolvent"


class Spin(str, Enum):
    UP = "Up"
    DOWN = "Down"


OBSERVABLE_INDEX = {Observable.SPIN_UP: 4, Observable.SPIN_DOWN: 6,
                    Observable.MIRROR: 2, Observable.OUTPUT: 0}

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SpectrumSeries:
    observable: Observable
    omega_grid: np.ndarray
    values: np.ndarray
    path: Path
    mode: Mode
    warning_flags: np.ndarray = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.omega_grid) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if self.warning_flags is None:
            object.__setattr__(self, "warning_flags", np.zeros(self.values.shape, dtype=bool))

    @property
    def has_warnings(self):
        return bool(np.any(self.warning_flags))


def default_grid(n=2001, span=5.0):
    return np.linspace(-span, span, n)


def _require_stable(ss, params, allow_unstable):
    if allow_unstable:
        return
    verdict = eigen_stability(drift_matrix(ss, params))
    if not verdict.stable:
        raise UnstableOperatingPoint(verdict.margin)


def _at_delta(ss, Delta):
    return ss if Delta is None or Delta == ss.Delta else ss.with_delta(Delta)


def _scalar_or_array(x, like):
    return x if np.ndim(like) else x.item()


# -- printed auxiliary functions ---------------------------------------------

@dataclass(frozen=True)
class AuxFunctions:
    omega: np.ndarray
    L: np.ndarray
    W: np.ndarray
    Kfun: np.ndarray
    Smfun: np.ndarray
    A_up: np.ndarray
    A_dn: np.ndarray
    B_up: np.ndarray
    B_dn: np.ndarray
    C: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    L3: np.ndarray
    L4: np.ndarray
    A_m: np.ndarray
    B_m: np.ndarray
    C_m: np.ndarray
    X: np.ndarray
    X_m: np.ndarray


def aux_functions(omega, ss, params, kfun="printed"):
    """Auxiliary frequency-domain functions, composed verbatim from the literature form.

    ``kfun="printed"`` uses K = W^2 + (alpha^2 - delta/2)^2; ``kfun="drift"``
    uses (alpha - delta/2)^2, the combination that appears in the drift
    matrix.  A_m is the first B_m expression of the two literature expressions (the one
    carrying sqrt(2 kappa), i.e. the cavity-input coefficient); B_m is the
    second.
    """
    w = np.asarray(omega, dtype=float)
    s = 1j * w
    kappa, Delta = params.kappa, ss.Delta
    G_m, G_a = ss.G_m, ss.G_a
    gm, ga = params.gamma_m, params.gamma_a
    Oz, alpha, dR = params.Omega_z, params.alpha, params.delta_R
    v = params.g_a * ss.n_s
    gs = gm + s

    L = (kappa + s) ** 2 - Delta ** 2
    W = ga + s - 0.5 * params.Omega_rec - v - params.U * params.N_atoms * (1 - params.epsilon)
    if kfun == "printed":
        so = alpha ** 2 - 0.5 * dR
    elif kfun == "drift":
        so = alpha - 0.5 * dR
    else:
        raise ValueError(f"unknown kfun variant {kfun!r}")
    Kf = W ** 2 + so ** 2
    Sm = gs ** 2 * L - L * 1.0 ** 2 + 2 * G_m ** 2 * Delta * gs

    common_a = 4 * W * Kf * L * Sm - 8 * G_a ** 2 * Delta * Kf * Sm \
        + 16 * G_a ** 2 * Delta ** 2 * G_m ** 2 * gs * Kf
    A_up = common_a + Oz ** 2 * L * Sm
    A_dn = common_a - Oz ** 2 * L * Sm
    common_b = 8 * G_a ** 2 * Delta * Kf * Sm - 16 * G_a ** 2 * Delta ** 2 * G_m ** 2 * gs * Kf
    B_up = Oz ** 2 * L * Sm + 4 * (alpha - 0.5 * dR) * Kf * L * Sm + common_b
    B_dn = -Oz ** 2 * L * Sm + 4 * (-alpha + 0.5 * dR) * Kf * L * Sm + common_b

    r2k = math.sqrt(2 * kappa)
    C = 8 * G_a ** 2 * r2k * Kf * Sm + 16 * G_a ** 2 * r2k * G_m ** 2 * gs * Kf
    pair_up = B_up + A_dn
    pair_dn = B_dn + A_up
    mirror_w = 8 * G_a ** 2 * math.sqrt(gm) * Delta * Kf * L * gs
    atom_w = 8 * G_a ** 2 * math.sqrt(ga) * Kf * Sm
    L1, L3 = pair_up * mirror_w, pair_dn * mirror_w
    L2, L4 = pair_up * atom_w, pair_dn * atom_w

    X = A_up * A_dn + B_up * B_dn
    A_m = 2 * G_m * r2k * gs * X + 2 * G_m * Delta * G_a * (A_up + A_dn + B_up + B_dn)
    B_m = 2 * G_m * Delta * G_a * (L1 + L3) + 2 * math.sqrt(gm) * L * X
    C_m = 2 * G_m * Delta * G_a * (L2 + L4)
    X_m = X * Sm
    return AuxFunctions(omega=w, L=L, W=W, Kfun=Kf, Smfun=Sm, A_up=A_up, A_dn=A_dn,
                        B_up=B_up, B_dn=B_dn, C=C, L1=L1, L2=L2, L3=L3, L4=L4,
                        A_m=A_m, B_m=B_m, C_m=C_m, X=X, X_m=X_m)


def _as_printed_atomic(w, spin, aux, ss, params):
    cav = ss.Delta ** 2 + params.kappa ** 2 + w ** 2
    if spin is Spin.UP:
        b, a, l_flat, l_th = aux.B_up, aux.A_dn, aux.L2, aux.L1
    else:
        b, a, l_flat, l_th = aux.B_dn, aux.A_up, aux.L4, aux.L3
    num = TWO_PI * np.abs(aux.C) ** 2 * (np.abs(b) ** 2 + np.abs(a) ** 2) * cav \
        + TWO_PI * l_flat + l_th * brownian_psd(w, params)
    return (num / np.abs(aux.X) ** 2).real


def _as_printed_mirror(w, aux, ss, params):
    cav = ss.Delta ** 2 + params.kappa ** 2 + w ** 2
    num = np.abs(aux.A_m) ** 2 * cav + TWO_PI * aux.B_m + aux.C_m * brownian_psd(w, params)
    return (num / np.abs(aux.X_m) ** 2).real


# -- exact transfer functions --------------------------------------------------

@dataclass(frozen=True)
class TransferFunctions:
    """Responses of (q_up, q_dn, q_m) to each independent noise input.

    Keys of each dict: "qin", "pin" (cavity input quadratures, already
    multiplied by sqrt(2 kappa)), "fm" (mirror Brownian force, times
    2 sqrt(gamma_m)) and "fup", "fdn" (atomic forces, times 2 sqrt(gamma_a)).
    ``det`` is det(i w - K).
    """
    q_up: dict
    q_dn: dict
    q_m: dict
    det: np.ndarray


def transfer_functions(omega, ss, params):
    w = np.asarray(omega, dtype=float)
    s = 1j * w
    kappa, Delta = params.kappa, ss.Delta
    G_m, G_a = ss.G_m, ss.G_a
    gs = params.gamma_m + s
    om = 1.0
    M = atomic_diagonal(ss, params)
    h = 0.5 * params.Omega_z
    a = params.alpha - 0.5 * params.delta_R

    L = (kappa + s) ** 2 - Delta ** 2
    W = s - M
    Kf = W ** 2 + a ** 2
    D_m = gs ** 2 + om ** 2
    S_m = L * D_m - 2 * G_m ** 2 * Delta * gs
    det_a = (Kf + h ** 2) ** 2 - 4 * W ** 2 * h ** 2
    p_up = W * (Kf - h ** 2) + a * (Kf + h ** 2)
    p_dn = W * (Kf - h ** 2) - a * (Kf + h ** 2)
    X = S_m * det_a - 2 * G_a ** 2 * Delta * D_m * (p_up + p_dn)
    if np.any(X == 0):
        raise SingularResolvent("drift characteristic polynomial vanishes on the grid")
    r = h * (W ** 2 - a ** 2 - h ** 2)
    c = 2 * W * a * h
    feed = 2 * G_a ** 2 * Delta * D_m

    amp_c = math.sqrt(2 * kappa)
    amp_m = 2 * math.sqrt(params.gamma_m)
    amp_a = 2 * math.sqrt(params.gamma_a)

    def atom(p, n_up, n_dn):
        xi = 2 * G_a * p * D_m / X
        return {
            "qin": amp_c * xi * (kappa + s),
            "pin": amp_c * xi * Delta,
            "fm": -amp_m * 2 * G_a * p * Delta * G_m * om / X,
            "fup": amp_a * n_up / X,
            "fdn": amp_a * n_dn / X,
        }

    q_up = atom(p_up, feed * (-h * (W + a)) + r * S_m, feed * h * (a - W) - c * S_m)
    q_dn = atom(p_dn, feed * h * (W + a) - c * S_m, feed * h * (W - a) - r * S_m)
    xi_m = -2 * G_m * gs * det_a / X
    mix = -2 * G_m * G_a * Delta * gs
    q_m = {
        "qin": amp_c * xi_m * (kappa + s),
        "pin": amp_c * xi_m * Delta,
        "fm": amp_m * om * (L * det_a - 2 * G_a ** 2 * Delta * (p_up + p_dn)) / X,
        "fup": amp_a * mix * (r - c) / X,
        "fdn": amp_a * mix * (-c - r) / X,
    }
    return TransferFunctions(q_up=q_up, q_dn=q_dn, q_m=q_m, det=X)


def _psd_from_transfer(w, coeffs, params):
    flat = TWO_PI
    return (flat * (np.abs(coeffs["qin"]) ** 2 + np.abs(coeffs["pin"]) ** 2
                    + np.abs(coeffs["fup"]) ** 2 + np.abs(coeffs["fdn"]) ** 2)
            + np.abs(coeffs["fm"]) ** 2 * brownian_psd(w, params))


# -- public spectra --------------------------------------------------------------

def dns_atomic(omega, Delta, spin, ss, params, mode=Mode.CORRECTED, allow_unstable=False):
    """Density-noise spectrum of the spin-up or spin-down position quadrature.

    ``Delta`` overrides the detuning of ``ss`` (couplings held fixed); pass
    None to use ``ss.Delta`` as is.
    """
    spin, mode = Spin(spin), Mode(mode)
    ss = _at_delta(ss, Delta)
    _require_stable(ss, params, allow_unstable)
    w = np.asarray(omega, dtype=float)
    if mode is Mode.CORRECTED:
        tf = transfer_functions(w, ss, params)
        out = _psd_from_transfer(w, tf.q_up if spin is Spin.UP else tf.q_dn, params)
    else:
        out = _as_printed_atomic(w, spin, aux_functions(w, ss, params), ss, params)
    return _scalar_or_array(out, omega)


def dns_mirror(omega, Delta, ss, params, mode=Mode.CORRECTED, allow_unstable=False):
    """Density-noise spectrum of the mirror position quadrature."""
    mode = Mode(mode)
    ss = _at_delta(ss, Delta)
    _require_stable(ss, params, allow_unstable)
    w = np.asarray(omega, dtype=float)
    if mode is Mode.CORRECTED:
        out = _psd_from_transfer(w, transfer_functions(w, ss, params).q_m, params)
    else:
        out = _as_printed_mirror(w, aux_functions(w, ss, params), ss, params)
    return _scalar_or_array(out, omega)


def output_dns(P, omega, ss, params, mode=Mode.CORRECTED, P_ref=1.0, allow_unstable=False):
    """Output-light spectrum assembled from the atomic and mirror spectra.

    ``ss`` carries the couplings at ``P_ref``; they are rescaled by
    sqrt(P / P_ref) at fixed detuning.  The combination is the literature one
    and is not a PSD: the -G_m S_m term can drive it negative, and negative
    values are returned unclamped.
    """
    ss = ss.at_power(P, P_ref)
    _require_stable(ss, params, allow_unstable)
    w = np.asarray(omega, dtype=float)
    kappa, Delta = params.kappa, ss.Delta
    L = (kappa + 1j * w) ** 2 - Delta ** 2
    s_up = dns_atomic(w, None, Spin.UP, ss, params, mode, allow_unstable=True)
    s_dn = dns_atomic(w, None, Spin.DOWN, ss, params, mode, allow_unstable=True)
    s_m = dns_mirror(w, None, ss, params, mode, allow_unstable=True)
    shot = kappa ** 2 + w ** 2 + Delta ** 2 + 2 * kappa * Delta
    back = 4 * kappa * Delta * (ss.G_a * s_up + ss.G_a * s_dn - ss.G_m * s_m)
    out = TWO_PI / np.abs(L) ** 2 * (shot + back)
    return _scalar_or_array(out, omega)


def spectrum_series(observable, omega_grid, ss, params, mode=Mode.CORRECTED, P=1.0,
                    P_ref=1.0, allow_unstable=False):
    """Closed-form spectrum on a grid, wrapped with provenance and warning flags."""
    observable, mode = Observable(observable), Mode(mode)
    w = np.asarray(omega_grid, dtype=float)
    if observable is Observable.SPIN_UP:
        values = dns_atomic(w, None, Spin.UP, ss, params, mode, allow_unstable)
    elif observable is Observable.SPIN_DOWN:
        values = dns_atomic(w, None, Spin.DOWN, ss, params, mode, allow_unstable)
    elif observable is Observable.MIRROR:
        values = dns_mirror(w, None, ss, params, mode, allow_unstable)
    else:
        values = output_dns(P, w, ss, params, mode, P_ref, allow_unstable)
    values = np.asarray(values, dtype=float)
    meta = {"operating_point": ss.to_dict()}
    if observable is Observable.OUTPUT:
        meta.update(P=P, P_ref=P_ref)
    return SpectrumSeries(observable=observable, omega_grid=w, values=values,
                          path=Path.CLOSED_FORM, mode=mode,
                          warning_flags=values < 0, metadata=meta)


# -- resolvent oracle ------------------------------------------------------------

def _noise_diagonal(w, ds, params):
    n = np.zeros((w.size, 8))
    for j, kernel in enumerate(ds.noise_map):
        if kernel is not None:
            n[:, j] = kernel(w, params)
    return n


def resolvent_spectrum(observable, omega_grid, ds, params=None, allow_unstable=False):
    """PSD of one quadrature straight from the drift matrix.

    S(w) = sum_j |H_ij(w)|^2 N_jj(w) with H = (i w I - K)^-1 and N the
    diagonal noise matrix assembled from ``ds.noise_map``.  The Output
    observable is the output quadrature sqrt(2 kappa) q_c - q_in.
    """
    observable = Observable(observable)
    params = ds.params if params is None else params
    if not allow_unstable:
        verdict = eigen_stability(ds)
        if not verdict.stable:
            raise UnstableOperatingPoint(verdict.margin)
    w = np.asarray(omega_grid, dtype=float)
    K = ds.K
    idx = OBSERVABLE_INDEX[observable]
    # rows of H are solutions of (i w I - K)^T y = e_idx
    mats = 1j * w[:, None, None] * np.eye(8) - K.T[None, :, :]
    rhs = np.zeros((w.size, 8, 1), dtype=complex)
    rhs[:, idx, 0] = 1.0
    try:
        rows = np.linalg.solve(mats, rhs)[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularResolvent(str(exc)) from exc
    if not np.all(np.isfinite(rows)):
        raise SingularResolvent("resolvent is not finite on the grid")
    if observable is Observable.OUTPUT:
        r2k = math.sqrt(2 * params.kappa)
        rows = r2k * rows
        rows[:, 0] -= 1.0 / r2k
    noise = _noise_diagonal(w, ds, params)
    values = np.sum(np.abs(rows) ** 2 * noise, axis=1)
    floor = 1e-12 * max(1.0, float(np.max(np.abs(values))))
    values = np.where((values < 0) & (values >= -floor), 0.0, values)
    return SpectrumSeries(observable=observable, omega_grid=w, values=values,
                          path=Path.RESOLVENT, mode=Mode.CORRECTED,
                          warning_flags=values < 0,
                          metadata={"operating_point": ds.ss.to_dict() if ds.ss else None})


# -- peak finding ---------------------------------------------------------------

@dataclass(frozen=True)
class SidebandPeaks:
    omega_minus: float
    omega_plus: float
    value_minus: float
    value_plus: float

    @property
    def mean_abs_omega(self):
        return 0.5 * (abs(self.omega_minus) + abs(self.omega_plus))


def sideband_peaks(omega, values, min_abs_omega=0.05, positive_only=True):
    """Largest local maximum on each side of w = 0.

    Points with |w| < ``min_abs_omega`` are ignored so a central feature is
    not mistaken for a sideband.  With ``positive_only`` only maxima with a
    positive value count (negative regions of a non-PSD combination are
    excluded).  Missing sidebands come back as NaN.
    """
    w = np.asarray(omega, dtype=float)
    v = np.asarray(values, dtype=float)
    interior = np.zeros(v.shape, dtype=bool)
    interior[1:-1] = (v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])
    if positive_only:
        interior &= v > 0
    result = []
    for side in (w <= -min_abs_omega, w >= min_abs_omega):
        cand = np.flatnonzero(interior & side)
        if cand.size == 0:
            result.append((float("nan"), float("nan")))
            continue
        best = cand[np.argmax(v[cand])]
        result.append((float(w[best]), float(v[best])))
    (wm, vm), (wp, vp) = result
    return SidebandPeaks(omega_minus=wm, omega_plus=wp, value_minus=vm, value_plus=vp)
