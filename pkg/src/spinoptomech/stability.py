"""Linearized drift matrix, eigenvalue stability and the Routh-Hurwitz inequality set.

Fluctuation vector ordering: (q_c, p_c, q_m, p_m, q_up, p_up, q_dn, p_dn).
"""
from dataclasses import dataclass
import json

import numpy as np

from .errors import EigenSolverFailure
from .params import input_noise_kernels

STATE_LABELS = ("q_c", "p_c", "q_m", "p_m", "q_up", "p_up", "q_dn", "p_dn")
STABLE_TOL = 1e-12


@dataclass(frozen=True)
class DriftSystem:
    K: np.ndarray
    M_diag: float
    noise_map: tuple
    ss: object = None
    params: object = None

    def __post_init__(self):
        self.K.setflags(write=False)


def atomic_diagonal(ss, params):
    """M = Omega/2 + v + U N (1 - eps) - gamma_a with v = g_a n_s."""
    return params.atomic_diagonal + params.g_a * ss.n_s


def build_drift(kappa, Delta, G_m, G_a, gamma_m, M, Omega_z, alpha, delta_R, omega_m=1.0):
    """Drift matrix from its scalar ingredients, exactly in the printed layout."""
    a = alpha - 0.5 * delta_R
    h = 0.5 * Omega_z
    return np.array([
        [-kappa, Delta, 0, 0, 0, 0, 0, 0],
        [Delta, -kappa, -G_m, 0, G_a, 0, G_a, 0],
        [-2 * G_m, 0, -gamma_m, omega_m, 0, 0, 0, 0],
        [0, 0, -omega_m, -gamma_m, 0, 0, 0, 0],
        [2 * G_a, 0, 0, 0, M, h, a, 0],
        [0, 0, 0, 0, h, M, 0, -a],
        [2 * G_a, 0, 0, 0, -a, 0, M, -h],
        [0, 0, 0, 0, 0, a, -h, M],
    ], dtype=float)


def noise_map(params):
    kernels = input_noise_kernels(params)
    return (kernels["cavity"], kernels["cavity"], None, kernels["mirror"],
            None, kernels["atom"], None, kernels["atom"])


def drift_matrix(ss, params):
    M = atomic_diagonal(ss, params)
    K = build_drift(params.kappa, ss.Delta, ss.G_m, ss.G_a, params.gamma_m, M,
                    params.Omega_z, params.alpha, params.delta_R)
    return DriftSystem(K=K, M_diag=M, noise_map=noise_map(params), ss=ss, params=params)


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    margin: float
    spectrum: np.ndarray


def eigen_stability(ds):
    K = ds.K if isinstance(ds, DriftSystem) else np.asarray(ds, dtype=float)
    if not np.all(np.isfinite(K)):
        raise EigenSolverFailure(K, "matrix has non-finite entries")
    try:
        ev = np.linalg.eigvals(K)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverFailure(K, str(exc)) from exc
    ev = ev[np.lexsort((ev.imag, ev.real))]
    margin = float(ev.real.max())
    return StabilityVerdict(stable=margin < -STABLE_TOL, margin=margin, spectrum=ev)


@dataclass(frozen=True)
class RouthHurwitzReport:
    flags: tuple
    all_hold: bool
    eigen: StabilityVerdict
    discrepancy: dict = None


def routh_hurwitz_flags(ds, params):
    """The four printed inequalities, checked against the eigenvalue verdict.

    The eigenvalue test is treated as ground truth; a discrepancy record is
    attached whenever the conjunction of the flags disagrees with it.
    """
    K = ds.K
    kappa, Delta = -K[0, 0], K[0, 1]
    G_m, G_a = -K[1, 2], K[1, 4]
    gamma_m, omega_m = -K[2, 2], K[2, 3]
    M, h, a = K[4, 4], K[4, 5], K[4, 6]
    Omega_z = 2.0 * h
    flags = (
        bool(M > kappa + gamma_m),
        bool(a ** 2 + M ** 2 > kappa ** 2 + Delta ** 2 - omega_m ** 2 - Omega_z ** 2),
        bool(omega_m > Delta > kappa > gamma_m > 0),
        bool(Delta * G_a ** 2 + Delta * G_m ** 2 > M * (kappa ** 2 - Omega_z ** 2)),
    )
    all_hold = all(flags)
    eig = eigen_stability(ds)
    discrepancy = None
    if all_hold != eig.stable:
        discrepancy = {
            "routh_hurwitz": all_hold,
            "eigen_stable": eig.stable,
            "margin": eig.margin,
            "failed_flags": [i + 1 for i, f in enumerate(flags) if not f],
        }
    return RouthHurwitzReport(flags=flags, all_hold=all_hold, eigen=eig, discrepancy=discrepancy)


def stability_report(ds, params):
    """JSON-ready summary {flags, margin, spectrum, discrepancies}."""
    rh = routh_hurwitz_flags(ds, params)
    return {
        "flags": list(rh.flags),
        "stable": rh.eigen.stable,
        "margin": rh.eigen.margin,
        "spectrum": [[float(z.real), float(z.imag)] for z in rh.eigen.spectrum],
        "discrepancies": [rh.discrepancy] if rh.discrepancy else [],
    }


def stability_report_json(ds, params):
    return json.dumps(stability_report(ds, params), indent=2, sort_keys=True)
