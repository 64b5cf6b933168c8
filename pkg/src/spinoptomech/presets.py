"""Named parameter sets for the standard figure scenarios.

Each preset returns ``(params, ss)``.  Figure scenarios quote the effective
detuning and dressed couplings directly, so their operating points are
prescribed rather than solved for.  Power-dependent presets quote couplings
at the critical power, i.e. ``P_ref = 1`` means P is measured in units of P_cr.
"""
import math

from .params import ModelParams
from .steady import SteadyState, steady_state

PI = math.pi


def default():
    params = ModelParams()
    return params, steady_state(params)


def fig2(delta_R=0.0, Omega_z=2.0, g_m=0.1, alpha_tilde=20 * PI):
    """Band-structure panels; the natural k window is +/- 2 alpha_tilde."""
    params = ModelParams(delta_R=delta_R, Omega_z=Omega_z, g_m=g_m, alpha_tilde=alpha_tilde)
    return params, steady_state(params)


def fig2_window(params):
    return -2.0 * params.alpha_tilde, 2.0 * params.alpha_tilde


def fig3(alpha=0.0, Delta=0.5):
    params = ModelParams(alpha=alpha, Omega_z=1.0, delta_R=1.0)
    return params, SteadyState.prescribed_point(params, Delta=Delta, G_m=1.5, G_a=28.5)


FIG3_ALPHAS = (0.0, 150 * PI, 250 * PI)


def fig5(alpha=0.0, G_a=25.0, G_m=1.0, U=5.5, Delta=1.3):
    params = ModelParams(alpha=alpha, U=U, Omega_z=1.0, delta_R=1.0)
    return params, SteadyState.prescribed_point(params, Delta=Delta, G_m=G_m, G_a=G_a)


FIG5B_ALPHA = 100 * PI
FIG5B_COUPLINGS = (23.0, 26.0, 29.0, 40.0)


def fig6(alpha=0.0, U=5.5, Delta=3.0):
    """Output-light scenario; couplings G_a = 0.9, G_m = 1.5 hold at P = P_cr."""
    params = ModelParams(alpha=alpha, U=U, Omega_z=1.0, delta_R=1.0)
    return params, SteadyState.prescribed_point(params, Delta=Delta, G_m=1.5, G_a=0.9)


FIG7_ALPHAS = (0.0, 60 * PI, 100 * PI, 140 * PI)


def thermal(T_bath=300.0, Delta=0.0):
    """Mirror decoupled from light and atoms, with a damped atomic block."""
    params = ModelParams(T_bath=T_bath, U=0.0, g_a=0.0, g_m=0.0, Omega_z=0.0,
                         delta_R=0.0, alpha=0.0, Omega_rec=0.01, gamma_a=0.05)
    return params, SteadyState.prescribed_point(params, Delta=Delta, G_m=0.0, G_a=0.0)


PRESETS = {
    "default": default,
    "fig2": fig2,
    "fig3": fig3,
    "fig5": fig5,
    "fig6": fig6,
    "thermal": thermal,
}
