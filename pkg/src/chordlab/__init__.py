"""chordlab: chord power integrals, radial mean bodies and chord entropies
of convex bodies and log-concave functions, with every quantity computable
by at least two independent routes and a verification layer that scores the
sharp inequalities of the theory at desk scale."""

from .constants import (
    AlphaParam,
    Regime,
    SharpConstants,
    alpha_sigma,
    ball_chord_power,
    e1_ball,
    en1_ball,
    omega,
    sigma,
    sigma0,
    sigma_bar0,
    sigma_bar0_fd,
    sigma_tilde,
    theta_constant_c,
)
from .functions import Exponential, Gaussian, GridFn, Indicator, two_bump_grid
from .functionals import (
    chord_power_body,
    chord_power_fn,
    dual_log_volume,
    entropy_body,
    entropy_fn,
    radial_mean_body_rho,
    radial_mean_fn_rho,
    theorem_c_rhs,
)
from .geometry import AffineLine, Ball, Box, Direction, Ellipsoid, Polytope
from .mc import Budget, Estimate
from .verify import (
    VerificationReport,
    run_suite,
    verify_chord_isoperimetric,
    verify_entropy,
    verify_frac_sobolev,
    verify_identity,
    verify_limit,
    verify_rearrangement,
    verify_theorem_a,
    verify_theorem_b,
    verify_theorem_c,
)

__version__ = "0.1.0"
