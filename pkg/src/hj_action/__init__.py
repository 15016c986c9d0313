"""Closed-form on-shell action for even-power oscillators ``V = k2n y**(2n) / 2n``.

Modules
-------
oscillator
    Parameters, energy functions, dense integrator, period quadrature.
linearization
    Map from harmonic solutions ``x(t_hat)`` to ``2n``-oscillator solutions.
extremals
    Constants of motion, phase integrals, the two extremal representations
    and the endpoint boundary-value solver.
action
    Closed-form action, its quartic and harmonic specializations and the
    Lagrangian quadrature oracle.
hj_verify
    Finite-difference certification of the Hamilton-Jacobi identities.
sampling
    Seeded non-degenerate endpoint configurations.
"""

from types import ModuleType as _Module

from .action import (
    ActionForm,
    ActionValue,
    action_closed_form,
    action_harmonic_feynman,
    action_harmonic_new,
    action_numeric_oracle,
    action_quartic,
)
from .errors import (
    ConjugatePoints,
    HJActionError,
    NoSuchBranch,
    NonpositiveEnergy,
    OutsideTrajectory,
    PhaseSingularity,
    SingularQuadrature,
    StepSizeUnderflow,
)
from .extremals import (
    EndpointData,
    Extremal,
    PhaseIntegral,
    amplitude_phase_form,
    amplitude_relation,
    endpoint_form,
    extremal_from_turning_point,
    extremal_through,
    gamma,
    harmonic_endpoint_form,
    momentum_endpoint_a,
    momentum_endpoint_b,
    phase,
    residual_integral_equation,
    solve_endpoint_bvp,
)
from .hj_verify import HJReport, energy_identity, hj_residuals
from .linearization import (
    HarmonicCoords,
    TimeMap,
    coord_forward,
    coord_inverse,
    dt_dthat,
    dthat_dt,
    harmonic_extremal,
    newton_residual,
    time_reparam,
)
from .oscillator import (
    OscillatorParams,
    State,
    Trajectory,
    hamiltonian,
    integrate,
    lagrangian,
    period,
    potential,
)
from .sampling import OnShellConfig, random_configuration, random_params

__version__ = "0.1.0"

__all__ = [name for name, obj in dict(globals()).items() if not name.startswith("_") and not isinstance(obj, _Module)]
