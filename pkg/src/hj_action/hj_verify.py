"""Finite-difference certification of the Hamilton-Jacobi identities.

The closed-form action is a function of the endpoint data only through the
extremal joining them, so every perturbed evaluation re-solves the boundary
value problem (warm-started from the base solution) before differentiating.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .action import action_closed_form, action_numeric_oracle
from .extremals import BVP_TOL, EndpointData, Extremal, momentum_endpoint_a, momentum_endpoint_b, solve_endpoint_bvp
from .oscillator import OscillatorParams, hamiltonian

__all__ = ["HJReport", "hj_residuals", "energy_identity", "richardson_central", "DEFAULT_REL_STEP"]

DEFAULT_REL_STEP = 1e-5


def richardson_central(f, x: float, h: float) -> float:
    """Central difference at steps ``h`` and ``h/2`` with one Richardson level."""
    d_h = (f(x + h) - f(x - h)) / (2.0 * h)
    d_h2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h
    return (4.0 * d_h2 - d_h) / 3.0


@dataclass(frozen=True)
class HJReport:
    """Residuals of the four Hamilton-Jacobi identities at one endpoint set.

    Momentum residuals are scaled by ``sqrt(2 m E)`` (the largest momentum on
    the extremal) and energy residuals by ``E``.
    """

    ep: EndpointData
    n: int
    branch: int
    residual_py_b: float
    residual_E_b: float
    residual_py_a: float
    residual_E_a: float
    fd_step: dict
    oracle_gap: float
    E: float
    y_max: float
    t_max: float
    dS_dy_b: float
    dS_dt_b: float
    dS_dy_a: float
    dS_dt_a: float
    p_b: float
    p_a: float
    residual_py_b_trajectory: float
    residual_py_a_flipped: float
    richardson_levels: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residual_py_b, self.residual_E_b, self.residual_py_a, self.residual_E_a)

    @property
    def a_sign_convention(self) -> str:
        """Which of ``dS/dy_a = -p_a`` or ``+p_a`` the numbers support."""
        return "-p_a" if self.residual_py_a <= self.residual_py_a_flipped else "+p_a"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["max_residual"] = self.max_residual
        out["a_sign_convention"] = self.a_sign_convention
        return out


def hj_residuals(
    params: OscillatorParams,
    ep: EndpointData,
    fd_step: float | None = None,
    branch: int = 0,
    tol: float = BVP_TOL,
) -> HJReport:
    """Differentiate the closed-form action with respect to each endpoint coordinate.

    ``fd_step`` overrides the relative step; by default space steps are
    ``1e-5 * (1 + |y|)`` and time steps ``1e-5 * (t_b - t_a)``.
    """
    rel = DEFAULT_REL_STEP if fd_step is None else fd_step
    base = solve_endpoint_bvp(params, ep, branch, tol=tol)

    def S(ep_: EndpointData) -> float:
        ext = solve_endpoint_bvp(params, ep_, None, tol=tol, p_guess=base.p_a)
        return action_closed_form(ext, ep_).value

    h = {
        "y_b": rel * (1.0 + abs(ep.y_b)),
        "t_b": rel * ep.duration,
        "y_a": rel * (1.0 + abs(ep.y_a)),
        "t_a": rel * ep.duration,
    }
    dS = {
        name: richardson_central(lambda d, name=name: S(ep.shifted(**{name: d})), 0.0, step)
        for name, step in h.items()
    }

    E = float(hamiltonian(params, ep.y_b, base.p(ep.t_b)))
    p_b = momentum_endpoint_b(base, ep.t_b)
    p_a = momentum_endpoint_a(base, ep.t_a)
    p_ref = math.sqrt(2.0 * params.mass * E)
    closed = action_closed_form(base, ep).value
    oracle = action_numeric_oracle(base, ep).value

    return HJReport(
        ep=ep,
        n=params.n,
        branch=branch,
        residual_py_b=abs(dS["y_b"] - p_b) / p_ref,
        residual_E_b=abs(dS["t_b"] + E) / E,
        residual_py_a=abs(dS["y_a"] + p_a) / p_ref,
        residual_E_a=abs(dS["t_a"] - E) / E,
        fd_step=h,
        oracle_gap=abs(closed - oracle) / (1.0 + abs(oracle)),
        E=E,
        y_max=base.y_max,
        t_max=base.t_max,
        dS_dy_b=dS["y_b"],
        dS_dt_b=dS["t_b"],
        dS_dy_a=dS["y_a"],
        dS_dt_a=dS["t_a"],
        p_b=p_b,
        p_a=p_a,
        residual_py_b_trajectory=abs(dS["y_b"] - base.p(ep.t_b)) / p_ref,
        residual_py_a_flipped=abs(dS["y_a"] - p_a) / p_ref,
    )


def energy_identity(ext: Extremal) -> tuple[float, float]:
    """Both sides of ``-k y_max^2n / (n+1) + (n-1)/(n+1) k y_max^2n / 2n = -E``.

    Only ``ext.params``, ``ext.y_max`` and ``ext.E`` are used.
    """
    n = ext.params.n
    k = ext.params.k2n
    y2n = ext.y_max ** (2 * n)
    lhs = math.fsum((-k * y2n / (n + 1), (n - 1) / (n + 1) * k * y2n / (2 * n)))
    return lhs, -ext.E
