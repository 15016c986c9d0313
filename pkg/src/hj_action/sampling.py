"""Seeded random on-shell endpoint configurations.

A configuration is built forward from the constants of motion: pick
``(y_max, t_max)``, realize the extremal, pick endpoint times around
``t_max`` and read ``y_a, y_b`` off the trajectory. Configurations whose
phase sines are small (near a turning point or a conjugate point) are
rejected, so every sample is non-degenerate by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HJActionError
from .extremals import BVP_TOL, EndpointData, Extremal, _count_turns, _phase_value, extremal_from_turning_point, solve_endpoint_bvp
from .oscillator import OscillatorParams, period, potential

__all__ = ["OnShellConfig", "random_params", "random_configuration", "config_rng"]


@dataclass(frozen=True)
class OnShellConfig:
    params: OscillatorParams
    ep: EndpointData
    ext: Extremal
    branch: int
    phi_a: float
    phi_b: float

    @property
    def total_phase(self) -> float:
        return self.phi_a + self.phi_b


def config_rng(seed: int, n: int, index: int) -> np.random.Generator:
    """Independent stream per ``(seed, n, index)``, so parallel sweeps stay reproducible."""
    return np.random.default_rng([int(seed), int(n), int(index)])


def random_params(rng: np.random.Generator, n: int, harmonic: bool = False) -> OscillatorParams:
    mass = float(rng.uniform(0.5, 2.0))
    omega = float(rng.uniform(0.5, 2.0))
    if harmonic:
        return OscillatorParams.harmonic(mass, omega)
    return OscillatorParams(n=n, mass=mass, k2n=float(rng.uniform(0.5, 2.0)), omega=omega)


def random_configuration(
    rng: np.random.Generator,
    params: OscillatorParams,
    min_sine: float = 0.1,
    max_total_phase: float = math.pi - 0.3,
    y_max_range: tuple[float, float] = (0.5, 1.5),
    recoverable: bool = False,
    tol: float = BVP_TOL,
    max_tries: int = 200,
) -> OnShellConfig:
    """Draw one non-degenerate configuration on an extremal of ``params``.

    Endpoints are placed at ``t_max - u_a T`` and ``t_max + u_b T`` with
    ``T`` the period; ``t_max`` may fall outside ``[t_a, t_b]``. A draw is
    kept when ``|sin Phi_a|``, ``|sin Phi_b|`` and ``|sin Phi_ab|`` all
    exceed ``min_sine`` and the total phase stays below
    ``max_total_phase``, which keeps the endpoints short of conjugate
    points. With ``recoverable=True`` the draw must also be the one the
    boundary-value solver returns for its branch. The default ``tol`` is
    tight because the draws serve as reference data.
    """
    for _ in range(max_tries):
        y_max = float(rng.uniform(*y_max_range))
        t_max = float(rng.uniform(-1.0, 1.0))
        u_a, u_b = (float(u) for u in rng.uniform(-0.15, 0.45, size=2))
        if not 0.03 < u_a + u_b:
            continue
        T = period(params, float(potential(params, y_max)))
        t_a, t_b = t_max - u_a * T, t_max + u_b * T
        ext = extremal_from_turning_point(params, y_max, t_max, t_a, t_b, tol)
        phi_a = _phase_value(ext, t_a, t_max)
        phi_b = _phase_value(ext, t_max, t_b)
        sines = (math.sin(phi_a), math.sin(phi_b), math.sin(phi_a + phi_b))
        if min(abs(s) for s in sines) < min_sine or phi_a + phi_b > max_total_phase:
            continue
        ep = EndpointData(t_a, float(ext.y(t_a)), t_b, float(ext.y(t_b)))
        grid = np.linspace(t_a, t_b, 257)
        branch = _count_turns(grid, ext.traj(grid)[1], t_a, t_b)
        if recoverable:
            try:
                solved = solve_endpoint_bvp(params, ep, branch)
            except HJActionError:
                continue
            if abs(solved.y_max - y_max) > 1e-8 * y_max:
                continue
        return OnShellConfig(params, ep, ext, branch, phi_a, phi_b)
    raise RuntimeError("no non-degenerate configuration found; loosen min_sine")
