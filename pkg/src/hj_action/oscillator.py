"""Even-power oscillators ``V(y) = k2n * y**(2n) / (2n)`` and their dynamics.

Every member of the family shares the mass ``m``. The auxiliary harmonic
frequency ``omega`` (with ``k2 = m * omega**2``) does not enter the dynamics;
it only fixes the reference oscillator used by the linearization map and the
phase bookkeeping.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .errors import NonpositiveEnergy, OutsideTrajectory, StepSizeUnderflow

__all__ = [
    "OscillatorParams",
    "State",
    "Trajectory",
    "potential",
    "force",
    "lagrangian",
    "hamiltonian",
    "amplitude",
    "integrate",
    "integrate_span",
    "period",
    "odd_power",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-10
_LOCAL_SAFETY = 0.1
_RTOL_FLOOR = 2.5e-14


@dataclass(frozen=True)
class OscillatorParams:
    """Parameters of one member of the oscillator hierarchy.

    Parameters
    ----------
    n : int
        Hierarchy index. ``n = 1`` is the harmonic oscillator, ``n = 2`` the
        quartic one.
    mass : float
        Mass ``m`` shared by every member.
    k2n : float
        Spring constant of the ``y**(2n)`` potential.
    omega : float
        Frequency of the auxiliary harmonic oscillator.
    """

    n: int = 2
    mass: float = 1.0
    k2n: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        for name in ("mass", "k2n", "omega"):
            value = float(getattr(self, name))
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def k2(self) -> float:
        """Spring constant of the auxiliary harmonic oscillator, ``m * omega**2``."""
        return self.mass * self.omega**2

    def with_omega(self, omega: float) -> "OscillatorParams":
        return replace(self, omega=omega)

    @classmethod
    def harmonic(cls, mass: float = 1.0, omega: float = 1.0) -> "OscillatorParams":
        """The ``n = 1`` member whose spring constant equals the reference ``k2``."""
        return cls(n=1, mass=mass, k2n=mass * omega**2, omega=omega)


class State(NamedTuple):
    t: float
    y: float
    p: float


def odd_power(y, k):
    """``sign(y) * |y|**k``; avoids ``pow`` on negative bases."""
    return np.sign(y) * np.abs(y) ** k


def potential(params: OscillatorParams, y):
    n = params.n
    return params.k2n * np.abs(y) ** (2 * n) / (2 * n)


def force(params: OscillatorParams, y):
    return -params.k2n * odd_power(y, 2 * params.n - 1)


def lagrangian(params: OscillatorParams, y, ydot):
    return 0.5 * params.mass * np.square(ydot) - potential(params, y)


def hamiltonian(params: OscillatorParams, y, p):
    return np.square(p) / (2.0 * params.mass) + potential(params, y)


def amplitude(params: OscillatorParams, E: float) -> float:
    """Turning-point amplitude ``y_max`` solving ``potential(y_max) = E``."""
    n = params.n
    return (2 * n * E / params.k2n) ** (1.0 / (2 * n))


def _rhs(params: OscillatorParams):
    inv_m = 1.0 / params.mass
    k = params.k2n
    e = 2 * params.n - 1

    def rhs(t, s):
        y, p = s
        return [p * inv_m, -k * math.copysign(abs(y) ** e, y)]

    return rhs


def _tolerances(params: OscillatorParams, y0: float, p0: float, tol: float):
    # local error control a decade below tol keeps the energy drift of a
    # multi-period run under 1e-9; DOP853 refuses rtol below ~2.2e-14
    tol = max(_LOCAL_SAFETY * tol, _RTOL_FLOOR)
    E = float(hamiltonian(params, y0, p0))
    if E > 0.0:
        y_scale = amplitude(params, E)
        p_scale = math.sqrt(2.0 * params.mass * E)
    else:
        y_scale = p_scale = 1.0
    return tol, np.array([tol * y_scale, tol * p_scale])


def _solve(params, t0, y0, p0, t1, tol, dense=True):
    rtol, atol = _tolerances(params, y0, p0, tol)
    sol = solve_ivp(
        _rhs(params), (t0, t1), [y0, p0], method="DOP853",
        rtol=rtol, atol=atol, dense_output=dense,
    )
    if sol.status < 0:
        raise StepSizeUnderflow(f"integration from t={t0} to t={t1} failed: {sol.message}")
    return sol


@dataclass(frozen=True)
class Trajectory:
    """Dense numerical solution of Newton's equation.

    ``t``, ``y`` and ``p`` are the integrator's accepted steps, sorted in
    increasing time. Between steps the solution is evaluated from the
    integrator's own dense-output polynomials.
    """

    params: OscillatorParams
    t: np.ndarray
    y: np.ndarray
    p: np.ndarray
    _interpolants: Sequence = field(default=(), repr=False, compare=False)

    @property
    def t_start(self) -> float:
        return float(self.t[0])

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    @property
    def samples(self) -> list[State]:
        return [State(*row) for row in zip(self.t.tolist(), self.y.tolist(), self.p.tolist())]

    @property
    def energy(self) -> float:
        """Energy of the first sample."""
        return float(hamiltonian(self.params, self.y[0], self.p[0]))

    def covers(self, t1: float, t2: float | None = None) -> bool:
        lo, hi = (t1, t1) if t2 is None else (min(t1, t2), max(t1, t2))
        slack = 1e-12 * max(1.0, abs(self.t_start), abs(self.t_end))
        return lo >= self.t_start - slack and hi <= self.t_end + slack

    def __call__(self, t):
        """Return ``(y, p)`` at time(s) ``t``."""
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        if t_arr.size and not self.covers(t_arr.min(), t_arr.max()):
            raise OutsideTrajectory(
                f"t in [{t_arr.min()}, {t_arr.max()}] outside [{self.t_start}, {self.t_end}]"
            )
        if not self._interpolants:
            y = np.full_like(t_arr, self.y[0])
            p = np.full_like(t_arr, self.p[0])
        else:
            idx = np.clip(np.searchsorted(self.t, t_arr, side="right") - 1, 0, len(self._interpolants) - 1)
            y = np.empty_like(t_arr)
            p = np.empty_like(t_arr)
            for i in np.unique(idx):
                mask = idx == i
                yp = self._interpolants[i](t_arr[mask])
                y[mask] = yp[0]
                p[mask] = yp[1]
        if scalar:
            return float(y[0]), float(p[0])
        return y, p

    def state(self, t: float) -> State:
        y, p = self(t)
        return State(float(t), y, p)

    def velocity(self, t):
        return self(t)[1] / self.params.mass

    def step_intervals(self, t1: float, t2: float) -> np.ndarray:
        """Integrator breakpoints inside ``[t1, t2]``, endpoints included."""
        lo, hi = min(t1, t2), max(t1, t2)
        inner = self.t[(self.t > lo) & (self.t < hi)]
        return np.concatenate(([lo], inner, [hi]))

    def _crossings(self, component: int, lo: float, hi: float) -> np.ndarray:
        # at most one sign change per step: steps are short against a period
        values = (self.y, self.p)[component]
        out = []
        for i, interp in enumerate(self._interpolants):
            a, b = self.t[i], self.t[i + 1]
            if b < lo or a > hi:
                continue
            va, vb = values[i], values[i + 1]
            if va == 0.0:
                tz = a
            elif va * vb < 0.0:
                tz = brentq(lambda s: interp(s)[component], a, b, xtol=1e-15, rtol=1e-15)
            else:
                continue
            if lo <= tz <= hi:
                out.append(tz)
        if values[-1] == 0.0 and lo <= self.t[-1] <= hi:
            out.append(self.t[-1])
        return np.array(out)

    def turning_times(self, sign: int = +1) -> np.ndarray:
        """Times where ``p = 0`` with ``y`` of the given sign (``+1``: maxima)."""
        tz = self._crossings(1, self.t_start, self.t_end)
        if tz.size == 0:
            return tz
        return tz[np.sign(self(tz)[0]) == sign]

    def zeros(self, t1: float, t2: float) -> np.ndarray:
        """Times in ``[t1, t2]`` where ``y`` changes sign."""
        return self._crossings(0, min(t1, t2), max(t1, t2))

    def quadrature(self, fn, t1: float, t2: float, nodes: int, breaks=()) -> float:
        """Oriented integral of ``fn(y, p)`` from ``t1`` to ``t2``.

        Composite Gauss-Legendre over the integrator's step mesh, further split
        at ``breaks``. On each piece the dense output is a polynomial, so for
        polynomial ``fn`` of modest degree the rule is exact for the interpolant.
        """
        if t1 == t2:
            return 0.0
        if not self.covers(t1, t2):
            raise OutsideTrajectory(f"[{t1}, {t2}] outside [{self.t_start}, {self.t_end}]")
        lo, hi = min(t1, t2), max(t1, t2)
        edges = np.union1d(self.step_intervals(lo, hi), [b for b in breaks if lo < b < hi])
        x, w = _gauss_legendre(nodes)
        left, right = edges[:-1], edges[1:]
        half = 0.5 * (right - left)
        tt = (0.5 * (right + left))[:, None] + half[:, None] * x[None, :]
        y, p = self(tt.ravel())
        vals = np.asarray(fn(y, p), dtype=float).reshape(tt.shape)
        total = math.fsum((vals @ w) * half)
        return total if t2 > t1 else -total

    @classmethod
    def _from_solutions(cls, params, backward, forward, initial: State):
        ts, ys, ps, interps = [], [], [], []
        if backward is not None:
            ts.append(backward.t[::-1][:-1])
            ys.append(backward.y[0][::-1][:-1])
            ps.append(backward.y[1][::-1][:-1])
            interps.extend(backward.sol.interpolants[::-1])
        if forward is not None:
            ts.append(forward.t)
            ys.append(forward.y[0])
            ps.append(forward.y[1])
            interps.extend(forward.sol.interpolants)
        else:
            ts.append([initial.t])
            ys.append([initial.y])
            ps.append([initial.p])
        return cls(
            params,
            np.concatenate(ts).astype(float),
            np.concatenate(ys).astype(float),
            np.concatenate(ps).astype(float),
            tuple(interps),
        )


@lru_cache(maxsize=None)
def _gauss_legendre(nodes: int):
    return np.polynomial.legendre.leggauss(nodes)


def integrate(params: OscillatorParams, initial: State, t_end: float, tol: float = DEFAULT_TOL) -> Trajectory:
    """Integrate ``m y'' = -k2n y**(2n-1)`` from ``initial`` to ``t_end``.

    Uses the 8th order Dormand-Prince pair with its 7th order dense output.
    ``t_end`` may precede ``initial.t``.

    Raises
    ------
    StepSizeUnderflow
        If the step size collapses before ``t_end`` is reached.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    initial = State(float(initial.t), float(initial.y), float(initial.p))
    if t_end == initial.t:
        return Trajectory._from_solutions(params, None, None, initial)
    sol = _solve(params, initial.t, initial.y, initial.p, float(t_end), tol)
    if t_end > initial.t:
        return Trajectory._from_solutions(params, None, sol, initial)
    return Trajectory._from_solutions(params, sol, None, initial)


def integrate_span(
    params: OscillatorParams, initial: State, t_lo: float, t_hi: float, tol: float = DEFAULT_TOL
) -> Trajectory:
    """Integrate outward from ``initial`` so the result covers ``[t_lo, t_hi]``."""
    t_lo = min(t_lo, initial.t)
    t_hi = max(t_hi, initial.t)
    backward = _solve(params, initial.t, initial.y, initial.p, t_lo, tol) if t_lo < initial.t else None
    forward = _solve(params, initial.t, initial.y, initial.p, t_hi, tol) if t_hi > initial.t else None
    return Trajectory._from_solutions(params, backward, forward, State(*map(float, initial)))


def period(params: OscillatorParams, E: float, tol: float = DEFAULT_TOL) -> float:
    """Oscillation period at energy ``E``.

    The turning-point quadrature ``4 * int_0^ymax dy / sqrt(2 (E - V) / m)`` is
    rewritten with ``y = ymax sin(theta)``. Since
    ``1 - s**(2n) = (1 - s**2) * sum_j s**(2j)``, the ``cos(theta)`` from the
    Jacobian cancels the endpoint singularity and the integrand is smooth.
    """
    if not E > 0:
        raise NonpositiveEnergy(f"period needs E > 0, got {E!r}")
    n = params.n
    y_max = amplitude(params, E)
    v_scale = math.sqrt(2.0 * E / params.mass)

    def integrand(theta):
        s2 = math.sin(theta) ** 2
        return 1.0 / math.sqrt(sum(s2**j for j in range(n)))

    value, _ = quad(integrand, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=tol, limit=200)
    return 4.0 * y_max / v_scale * value
