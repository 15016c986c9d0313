"""Extremals of the even-power oscillators and their two descriptions.

An extremal is labelled by its amplitude ``y_max`` and a time ``t_max`` at
which ``y = +y_max``. The phase integral

    Phi(t1, t2) = omega * int_{t1}^{t2} gamma(y(t)) dt,
    gamma(y) = sqrt(n k2n / k2) |y|**(n-1),

plays the part of ``omega * (t2 - t1)`` for the nonlinear members, and in
terms of it every extremal obeys ``y |y|**(n-1) = y_max**n cos Phi(t_max, t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import ConjugatePoints, NonpositiveEnergy, NoSuchBranch, OutsideTrajectory, PhaseSingularity
from .oscillator import (
    DEFAULT_TOL,
    OscillatorParams,
    State,
    Trajectory,
    _rhs,
    _tolerances,
    amplitude,
    hamiltonian,
    integrate_span,
    odd_power,
    period,
    potential,
)

__all__ = [
    "Extremal",
    "EndpointData",
    "PhaseIntegral",
    "gamma",
    "phase",
    "extremal_from_turning_point",
    "extremal_through",
    "harmonic_endpoint_form",
    "endpoint_form",
    "amplitude_phase_form",
    "residual_integral_equation",
    "amplitude_relation",
    "solve_endpoint_bvp",
    "momentum_endpoint_a",
    "momentum_endpoint_b",
    "momentum_scale",
    "BVP_TOL",
]

BVP_TOL = 1e-12
_SIN_EPS = 1e-12
_CONJUGATE_EPS = 1e-10


@dataclass(frozen=True)
class EndpointData:
    t_a: float
    y_a: float
    t_b: float
    y_b: float

    def __post_init__(self):
        for name in ("t_a", "y_a", "t_b", "y_b"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.t_b > self.t_a:
            raise ValueError(f"need t_b > t_a, got t_a={self.t_a}, t_b={self.t_b}")

    @property
    def duration(self) -> float:
        return self.t_b - self.t_a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.t_a + self.t_b)

    def shifted(self, *, t_a=0.0, y_a=0.0, t_b=0.0, y_b=0.0) -> "EndpointData":
        return EndpointData(self.t_a + t_a, self.y_a + y_a, self.t_b + t_b, self.y_b + y_b)


@dataclass(frozen=True)
class PhaseIntegral:
    """``omega * int_{t1}^{t2} gamma dt`` in radians; oriented."""

    value: float
    t1: float
    t2: float

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class Extremal:
    """A solution of Newton's equation labelled by its constants of motion.

    Attributes
    ----------
    params : OscillatorParams
    y_max : float
        Turning-point amplitude; ``E = potential(y_max)``.
    t_max : float
        A time where ``y = +y_max``. It need not lie between the endpoints.
    E : float
        Energy.
    traj : Trajectory
        Dense realization covering the endpoints and ``t_max``.
    period : float
        Oscillation period at energy ``E``.
    t_ref : float
        Normalization reference: ``0 <= t_max - t_ref < period``.
    p_a : float or None
        Initial momentum found by the shooting solver, if any.
    """

    params: OscillatorParams
    y_max: float
    t_max: float
    E: float
    traj: Trajectory
    period: float
    t_ref: float
    p_a: float | None = None

    def y(self, t):
        return self.traj(t)[0]

    def p(self, t):
        return self.traj(t)[1]


def gamma(params: OscillatorParams, y):
    n = params.n
    return math.sqrt(n * params.k2n / params.k2) * np.abs(y) ** (n - 1)


def momentum_scale(params: OscillatorParams) -> float:
    """``m omega sqrt(k2n / (n k2))``, which equals ``sqrt(m k2n / n)``."""
    return params.mass * params.omega * math.sqrt(params.k2n / (params.n * params.k2))


def _phase_value(ext: Extremal, t1: float, t2: float) -> float:
    params = ext.params
    n = params.n
    if not ext.traj.covers(t1, t2):
        raise OutsideTrajectory(f"[{t1}, {t2}] outside [{ext.traj.t_start}, {ext.traj.t_end}]")
    rate = params.omega * math.sqrt(n * params.k2n / params.k2)
    if n == 1:
        return rate * (t2 - t1)
    # exact for the degree-7 dense output; |y|**(n-1) has kinks only at zeros
    nodes = (7 * (n - 1)) // 2 + 2
    zeros = ext.traj.zeros(t1, t2) if n % 2 == 0 else ()
    return rate * ext.traj.quadrature(lambda y, p: np.abs(y) ** (n - 1), t1, t2, nodes, breaks=zeros)


def phase(ext: Extremal, t1: float, t2: float) -> PhaseIntegral:
    """Phase integral ``omega * int_{t1}^{t2} gamma(y(t)) dt`` along ``ext``.

    Raises
    ------
    OutsideTrajectory
        If ``[t1, t2]`` is not covered by ``ext.traj``.
    """
    return PhaseIntegral(_phase_value(ext, t1, t2), float(t1), float(t2))


def _build_extremal(params, traj, E, anchor, tol, p_a=None) -> Extremal:
    T = period(params, E, tol=min(tol, DEFAULT_TOL))
    maxima = traj.turning_times(+1)
    if maxima.size == 0:
        raise OutsideTrajectory("trajectory does not reach a maximum")
    t_max = float(maxima[np.argmin(np.abs(maxima - anchor))])
    return Extremal(params, amplitude(params, E), t_max, E, traj, T, anchor - 0.5 * T, p_a)


def extremal_through(
    params: OscillatorParams,
    state: State,
    t_lo: float,
    t_hi: float,
    tol: float = DEFAULT_TOL,
    anchor: float | None = None,
    p_a: float | None = None,
) -> Extremal:
    """Extremal through ``state``, realized over ``[t_lo, t_hi]``.

    ``t_max`` is the maximum nearest ``anchor`` (default: the midpoint of
    ``[t_lo, t_hi]``); the realized span is widened to contain it.
    """
    E = float(hamiltonian(params, state.y, state.p))
    if not E > 0:
        raise NonpositiveEnergy("the extremal at rest in the origin has no amplitude or phase")
    anchor = 0.5 * (t_lo + t_hi) if anchor is None else anchor
    T = period(params, E)
    traj = integrate_span(params, state, min(t_lo, anchor - 0.6 * T), max(t_hi, anchor + 0.6 * T), tol)
    return _build_extremal(params, traj, E, anchor, tol, p_a)


def extremal_from_turning_point(
    params: OscillatorParams, y_max: float, t_max: float, t_lo: float, t_hi: float, tol: float = DEFAULT_TOL
) -> Extremal:
    """Extremal with amplitude ``y_max`` peaking at ``t_max``, covering ``[t_lo, t_hi]``."""
    if not y_max > 0:
        raise NonpositiveEnergy("y_max must be positive")
    state = State(float(t_max), float(y_max), 0.0)
    return extremal_through(params, state, min(t_lo, t_max), max(t_hi, t_max), tol, anchor=t_max)


def harmonic_endpoint_form(x_a, t_hat_a, x_b, t_hat_b, omega, t_hat):
    """Harmonic extremal through ``(t_hat_a, x_a)`` and ``(t_hat_b, x_b)``, at ``t_hat``."""
    s_ab = math.sin(omega * (t_hat_b - t_hat_a))
    if abs(s_ab) < _SIN_EPS:
        raise ConjugatePoints(f"sin(omega (t_b - t_a)) = {s_ab:.3e}")
    t_hat = np.asarray(t_hat, dtype=float)
    out = (x_b * np.sin(omega * (t_hat - t_hat_a)) + x_a * np.sin(omega * (t_hat_b - t_hat))) / s_ab
    return float(out) if out.ndim == 0 else out


def endpoint_form(ext: Extremal, ep: EndpointData, t: float) -> float:
    """``y(t)`` from the endpoint representation, with numerical phase integrals.

    Interpolates ``y |y|**(n-1)`` between the endpoints with sines of the
    phase, the nonlinear analogue of :func:`harmonic_endpoint_form`.
    """
    n = ext.params.n
    s_ab = math.sin(_phase_value(ext, ep.t_a, ep.t_b))
    if abs(s_ab) < _SIN_EPS:
        raise ConjugatePoints(f"sin Phi(t_a, t_b) = {s_ab:.3e}")
    u = (
        odd_power(ep.y_b, n) * math.sin(_phase_value(ext, ep.t_a, t))
        + odd_power(ep.y_a, n) * math.sin(_phase_value(ext, t, ep.t_b))
    ) / s_ab
    return float(odd_power(u, 1.0 / n))


def amplitude_phase_form(ext: Extremal, t: float) -> float:
    """``y(t) = y_max sign(cos Phi) |cos Phi|**(1/n)`` with ``Phi = Phi(t_max, t)``."""
    c = math.cos(_phase_value(ext, ext.t_max, t))
    return ext.y_max * math.copysign(abs(c) ** (1.0 / ext.params.n), c)


def residual_integral_equation(ext: Extremal, t: float) -> float:
    """``y|y|**(n-1) - y_max**n cos Phi(t_max, t)`` with ``y`` from the trajectory."""
    n = ext.params.n
    y = ext.y(t)
    return float(odd_power(y, n) - ext.y_max**n * math.cos(_phase_value(ext, ext.t_max, t)))


def amplitude_relation(ext: Extremal, t: float) -> tuple[float, float]:
    """The pair ``(|y(t)|**(n-1), y_max**(n-1) |cos Phi|**((n-1)/n))``."""
    n = ext.params.n
    y = ext.y(t)
    c2 = math.cos(_phase_value(ext, ext.t_max, t)) ** 2
    return abs(y) ** (n - 1), ext.y_max ** (n - 1) * c2 ** ((n - 1) / (2 * n))


def _momentum_formula(params, y, y_max, phi):
    n = params.n
    s = math.sin(phi)
    c = math.cos(phi)
    if y != 0.0 and (y > 0.0) == (c > 0.0):
        # y^n cos - y_max^n = y_max^n (A - delta - A delta), cancellation-free
        delta = 2.0 * (math.sin(0.5 * phi) if c > 0.0 else math.cos(0.5 * phi)) ** 2
        A = math.expm1(n * math.log1p((abs(y) - y_max) / y_max))
        numerator = y_max**n * math.fsum((A, -delta, -A * delta))
    else:
        numerator = odd_power(y, n) * c - y_max**n
    if abs(s) < _SIN_EPS:
        # a turning point at the endpoint is removable: numerator ~ sin^2
        if abs(numerator) > 1e-6 * y_max**n:
            raise PhaseSingularity(f"sin Phi = {s:.3e}")
        return -momentum_scale(params) * y_max**n * s
    return momentum_scale(params) * numerator / s


def momentum_endpoint_b(ext: Extremal, t_b: float) -> float:
    """Momentum at ``t_b`` from the amplitude and ``Phi(t_max, t_b)``."""
    return float(_momentum_formula(ext.params, ext.y(t_b), ext.y_max, _phase_value(ext, ext.t_max, t_b)))


def momentum_endpoint_a(ext: Extremal, t_a: float) -> float:
    """Momentum at ``t_a``.

    The a-endpoint formula is written with the phase oriented from ``t_a`` to
    ``t_max``; with that orientation it evaluates to ``-p(t_a)``, so the sign
    is flipped here to return the physical momentum.
    """
    return -float(_momentum_formula(ext.params, ext.y(t_a), ext.y_max, _phase_value(ext, t_a, ext.t_max)))


# --- shooting -------------------------------------------------------------


def _count_turns(t, p, t_a, t_b):
    # interior zeros of p only; a turning point sitting on an endpoint is not counted
    eps = 1e-9 * (t_b - t_a)
    count = 0
    for i in range(len(p) - 1):
        if p[i] * p[i + 1] < 0.0:
            tz = t[i] - p[i] * (t[i + 1] - t[i]) / (p[i + 1] - p[i])
            if t_a + eps < tz < t_b - eps:
                count += 1
    return count


class _Shooter:
    def __init__(self, params, ep, tol):
        self.params = params
        self.ep = ep
        self.tol = tol
        self.rhs = _rhs(params)
        self.calls = 0

    def __call__(self, p_a):
        ep = self.ep
        self.calls += 1
        rtol, atol = _tolerances(self.params, ep.y_a, p_a, self.tol)
        sol = solve_ivp(self.rhs, (ep.t_a, ep.t_b), [ep.y_a, p_a], method="DOP853", rtol=rtol, atol=atol)
        if sol.status < 0:
            return math.nan, -1
        return sol.y[0, -1] - ep.y_b, _count_turns(sol.t, sol.y[1], ep.t_a, ep.t_b)


def _p_of_energy(params, y_a, E):
    return math.sqrt(max(0.0, 2.0 * params.mass * (E - float(potential(params, y_a)))))


def _roots_on_grid(shoot, grid, values, f_tol):
    roots = [p for p, (f, _) in zip(grid, values) if abs(f) <= f_tol]
    for (p0, (f0, _)), (p1, (f1, _)) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if math.isfinite(f0) and math.isfinite(f1) and f0 * f1 < 0.0:
            roots.append(brentq(lambda q: shoot(q)[0], p0, p1, xtol=1e-15, rtol=1e-15, maxiter=200))
    return roots


def _scan(shoot, params, ep, branch, grid_points=41, max_doublings=40):
    E_lo = float(potential(params, max(abs(ep.y_a), abs(ep.y_b))))
    if E_lo <= 0.0:
        E_lo = float(potential(params, 1e-3))
    E_hi = 10.0 * E_lo
    p_seen = 0.0
    cache = {}

    def cached(p):
        if p not in cache:
            cache[p] = shoot(p)
        return cache[p]

    found = []
    seen_root = False
    for _ in range(max_doublings):
        p_top = _p_of_energy(params, ep.y_a, E_hi)
        inner = np.linspace(p_seen, p_top, grid_points)
        for sign in (+1.0, -1.0):
            grid = list(sign * inner)
            values = [cached(p) for p in grid]
            for root in _roots_on_grid(shoot, grid, values, 100.0 * shoot.tol * (1.0 + abs(ep.y_b))):
                seen_root = True
                f, turns = shoot(root)
                if turns == branch and abs(f) <= 1e-8 * (1.0 + abs(ep.y_b)):
                    found.append(root)
        if found:
            return min(found, key=abs)
        if seen_root and params.n == 1:
            # y(t_b) is linear in p_a: the only extremal was on another branch
            break
        top_turns = min(cached(p_top)[1], cached(-p_top)[1])
        if top_turns > branch + 1:
            break
        p_seen = p_top
        E_hi *= 2.0
    raise NoSuchBranch(f"no extremal with {branch} interior turning points for {ep}")


def _warm_root(shoot, p_guess, branch):
    # branch=None follows the nearest root whatever its turning-point count
    f0, turns0 = shoot(p_guess)
    if not math.isfinite(f0) or (branch is not None and turns0 != branch):
        return None
    if f0 == 0.0:
        return p_guess
    step = 1e-4 * (1.0 + abs(p_guess))
    for _ in range(30):
        for q in (p_guess + step, p_guess - step):
            f1, turns1 = shoot(q)
            if math.isfinite(f1) and f1 * f0 < 0.0:
                lo, hi = sorted((p_guess, q))
                root = brentq(lambda s: shoot(s)[0], lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
                return root if branch is None or shoot(root)[1] == branch else None
        step *= 2.0
    return None


def solve_endpoint_bvp(
    params: OscillatorParams,
    ep: EndpointData,
    branch: int | None = 0,
    tol: float = BVP_TOL,
    p_guess: float | None = None,
    allow_conjugate: bool = False,
) -> Extremal:
    """Extremal through ``(t_a, y_a)`` and ``(t_b, y_b)`` by shooting on ``p_a``.

    ``branch`` is the number of interior turning points. Candidate initial
    momenta are scanned over energies above the turning-point bound
    ``potential(max(|y_a|, |y_b|))``, doubling the energy range until a sign
    change of the endpoint mismatch appears, and each bracket is refined with
    Brent's method. Within a branch the smallest ``|p_a|`` wins.

    ``p_guess`` warm-starts the search from a nearby solution. With
    ``branch=None`` (only allowed together with ``p_guess``) the root nearest
    the guess is followed even if a turning point crosses an endpoint, which
    is what differentiating through the solver needs.

    Raises
    ------
    NoSuchBranch
        If no extremal with ``branch`` interior turning points is found.
    ConjugatePoints
        If ``|sin Phi(t_a, t_b)| < 1e-10`` on the solution. Pass
        ``allow_conjugate=True`` to get the smallest-momentum member of the
        degenerate family instead.
    """
    if branch is None:
        if p_guess is None:
            raise ValueError("branch=None needs p_guess")
    elif branch < 0:
        raise ValueError("branch must be >= 0")
    shoot = _Shooter(params, ep, tol)
    root = _warm_root(shoot, p_guess, branch) if p_guess is not None else None
    if root is None:
        if branch is None:
            raise NoSuchBranch(f"lost the extremal near p_a={p_guess} for {ep}")
        root = _scan(shoot, params, ep, branch)
    state = State(ep.t_a, ep.y_a, float(root))
    ext = extremal_through(params, state, ep.t_a, ep.t_b, tol=tol, p_a=float(root))
    if not allow_conjugate:
        s_ab = math.sin(_phase_value(ext, ep.t_a, ep.t_b))
        if abs(s_ab) < _CONJUGATE_EPS:
            raise ConjugatePoints(f"sin Phi(t_a, t_b) = {s_ab:.3e}: endpoints are conjugate")
    return ext
