"""Non-canonical map between the harmonic oscillator and the 2n-oscillator.

Space is deformed pointwise,

    x = sqrt(k2n / (n k2)) * y |y|**(n-1),
    y = (n k2 / k2n)**(1/2n) * sign(x) |x|**(1/n),

and time is reparametrized by a quadrature,

    dt/dt_hat = n**(-(2n-1)/2n) * (k2 / k2n)**(1/2n) * |x|**(-(n-1)/n).

A harmonic solution ``x(t_hat)`` of frequency ``omega`` is carried to a
solution ``y(t)`` of ``m y'' = -k2n y**(2n-1)``. The map is not canonical, so
momenta are not transported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from .errors import SingularQuadrature
from .oscillator import OscillatorParams, Trajectory, force, odd_power

__all__ = [
    "HarmonicCoords",
    "TimeMap",
    "coord_forward",
    "coord_inverse",
    "dt_dthat",
    "dthat_dt",
    "harmonic_extremal",
    "time_reparam",
    "newton_residual",
    "QUAD_TOL",
]

QUAD_TOL = 1e-13


@dataclass(frozen=True)
class HarmonicCoords:
    t_hat: float
    x: float


def coord_forward(params: OscillatorParams, y):
    n = params.n
    return math.sqrt(params.k2n / (n * params.k2)) * odd_power(y, n)


def coord_inverse(params: OscillatorParams, x):
    # sign(x)|x|^(1/n) is 0 at x = 0, the continuous extension
    n = params.n
    return (n * params.k2 / params.k2n) ** (1.0 / (2 * n)) * odd_power(x, 1.0 / n)


def dt_dthat(params: OscillatorParams, x):
    n = params.n
    return (
        n ** (-(2 * n - 1) / (2 * n))
        * (params.k2 / params.k2n) ** (1.0 / (2 * n))
        * np.abs(x) ** (-(n - 1) / n)
    )


def dthat_dt(params: OscillatorParams, y):
    n = params.n
    return math.sqrt(n) * math.sqrt(params.k2n / params.k2) * np.abs(y) ** (n - 1)


def harmonic_extremal(x_max: float, t_hat_max: float, omega: float) -> Callable:
    """``x(t_hat) = x_max cos(omega (t_hat - t_hat_max))`` as a vectorized callable."""

    def x(t_hat):
        return x_max * np.cos(omega * (np.asarray(t_hat, dtype=float) - t_hat_max))

    x.derivative = lambda t_hat: -omega * x_max * np.sin(omega * (np.asarray(t_hat, dtype=float) - t_hat_max))
    x.t_hat_max = t_hat_max
    return x


def _as_callables(traj):
    if isinstance(traj, Trajectory):
        m = traj.params.mass
        return (lambda s: traj(s)[0]), (lambda s: traj(s)[1] / m)
    x = traj
    deriv = getattr(traj, "derivative", None)
    if deriv is None:
        def deriv(s, h=1e-6):
            return (x(s + h) - x(s - h)) / (2.0 * h)
    return x, deriv


def _find_zeros(x, a, b, samples=2049):
    grid = np.linspace(a, b, samples)
    values = np.asarray(x(grid), dtype=float)
    zeros = []
    for i in range(samples - 1):
        if values[i] == 0.0:
            zeros.append(grid[i])
        elif values[i] * values[i + 1] < 0.0:
            zeros.append(brentq(x, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15))
    if values[-1] == 0.0:
        zeros.append(grid[-1])
    return np.array(zeros)


def _find_maximum(x, a, b, samples=2049):
    grid = np.linspace(a, b, samples)
    i = int(np.argmax(np.asarray(x(grid), dtype=float)))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, samples - 1)]
    res = minimize_scalar(lambda s: -float(x(s)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    return float(res.x)


@dataclass(frozen=True)
class TimeMap:
    """Monotone map ``t(t_hat)`` built by quadrature of ``dt/dt_hat``.

    Cumulative values are stored at ``nodes``; evaluation between nodes adds
    one more quadrature from the nearest node to the left. ``singular_points``
    lists the zeros of ``x`` where the integrand diverges integrably.
    """

    params: OscillatorParams
    x: Callable = field(repr=False)
    dx: Callable = field(repr=False)
    nodes: np.ndarray
    cumulative: np.ndarray
    singular_points: np.ndarray
    anchor: tuple[float, float]
    epsrel: float = 1e-13

    @property
    def span(self) -> tuple[float, float]:
        return float(self.nodes[0]), float(self.nodes[-1])

    def _piece(self, a: float, b: float) -> float:
        return _integrate_piece(self.params, self.x, self.dx, a, b, self._is_zero(a), self._is_zero(b), self.epsrel)

    def _is_zero(self, s: float) -> bool:
        return bool(self.singular_points.size) and bool(np.any(self.singular_points == s))

    def _scalar(self, t_hat: float) -> float:
        lo, hi = self.span
        if not lo <= t_hat <= hi:
            raise ValueError(f"t_hat={t_hat} outside the mapped span [{lo}, {hi}]")
        i = int(np.searchsorted(self.nodes, t_hat, side="right") - 1)
        i = min(i, len(self.nodes) - 1)
        if self.nodes[i] == t_hat:
            return float(self.cumulative[i])
        return float(self.cumulative[i] + self._piece(self.nodes[i], t_hat))

    def __call__(self, t_hat):
        arr = np.asarray(t_hat, dtype=float)
        if arr.ndim == 0:
            return self._scalar(float(arr))
        return np.array([self._scalar(float(s)) for s in arr.ravel()]).reshape(arr.shape)

    def inverse(self, t: float) -> float:
        """``t_hat`` with ``self(t_hat) = t``."""
        i = int(np.searchsorted(self.cumulative, t, side="right") - 1)
        if i < 0 or i >= len(self.nodes) - 1:
            if t == self.cumulative[-1]:
                return float(self.nodes[-1])
            raise ValueError(f"t={t} outside the mapped range")
        if t == self.cumulative[i]:
            return float(self.nodes[i])
        return brentq(lambda s: self._scalar(s) - t, self.nodes[i], self.nodes[i + 1], xtol=1e-15, rtol=1e-15)


def _slope(x, dx, z: float, s: float) -> float:
    """``|x(s) - x(z)| / |s - z|``, accurate also for ``s`` next to ``z``."""
    if s == z:
        return abs(float(dx(z)))
    if abs(s - z) < 1e-3:
        # Simpson on x': no subtraction of nearly equal x values
        return abs(float(dx(z)) + 4.0 * float(dx(0.5 * (s + z))) + float(dx(s))) / 6.0
    return abs((float(x(s)) - float(x(z))) / (s - z))


def _integrate_from_zero(params, x, dx, z: float, s_end: float, epsrel: float) -> float:
    # s = z + (s_end - z) v**n turns |x|^(-(n-1)/n) ds into a smooth v-integrand
    n = params.n
    alpha = (n - 1) / n
    L = s_end - z
    K = float(dt_dthat(params, 1.0))

    def h(v):
        return _slope(x, dx, z, z + L * v**n) ** (-alpha)

    value, _ = quad(h, 0.0, 1.0, epsabs=0.0, epsrel=epsrel, limit=200)
    return K * n * math.copysign(abs(L) ** (1.0 - alpha), L) * value


def _integrate_piece(params, x, dx, a, b, zero_a, zero_b, epsrel=QUAD_TOL) -> float:
    if a == b:
        return 0.0
    n = params.n
    if n == 1:
        return float(dt_dthat(params, 1.0)) * (b - a)
    if zero_a and zero_b:
        mid = 0.5 * (a + b)
        return _integrate_from_zero(params, x, dx, a, mid, epsrel) - _integrate_from_zero(params, x, dx, b, mid, epsrel)
    if zero_a:
        return _integrate_from_zero(params, x, dx, a, b, epsrel)
    if zero_b:
        return -_integrate_from_zero(params, x, dx, b, a, epsrel)
    value, _ = quad(lambda s: float(dt_dthat(params, x(s))), a, b, epsabs=0.0, epsrel=epsrel, limit=200)
    return value


def time_reparam(
    params: OscillatorParams,
    traj,
    t_hat_span: tuple[float, float],
    anchor: tuple[float, float] | None = None,
    pieces: int = 32,
    tol: float = QUAD_TOL,
) -> TimeMap:
    """Build ``t(t_hat)`` over ``t_hat_span`` for the harmonic solution ``traj``.

    ``traj`` is a harmonic :class:`Trajectory` or a callable ``x(t_hat)``. The
    integration constant is fixed by ``anchor = (t_hat_0, t_0)``; the default
    sends a maximum of ``x`` to the same numerical time. Zeros of ``x`` are
    located by root-finding and become nodes; next to a zero ``z`` the
    substitution ``t_hat = z + L v**n`` removes the integrable singularity.
    ``tol`` is the relative tolerance of each adaptive quadrature (floored
    at ``1e-13``, the smallest QUADPACK accepts reliably).

    Raises
    ------
    SingularQuadrature
        If ``x`` touches zero without changing sign (non-integrable for
        ``n > 1``).
    """
    a, b = float(min(t_hat_span)), float(max(t_hat_span))
    epsrel = max(float(tol), QUAD_TOL)
    x, dx = _as_callables(traj)
    if isinstance(traj, Trajectory):
        zeros = traj.zeros(a, b)
    else:
        zeros = _find_zeros(x, a, b)
    # a span that starts or ends on a zero has no sign change there to detect
    x_scale = float(np.max(np.abs(np.asarray(x(np.linspace(a, b, 257)), dtype=float))))
    ends = [e for e in (a, b) if abs(float(x(e))) <= 1e-12 * x_scale]
    zeros = np.unique(np.concatenate((np.asarray(zeros, dtype=float), ends)))
    if params.n > 1:
        for z in zeros:
            if abs(float(dx(z))) < 1e-12 * max(1.0, abs(float(x(a))), abs(float(x(b)))):
                raise SingularQuadrature(f"x has a double zero at t_hat={z}")
    if anchor is None:
        t_hat_max = getattr(traj, "t_hat_max", None)
        if t_hat_max is None:
            t_hat_max = _find_maximum(x, a, b)
        anchor = (float(t_hat_max), float(t_hat_max))
    t_hat0, t0 = anchor
    if params.n > 1 and any(z == t_hat0 for z in zeros):
        raise SingularQuadrature("anchor on a zero of x")

    grid = np.linspace(a, b, pieces + 1)
    if len(zeros):
        # a grid node a few ulps from a zero would leave a nearly singular "regular" piece
        near = np.min(np.abs(grid[:, None] - zeros[None, :]), axis=1) < 1e-6 * (b - a)
        near[[0, -1]] = False
        grid = grid[~near]
    nodes = np.unique(np.concatenate((grid, zeros, [t_hat0])))
    zero_set = set(zeros.tolist())
    increments = [
        _integrate_piece(params, x, dx, lo, hi, lo in zero_set, hi in zero_set, epsrel)
        for lo, hi in zip(nodes[:-1], nodes[1:])
    ]
    cumulative = np.concatenate(([0.0], np.cumsum(increments)))
    i0 = int(np.searchsorted(nodes, t_hat0))
    cumulative = cumulative - cumulative[i0] + t0
    nodes_in = nodes[(nodes >= a) & (nodes <= b)]
    keep = np.isin(nodes, nodes_in)
    return TimeMap(params, x, dx, nodes[keep], cumulative[keep], np.asarray(zeros, dtype=float), (t_hat0, t0), epsrel)


def _d1(f, s, h):
    return (f(s - 2 * h) - 8 * f(s - h) + 8 * f(s + h) - f(s + 2 * h)) / (12 * h)


def _d2(f, s, h):
    return (-f(s - 2 * h) + 16 * f(s - h) - 30 * f(s) + 16 * f(s + h) - f(s + 2 * h)) / (12 * h * h)


def newton_residual(params: OscillatorParams, time_map: TimeMap, t_hat: float, h: float | None = None) -> float:
    """``m y'' + k2n y**(2n-1)`` for the mapped solution, at the image of ``t_hat``.

    ``y`` and ``t`` are both differentiated in ``t_hat`` with five-point
    stencils and combined with the parametric chain rule
    ``y'' = (y_ss t_s - y_s t_ss) / t_s**3``. The default step is ``2e-4`` of
    the harmonic period, a balance between truncation near zeros of ``x`` and
    rounding.
    """
    if h is None:
        h = 2e-4 * 2.0 * math.pi / params.omega

    def y_of(s):
        return float(coord_inverse(params, time_map.x(s)))

    y_s, y_ss = _d1(y_of, t_hat, h), _d2(y_of, t_hat, h)
    t_s, t_ss = _d1(time_map, t_hat, h), _d2(time_map, t_hat, h)
    ydd = (y_ss * t_s - y_s * t_ss) / t_s**3
    return float(params.mass * ydd - force(params, y_of(t_hat)))
