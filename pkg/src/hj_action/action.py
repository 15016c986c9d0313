"""Closed-form on-shell action and its independent checks.

For an extremal with amplitude ``y_max`` peaking at ``t_max`` the action
between ``(t_a, y_a)`` and ``(t_b, y_b)`` is written as two brackets, one per
side of ``t_max``, each divided by the sine of its phase integral, plus a term
linear in the elapsed time. The same number is obtained by integrating the
Lagrangian along the trajectory (:func:`action_numeric_oracle`), and for
``n = 1`` by the textbook harmonic action (:func:`action_harmonic_feynman`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple


from .errors import ConjugatePoints, PhaseSingularity
from .extremals import EndpointData, Extremal, _phase_value, momentum_scale
from .oscillator import lagrangian, odd_power

__all__ = [
    "ActionForm",
    "ActionValue",
    "action_closed_form",
    "action_quartic",
    "action_harmonic_feynman",
    "action_harmonic_new",
    "action_numeric_oracle",
]

_SIN_EPS = 1e-10
_ONSHELL_COS = 0.5
_ONSHELL_MATCH = 1e-6  # |cos(phi) - on-shell cos| beyond this means off shell


class ActionForm(str, enum.Enum):
    CLOSED_FORM_2N = "closed_form_2n"
    QUARTIC = "quartic_31"
    HARMONIC_FEYNMAN = "harmonic_feynman_B3"
    HARMONIC_NEW = "harmonic_new_B4"
    NUMERIC_ORACLE = "numeric_oracle"


@dataclass(frozen=True)
class ActionValue:
    value: float
    form: ActionForm
    ep: EndpointData
    ext: Extremal | None = None

    def __float__(self):
        return self.value


class Angle(NamedTuple):
    """A phase with its cosine, sine and ``1 - |cos|`` held separately.

    Near a zero of ``y`` the on-shell cosine is known far more precisely than
    any float phase can encode (``pi/2 - 1e-19`` rounds to ``pi/2``), so the
    trigonometric values are not always recomputed from ``phi``.
    """

    phi: float
    cos: float
    sin: float
    delta: float

    @classmethod
    def of(cls, phi: float) -> "Angle":
        c = math.cos(phi)
        # 1 - |cos| = 2 sin^2(phi/2) or 2 cos^2(phi/2), free of cancellation
        delta = 2.0 * (math.sin(0.5 * phi) if c > 0.0 else math.cos(0.5 * phi)) ** 2
        return cls(phi, c, math.sin(phi), delta)


def _over_sine(bracket: float, ang: Angle, side: str, scale: float, y: float, y_max: float, n: int) -> float:
    """``bracket / sin``, keeping the removable case of a turning-point endpoint.

    When the endpoint sits on a turning point the bracket vanishes with
    ``sin**2`` and the quotient tends to zero; any other vanishing sine is a
    genuine singularity.
    """
    s = ang.sin
    if abs(s) >= _SIN_EPS:
        return bracket / s
    if abs(bracket) <= 1e-6 * scale:
        return -(y_max**n) * y * s
    raise PhaseSingularity(f"sin Phi_{side} = {s:.3e}; the closed form degenerates here")


def _signed_root(c: float, n: int) -> float:
    # (cos^2)^((n+1)/2n) / cos, in its removable form
    return math.copysign(abs(c) ** (1.0 / n), c)


def _bracket(n: int, y: float, y_max: float, ang: Angle) -> float:
    """``|y|^(n+1) cos - (n+1) y y_max^n + n y_max^(n+1) sign(cos) |cos|^(1/n)``.

    Near a turning point the three terms cancel to O(sin^2). When ``y`` and
    ``cos`` share a sign and ``|cos| > 1/2`` the bracket is expanded about the turning point,
    with ``u = |y| / y_max = 1 + eps`` and ``|cos| = 1 - delta``:

        sign * y_max^(n+1) * (A - delta - A delta - (n+1) eps + n B),
        A = (1 + eps)^(n+1) - 1,  B = (1 - delta)^(1/n) - 1,

    where every small quantity is formed without subtracting nearby numbers.
    """
    c, delta = ang.cos, ang.delta
    if abs(c) > 0.5 and y != 0.0 and (y > 0.0) == (c > 0.0):
        sign = 1.0 if c > 0.0 else -1.0
        eps = (abs(y) - y_max) / y_max
        A = math.expm1((n + 1) * math.log1p(eps))
        B = math.expm1(math.log1p(-delta) / n)
        return sign * y_max ** (n + 1) * math.fsum((A, -delta, -A * delta, -(n + 1) * eps, n * B))
    return math.fsum((
        abs(y) ** (n + 1) * c,
        -(n + 1) * y * y_max**n,
        n * y_max ** (n + 1) * _signed_root(c, n),
    ))


def _endpoint_angle(ext: Extremal, y: float, phi: float) -> Angle:
    """Sharpen a quadrature phase with the on-shell relation at the endpoint.

    ``sign(cos)|cos|^(1/n)`` amplifies a phase error by ``|cos|^(1/n - 1)``
    near a zero of ``y``. There the on-shell cosine
    ``y|y|^(n-1) / y_max^n`` is used directly, with the sine of matching
    magnitude and the sign of the quadrature value. Far from a zero of
    ``y``, or when the quadrature phase disagrees (off shell), ``phi`` is
    kept.
    """
    n = ext.params.n
    c = float(odd_power(y, n)) / ext.y_max**n
    if n == 1 or not abs(c) < _ONSHELL_COS or abs(math.cos(phi) - c) > _ONSHELL_MATCH:
        return Angle.of(phi)
    s = math.copysign(math.sqrt((1.0 - c) * (1.0 + c)), math.sin(phi))
    return Angle(phi, c, s, 1.0 - abs(c))


def _phases(ext: Extremal, ep: EndpointData, refine: bool = True) -> tuple[Angle, Angle]:
    phi_a = _phase_value(ext, ep.t_a, ext.t_max)
    phi_b = _phase_value(ext, ext.t_max, ep.t_b)
    if refine:
        return _endpoint_angle(ext, ep.y_a, phi_a), _endpoint_angle(ext, ep.y_b, phi_b)
    return Angle.of(phi_a), Angle.of(phi_b)


def action_closed_form(ext: Extremal, ep: EndpointData, refine_phases: bool = True) -> ActionValue:
    """Closed-form action ``S(t_a, y_a; t_b, y_b)`` on the extremal ``ext``.

    The phases are integrals along ``ext.traj``. With ``refine_phases`` an
    endpoint close to ``y = 0`` takes its phase from the on-shell relation
    instead (see ``_endpoint_phase``); the value is the same on shell, only
    better conditioned.

    Raises
    ------
    PhaseSingularity
        If a phase sine is below ``1e-10`` in magnitude and the endpoint is
        not a turning point.
    """
    params = ext.params
    n = params.n
    y_max = ext.y_max
    ang_a, ang_b = _phases(ext, ep, refine_phases)
    scale = y_max ** (n + 1)
    pre = momentum_scale(params) / (n + 1)
    trailing = (n - 1) / (n + 1) * params.k2n / (2 * n) * y_max ** (2 * n) * (ep.t_b - ep.t_a)
    value = math.fsum((
        pre * _over_sine(_bracket(n, ep.y_b, y_max, ang_b), ang_b, "b", scale, ep.y_b, y_max, n),
        pre * _over_sine(_bracket(n, ep.y_a, y_max, ang_a), ang_a, "a", scale, ep.y_a, y_max, n),
        trailing,
    ))
    return ActionValue(value, ActionForm.CLOSED_FORM_2N, ep, ext)


def action_quartic(ext: Extremal, ep: EndpointData, refine_phases: bool = True) -> ActionValue:
    """The quartic (``n = 2``) action written out with its own exponents."""
    params = ext.params
    if params.n != 2:
        raise ValueError(f"action_quartic needs n = 2, got n = {params.n}")
    m, w, k4, k2 = params.mass, params.omega, params.k2n, params.k2
    y_max = ext.y_max
    ang_a, ang_b = _phases(ext, ep, refine_phases)

    def bracket(y, ang):
        c = ang.cos
        return math.fsum((
            (y * y) ** 1.5 * c,
            -3.0 * y * y_max * (y_max * y_max) ** 0.5,
            2.0 * (y_max * y_max) ** 1.5 * math.copysign(abs(c) ** 0.5, c),
        ))

    pre = m * w / 3.0 * math.sqrt(k4 / (2.0 * k2))
    value = math.fsum((
        pre * _over_sine(bracket(ep.y_b, ang_b), ang_b, "b", y_max**3, ep.y_b, y_max, 2),
        pre * _over_sine(bracket(ep.y_a, ang_a), ang_a, "a", y_max**3, ep.y_a, y_max, 2),
        k4 * y_max**4 * (ep.t_b - ep.t_a) / 12.0,
    ))
    return ActionValue(value, ActionForm.QUARTIC, ep, ext)


def action_harmonic_feynman(ep: EndpointData, mass: float, omega: float) -> ActionValue:
    """Textbook harmonic action ``m w [(x_b^2 + x_a^2) cos wT - 2 x_a x_b] / (2 sin wT)``.

    Raises
    ------
    ConjugatePoints
        When ``omega * T`` is a multiple of pi.
    """
    wT = omega * (ep.t_b - ep.t_a)
    s = math.sin(wT)
    if abs(s) < 1e-12:
        raise ConjugatePoints(f"sin(omega T) = {s:.3e}")
    x_a, x_b = ep.y_a, ep.y_b
    value = mass * omega * ((x_b**2 + x_a**2) * math.cos(wT) - 2.0 * x_b * x_a) / (2.0 * s)
    return ActionValue(value, ActionForm.HARMONIC_FEYNMAN, ep)


def action_harmonic_new(ext: Extremal, ep: EndpointData) -> ActionValue:
    """Two-bracket harmonic action built from ``x_max`` and ``t_max``."""
    params = ext.params
    if params.n != 1:
        raise ValueError(f"action_harmonic_new needs n = 1, got n = {params.n}")
    x_max = ext.y_max
    ang_a, ang_b = _phases(ext, ep)

    def term(x, ang, side):
        c = ang.cos
        # x_max^2 cos^2 / cos written as x_max^2 cos
        bracket = math.fsum((x * x * c, -2.0 * x * x_max, x_max * x_max * c))
        return _over_sine(bracket, ang, side, x_max**2, x, x_max, 1)

    # m omega / 2 when k2n = k2
    pre = 0.5 * momentum_scale(params)
    value = pre * math.fsum((term(ep.y_b, ang_b, "b"), term(ep.y_a, ang_a, "a")))
    return ActionValue(value, ActionForm.HARMONIC_NEW, ep, ext)


def action_numeric_oracle(ext: Extremal, ep: EndpointData) -> ActionValue:
    """Integral of the Lagrangian along ``ext.traj``, split at ``t_max``.

    Both pieces are oriented integrals, so ``t_max`` may lie outside
    ``[t_a, t_b]``. Gauss-Legendre with ``7n + 1`` nodes per integrator step
    is exact for the dense-output polynomials.
    """
    params = ext.params
    inv_m = 1.0 / params.mass

    def L(y, p):
        return lagrangian(params, y, p * inv_m)

    nodes = 7 * params.n + 1
    first = ext.traj.quadrature(L, ep.t_a, ext.t_max, nodes)
    second = ext.traj.quadrature(L, ext.t_max, ep.t_b, nodes)
    return ActionValue(math.fsum((first, second)), ActionForm.NUMERIC_ORACLE, ep, ext)
