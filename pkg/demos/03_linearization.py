"""Turning a cosine into a sextic oscillation.

The coordinate map ``x = sqrt(k2n / (n k2)) y|y|**(n-1)`` together with a
reparametrized clock sends the harmonic solution ``x_max cos(omega t_hat)``
to a solution of ``m y'' = -k2n y**(2n-1)``. Here the map is applied for
n = 3, the resulting path is checked against Newton's equation, and its
period is compared with the one obtained from the energy.
"""

import math

import numpy as np

from hj_action import OscillatorParams, coord_inverse, harmonic_extremal, newton_residual, period, potential, time_reparam

params = OscillatorParams(n=3, mass=1.3, k2n=0.8, omega=1.1)
x_max = 0.9
T_hat = 2 * math.pi / params.omega
x = harmonic_extremal(x_max, 0.0, params.omega)
tm = time_reparam(params, x, (0.0, T_hat))

y_max = float(coord_inverse(params, x_max))
T_map = tm(T_hat) - tm(0.0)
T_energy = period(params, float(potential(params, y_max)))
print(f"amplitude y_max = {y_max:.12f}")
print(f"period via the clock map   {T_map:.14f}")
print(f"period via the energy      {T_energy:.14f}")

print("\nt_hat      t(t_hat)    y            m y'' + k y^5")
for s in np.linspace(0.05, 0.95, 7) * T_hat:
    if abs(x(s)) < 0.1 * x_max:
        # the stencil straddles a cusp of y(t_hat) at zeros of x; skip
        continue
    y = float(coord_inverse(params, x(s)))
    print(f"{s:8.4f}  {float(tm(s)):10.6f}  {y:+.8f}  {newton_residual(params, tm, s):+.1e}")
