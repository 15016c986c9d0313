"""Certifying the action as a solution of the Hamilton-Jacobi equations.

The derivatives of ``S(t_a, y_a, t_b, y_b)`` are taken by Richardson
extrapolated central differences, re-solving the boundary-value problem at
every perturbed endpoint. They should reproduce the endpoint momenta and
the energy. At the initial endpoint the numbers pick out
``dS/dy_a = -p_a``.
"""

from hj_action import EndpointData, OscillatorParams, hj_residuals

params = OscillatorParams(n=2, mass=1.0, k2n=1.0)
r = hj_residuals(params, EndpointData(0.0, 0.2, 1.0, 0.5))

print(f"E   = {r.E:.12f}")
print(f"p_a = {r.p_a:+.12f}   p_b = {r.p_b:+.12f}")
print()
print(f"dS/dy_b = {r.dS_dy_b:+.12f}   (expect +p_b)   residual {r.residual_py_b:.1e}")
print(f"dS/dt_b = {r.dS_dt_b:+.12f}   (expect -E)     residual {r.residual_E_b:.1e}")
print(f"dS/dy_a = {r.dS_dy_a:+.12f}   (expect -p_a)   residual {r.residual_py_a:.1e}")
print(f"dS/dt_a = {r.dS_dt_a:+.12f}   (expect +E)     residual {r.residual_E_a:.1e}")
print(f"\nwith the opposite a-endpoint sign the residual would be {r.residual_py_a_flipped:.2f}")
print(f"time translation: dS/dt_a + dS/dt_b = {r.dS_dt_a + r.dS_dt_b:.1e}")
