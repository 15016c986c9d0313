"""Several extremals join the same endpoints.

Over a long enough interval the quartic boundary-value problem has one
solution per count of interior turning points. Each branch has its own
amplitude and its own action; the closed form tracks all of them.
"""

from hj_action import EndpointData, HJActionError, OscillatorParams, action_closed_form, action_numeric_oracle, solve_endpoint_bvp

params = OscillatorParams(n=2)
ep = EndpointData(0.0, 0.2, 3.0, 0.5)

print("branch  y_max        p_a          S (closed)        S (quadrature)")
for branch in range(4):
    try:
        ext = solve_endpoint_bvp(params, ep, branch)
    except HJActionError as exc:
        print(f"{branch:6d}  {type(exc).__name__}: no such path")
        continue
    closed = action_closed_form(ext, ep).value
    oracle = action_numeric_oracle(ext, ep).value
    print(f"{branch:6d}  {ext.y_max:10.6f}  {ext.p_a:+10.6f}  {closed:+.12f}  {oracle:+.12f}")
