"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPTANCE <k> PASS|FAIL`` line with the
measured figure and its tolerance, then asserts.
"""

import math
import time
from types import SimpleNamespace

import numpy as np
import pytest

from hj_action import (
    OscillatorParams,
    action_closed_form,
    action_harmonic_feynman,
    action_numeric_oracle,
    amplitude_phase_form,
    amplitude_relation,
    coord_forward,
    coord_inverse,
    endpoint_form,
    energy_identity,
    extremal_from_turning_point,
    harmonic_endpoint_form,
    harmonic_extremal,
    hj_residuals,
    momentum_endpoint_a,
    momentum_endpoint_b,
    newton_residual,
    residual_integral_equation,
    time_reparam,
)
from hj_action.oscillator import odd_power
from hj_action.sampling import config_rng, random_params

from conftest import draw_configs


@pytest.fixture
def report(capsys):
    def emit(k, title, passed, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {k} {'PASS' if passed else 'FAIL'} {title}: {detail}")

    return emit


def test_1_harmonic_reduction(report):
    configs = draw_configs(1, 100, seed=101)
    start = time.perf_counter()
    worst = 0.0
    for c in configs:
        p = c.params
        closed = action_closed_form(c.ext, c.ep).value
        feynman = action_harmonic_feynman(c.ep, p.mass, math.sqrt(p.k2n / p.mass)).value
        worst = max(worst, abs(closed - feynman))
    elapsed = time.perf_counter() - start
    min_sine = min(abs(math.sin(c.total_phase)) for c in configs)
    ok = worst < 1e-12 and elapsed < 1.0 and min_sine > 0.1
    report(1, "harmonic reduction", ok, f"max abs gap {worst:.2e} (tol 1e-12), evaluation {elapsed:.3f} s (budget 1 s), min |sin wT| {min_sine:.3f}")
    assert ok


def test_2_oracle_equivalence(report):
    start = time.perf_counter()
    worst = {}
    for n in (1, 2, 3):
        gaps = []
        for c in draw_configs(n, 100, seed=202):
            oracle = action_numeric_oracle(c.ext, c.ep).value
            gaps.append(abs(action_closed_form(c.ext, c.ep).value - oracle) / (1.0 + abs(oracle)))
        worst[n] = max(gaps)
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) < 1e-6 and elapsed < 30.0
    detail = ", ".join(f"n={n} {g:.2e}" for n, g in worst.items())
    report(2, "oracle equivalence", ok, f"max relative gap {detail} (tol 1e-6), {elapsed:.1f} s (budget 30 s)")
    assert ok


def test_3_hamilton_jacobi(report):
    start = time.perf_counter()
    worst, signs = {}, set()
    for n in (1, 2, 3):
        res = []
        for c in draw_configs(n, 25, seed=303, recoverable=True):
            r = hj_residuals(c.params, c.ep, branch=c.branch)
            res.append(r.max_residual)
            signs.add(r.a_sign_convention)
        worst[n] = max(res)
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) < 1e-5 and elapsed < 120.0
    detail = ", ".join(f"n={n} {g:.2e}" for n, g in worst.items())
    report(3, "Hamilton-Jacobi residuals", ok, f"max residual {detail} (tol 1e-5), a-endpoint convention {sorted(signs)}, {elapsed:.1f} s (budget 120 s)")
    assert ok


def test_4_representation_equivalence(report):
    rng = np.random.default_rng(404)
    harmonic_gap = 0.0
    for _ in range(20):
        x_max, t_max, omega = rng.uniform(0.5, 1.5), rng.uniform(-1, 1), rng.uniform(0.5, 2.0)
        while True:
            t_a, t_b = np.sort(rng.uniform(-2.0, 2.0, 2))
            if abs(math.sin(omega * (t_b - t_a))) > 0.1:
                break
        x = harmonic_extremal(x_max, t_max, omega)
        grid = np.linspace(t_a, t_b, 100)
        ends = harmonic_endpoint_form(float(x(t_a)), t_a, float(x(t_b)), t_b, omega, grid)
        harmonic_gap = max(harmonic_gap, float(np.max(np.abs(ends - x(grid)))))

    general_gap, direct_gap = {}, 0.0
    for n in (2, 3):
        gap = 0.0
        for c in draw_configs(n, 20, seed=404):
            for t in np.linspace(c.ep.t_a, c.ep.t_b, 100):
                u_end = odd_power(endpoint_form(c.ext, c.ep, t), n)
                u_amp = odd_power(amplitude_phase_form(c.ext, t), n)
                gap = max(gap, abs(u_end - u_amp) / c.ext.y_max**n)
                # informational: the n-th root near zeros of y amplifies the same error
                direct_gap = max(direct_gap, abs(endpoint_form(c.ext, c.ep, t) - amplitude_phase_form(c.ext, t)))
        general_gap[n] = gap
    ok = harmonic_gap < 1e-12 and max(general_gap.values()) < 1e-7
    detail = ", ".join(f"n={n} {g:.2e}" for n, g in general_gap.items())
    report(4, "endpoint vs amplitude form", ok, f"harmonic {harmonic_gap:.2e} (tol 1e-12); y|y|^(n-1)/y_max^n {detail} (tol 1e-7); direct in y {direct_gap:.2e}")
    assert ok


def test_5_linearization_transport(report):
    rng = np.random.default_rng(505)
    transport, round_trip = 0.0, 0.0
    for n in (2, 3):
        for _ in range(3):
            params = random_params(rng, n)
            ys = rng.uniform(-3.0, 3.0, 1000)
            round_trip = max(round_trip, float(np.max(np.abs(coord_inverse(params, coord_forward(params, ys)) - ys))))
            x_max, t_hat_max = rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0)
            T_hat = 2.0 * math.pi / params.omega
            x = harmonic_extremal(x_max, t_hat_max, params.omega)
            tm = time_reparam(params, x, (t_hat_max - 0.6 * T_hat, t_hat_max + 0.6 * T_hat))
            grid = np.linspace(t_hat_max - 0.5 * T_hat, t_hat_max + 0.5 * T_hat, 60)
            for s in grid[np.abs(x(grid)) > 0.1 * x_max]:
                transport = max(transport, abs(newton_residual(params, tm, float(s))))
    ok = transport < 1e-6 and round_trip < 1e-12
    report(5, "linearization transport", ok, f"Newton residual {transport:.2e} (tol 1e-6), round trip {round_trip:.2e} (tol 1e-12)")
    assert ok


def test_6_energy_identity(report):
    rng = np.random.default_rng(606)
    worst = 0.0
    for n in range(1, 7):
        for _ in range(50):
            p = OscillatorParams(n=n, mass=rng.uniform(0.5, 2), k2n=rng.uniform(0.5, 2))
            y_max = rng.uniform(0.1, 3.0)
            ext = SimpleNamespace(params=p, y_max=y_max, E=p.k2n * y_max ** (2 * n) / (2 * n))
            lhs, rhs = energy_identity(ext)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    ok = worst < 1e-14
    report(6, "energy identity", ok, f"max relative gap {worst:.2e} over n=1..6 (tol 1e-14)")
    assert ok


def test_7_amplitude_phase(report):
    integral, pair = 0.0, 0.0
    for n in (1, 2, 3):
        for c in draw_configs(n, 10, seed=707, recoverable=True):
            scale = c.ext.y_max**n
            for t in np.linspace(c.ep.t_a, c.ep.t_b, 50):
                integral = max(integral, abs(residual_integral_equation(c.ext, t)) / scale)
                lhs, rhs = amplitude_relation(c.ext, t)
                pair = max(pair, abs(lhs - rhs) / c.ext.y_max ** (n - 1))
    ok = integral < 1e-7 and pair < 1e-8
    report(7, "amplitude-phase relations", ok, f"integral equation {integral:.2e} (tol 1e-7), amplitude pair {pair:.2e} (tol 1e-8)")
    assert ok


def test_8_omega_independence(report):
    worst = 0.0
    for n in (1, 2, 3):
        for c in draw_configs(n, 20, seed=808):
            base = action_closed_form(c.ext, c.ep).value
            for factor in (0.5, 2.0, 10.0):
                q = c.params.with_omega(c.params.omega * factor)
                ext = extremal_from_turning_point(q, c.ext.y_max, c.ext.t_max, c.ep.t_a, c.ep.t_b, tol=1e-12)
                worst = max(worst, abs(action_closed_form(ext, c.ep).value - base) / abs(base))
    ok = worst < 1e-10
    report(8, "omega independence", ok, f"max relative change {worst:.2e} (tol 1e-10)")
    assert ok


def test_9_momentum_formulas(report):
    worst = {}
    for n in (1, 2, 3):
        gap = 0.0
        for c in draw_configs(n, 50, seed=909):
            m = c.params.mass
            for t, formula in ((c.ep.t_b, momentum_endpoint_b), (c.ep.t_a, momentum_endpoint_a)):
                gap = max(gap, abs(formula(c.ext, t) - m * c.ext.traj.velocity(t)))
        worst[n] = gap
    ok = max(worst.values()) < 1e-7
    detail = ", ".join(f"n={n} {g:.2e}" for n, g in worst.items())
    report(9, "endpoint momenta", ok, f"max |p_formula - m ydot| {detail} (tol 1e-7)")
    assert ok
