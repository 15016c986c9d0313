import math

import numpy as np
import pytest
from scipy.special import beta

from hj_action import NonpositiveEnergy, OscillatorParams, State, hamiltonian, integrate, lagrangian, period, potential
from hj_action.oscillator import amplitude, force, integrate_span, odd_power


class TestParams:
    def test_k2_is_derived(self):
        p = OscillatorParams(n=3, mass=2.0, k2n=1.5, omega=0.7)
        assert p.k2 == 2.0 * 0.7**2

    @pytest.mark.parametrize("kwargs", [{"n": 0}, {"n": 1.5}, {"mass": 0.0}, {"k2n": -1.0}, {"omega": math.inf}])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            OscillatorParams(**kwargs)

    def test_harmonic_constructor(self):
        p = OscillatorParams.harmonic(2.0, 3.0)
        assert p.n == 1 and p.k2n == p.k2


class TestEnergyFunctions:
    @pytest.mark.parametrize(
        "n, k, y, expected", [(1, 1.0, 0.0, 0.0), (2, 4.0, 1.0, 1.0), (3, 6.0, -1.0, 1.0)]
    )
    def test_potential(self, n, k, y, expected):
        assert potential(OscillatorParams(n=n, k2n=k), y) == pytest.approx(expected, abs=1e-15)

    def test_potential_even(self):
        p = OscillatorParams(n=3, k2n=1.3)
        ys = np.linspace(-2, 2, 41)
        np.testing.assert_array_equal(potential(p, ys), potential(p, -ys))

    @pytest.mark.parametrize(
        "n, m, k, y, ydot, expected",
        [(1, 1.0, 1.0, 0.0, 0.0, 0.0), (1, 1.0, 1.0, 1.0, 1.0, 0.0), (2, 2.0, 4.0, 1.0, 0.0, -1.0)],
    )
    def test_lagrangian(self, n, m, k, y, ydot, expected):
        assert lagrangian(OscillatorParams(n=n, mass=m, k2n=k), y, ydot) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize(
        "n, k, y, p, expected", [(2, 4.0, 0.0, 0.0, 0.0), (1, 1.0, 1.0, 0.0, 0.5), (2, 4.0, 1.0, 2.0, 3.0)]
    )
    def test_hamiltonian(self, n, k, y, p, expected):
        assert hamiltonian(OscillatorParams(n=n, k2n=k), y, p) == pytest.approx(expected, abs=1e-15)

    def test_odd_power_negative_base(self):
        assert odd_power(-2.0, 3) == -8.0
        assert odd_power(-8.0, 1.0 / 3.0) == pytest.approx(-2.0, rel=1e-15)

    def test_force_is_minus_gradient(self):
        p = OscillatorParams(n=3, k2n=0.8)
        y, h = 0.7, 1e-5
        fd = -(potential(p, y + h) - potential(p, y - h)) / (2 * h)
        assert force(p, y) == pytest.approx(fd, rel=1e-9)

    def test_amplitude_inverts_potential(self):
        p = OscillatorParams(n=2, k2n=1.7)
        assert potential(p, amplitude(p, 0.3)) == pytest.approx(0.3, rel=1e-15)


class TestIntegrate:
    def test_cos_solution(self, harmonic):
        traj = integrate(harmonic, State(0.0, 1.0, 0.0), math.pi)
        assert traj(math.pi)[0] == pytest.approx(-1.0, abs=1e-9)

    def test_sin_solution(self, harmonic):
        traj = integrate(harmonic, State(0.0, 0.0, 1.0), math.pi / 2)
        assert traj(math.pi / 2)[0] == pytest.approx(1.0, abs=1e-9)

    def test_quartic_quarter_period(self, quartic):
        quarter = period(quartic, 0.25) / 4
        traj = integrate(quartic, State(0.0, 1.0, 0.0), quarter)
        assert traj(quarter)[0] == pytest.approx(0.0, abs=1e-7)

    def test_backward(self, harmonic):
        traj = integrate(harmonic, State(0.0, 1.0, 0.0), -math.pi / 2)
        assert traj.t_start == pytest.approx(-math.pi / 2)
        y, p = traj(-math.pi / 2)
        assert y == pytest.approx(0.0, abs=1e-9) and p == pytest.approx(1.0, abs=1e-9)

    def test_zero_length(self, quartic):
        traj = integrate(quartic, State(1.0, 0.5, 0.1), 1.0)
        assert len(traj.samples) == 1
        assert traj(1.0) == (0.5, 0.1)

    def test_samples_strictly_increasing(self, quartic):
        traj = integrate(quartic, State(0.0, 1.0, 0.0), -5.0)
        assert np.all(np.diff(traj.t) > 0)

    def test_outside_span(self, quartic):
        from hj_action import OutsideTrajectory

        traj = integrate(quartic, State(0.0, 1.0, 0.0), 1.0)
        with pytest.raises(OutsideTrajectory):
            traj(1.5)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_newton_residual_at_midpoints(self, n):
        params = OscillatorParams(n=n, mass=1.3, k2n=0.9)
        traj = integrate(params, State(0.0, 0.8, -0.3), 8.0)
        mids = 0.5 * (traj.t[1:] + traj.t[:-1])
        h = 1e-3
        y = lambda s: traj(s)[0]
        acc = (y(mids + h) - 2 * y(mids) + y(mids - h)) / h**2
        res = params.mass * acc - force(params, y(mids))
        assert np.max(np.abs(res)) < 1e-5

    def test_rejects_nonpositive_tol(self, quartic):
        with pytest.raises(ValueError):
            integrate(quartic, State(0.0, 1.0, 0.0), 1.0, tol=0.0)


class TestPeriod:
    def test_harmonic_unit(self, harmonic):
        for E in (0.01, 1.0, 7.0):
            assert period(harmonic, E) == pytest.approx(2 * math.pi, abs=1e-10)

    def test_harmonic_omega_two(self):
        assert period(OscillatorParams.harmonic(1.0, 2.0), 0.3) == pytest.approx(math.pi, abs=1e-10)

    def test_quartic_closed_form_and_ivp_timing(self, quartic):
        T = period(quartic, 0.25)
        # 4 * sqrt(m/(2E)) * y_max * int_0^1 (1 - u^4)^(-1/2) du
        exact = 4 * math.sqrt(2.0) * beta(0.25, 0.5) / 4
        assert T == pytest.approx(exact, abs=1e-12)
        traj = integrate(quartic, State(0.0, 1.0, 0.0), 2.5 * T)
        maxima = traj.turning_times(+1)
        assert np.diff(maxima)[0] == pytest.approx(T, abs=1e-8)

    def test_nonpositive_energy(self, quartic):
        with pytest.raises(NonpositiveEnergy):
            period(quartic, 0.0)


class TestInvariants:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_energy_conservation(self, n):
        params = OscillatorParams(n=n, mass=0.7, k2n=1.9)
        traj = integrate(params, State(0.0, 0.3, 1.1), 30.0)
        E = hamiltonian(params, traj.y, traj.p)
        assert np.max(np.abs(E - E[0]) / E[0]) < 1e-9

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_time_reversal(self, n):
        params = OscillatorParams(n=n, k2n=1.2)
        fwd = integrate(params, State(0.0, 0.9, 0.4), 7.0)
        y1, p1 = fwd(7.0)
        back = integrate(params, State(7.0, y1, p1), 0.0)
        y0, p0 = back(0.0)
        assert abs(y0 - 0.9) < 1e-8 and abs(p0 - 0.4) < 1e-8

    @pytest.mark.parametrize("n", [2, 3])
    def test_scaling(self, n):
        # lambda * y(lambda**(n-1) * t) solves the same equation
        params = OscillatorParams(n=n, mass=1.1, k2n=0.8)
        lam = 1.7
        base = integrate(params, State(0.0, 0.6, 0.2), 6.0)
        scaled = integrate(params, State(0.0, lam * 0.6, lam**n * 0.2), 6.0 / lam ** (n - 1))
        ts = np.linspace(0.0, 6.0, 25)
        np.testing.assert_allclose(scaled(ts / lam ** (n - 1))[0], lam * base(ts)[0], atol=1e-8)
        assert hamiltonian(params, lam * 0.6, lam**n * 0.2) == pytest.approx(
            lam ** (2 * n) * hamiltonian(params, 0.6, 0.2), rel=1e-14
        )

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_periodicity(self, n):
        params = OscillatorParams(n=n, mass=0.9, k2n=1.4)
        y0, p0 = 0.5, -0.7
        T = period(params, hamiltonian(params, y0, p0))
        traj = integrate(params, State(0.0, y0, p0), 1.0 + T)
        ts = np.linspace(0.0, 1.0, 11)
        np.testing.assert_allclose(traj(ts + T)[0], traj(ts)[0], atol=1e-7)

    def test_integrate_span_covers_both_sides(self, quartic):
        traj = integrate_span(quartic, State(1.0, 0.5, 0.0), -2.0, 3.0)
        assert traj.t_start == -2.0 and traj.t_end == 3.0
        assert traj(1.0)[0] == pytest.approx(0.5, abs=1e-15)
