import math

import numpy as np
import pytest

from mbtop.core import first_integrals, make_params, preset
from mbtop.errors import OnSingularRay, WrongSignRegime
from mbtop.integrate import IntegratorSpec
from mbtop.pendulum import (
    PendulumState,
    from_pendulum,
    integrate_pendulum,
    make_context,
    pendulum_accel,
    pendulum_energy,
    to_pendulum,
    verify_reduction,
)


MB = preset("maxwell_bloch")
LH = preset("lorenz_hamilton")


def random_definite_params(rng, lo=0.5, hi=2.0):
    """Random parameters in the reducible regime b2*b3 < 0."""
    mags = rng.uniform(lo, hi, size=3)
    s1 = rng.choice([-1.0, 1.0])
    s2 = rng.choice([-1.0, 1.0])
    return make_params(s1 * mags[0], s2 * mags[1], -s2 * mags[2])


class TestContext:
    def test_gamma_oracles(self):
        assert make_context(MB).gamma == pytest.approx(1.0)
        assert make_context(LH).gamma == pytest.approx(1.0)
        assert make_context(make_params(1, -4, 1)).gamma == pytest.approx(0.5)
        assert make_context(make_params(3, 1, -9)).gamma == pytest.approx(3.0)

    def test_wrong_regime_rejected(self):
        with pytest.raises(WrongSignRegime):
            make_context(make_params(1, 1, 1))
        with pytest.raises(WrongSignRegime):
            make_context(make_params(1, -2, -3))


class TestChart:
    def test_to_pendulum_oracles(self):
        ctx = make_context(MB)
        # x = (1, 0, sqrt(2)): H0 = 1, theta = pi/2, theta_dot = -1
        p = to_pendulum(ctx, [1, 0, math.sqrt(2)])
        assert p.H == pytest.approx(1.0)
        assert p.theta == pytest.approx(math.pi / 2)
        assert p.theta_dot == pytest.approx(-1.0)
        # x = (0, 1, 0) sits at theta = 0 on the level H0 = 1/2
        p = to_pendulum(ctx, [0, 1, 0])
        assert (p.theta, p.theta_dot, p.H) == pytest.approx((0.0, 0.0, 0.5))

    def test_singular_ray_rejected(self):
        ctx = make_context(MB)
        with pytest.raises(OnSingularRay):
            to_pendulum(ctx, [1, 0, 0])
        with pytest.raises(OnSingularRay):
            to_pendulum(ctx, [0, 0, 0])

    def test_round_trip(self, rng):
        for _ in range(200):
            ctx = make_context(random_definite_params(rng))
            x = rng.uniform(-3, 3, size=3)
            try:
                p = to_pendulum(ctx, x)
            except OnSingularRay:
                continue
            assert np.allclose(from_pendulum(ctx, p), x, atol=1e-12)

    def test_round_trip_from_angle(self, rng):
        ctx = make_context(make_params(1, -4, 1))
        for _ in range(200):
            p = PendulumState(
                rng.uniform(-10, 10), rng.uniform(-3, 3), rng.uniform(0.1, 4.0)
            )
            q = to_pendulum(ctx, from_pendulum(ctx, p))
            # the chart recovers theta only modulo 2*pi
            assert math.isclose(
                (p.theta - q.theta + math.pi) % (2 * math.pi) - math.pi,
                0.0,
                abs_tol=1e-10,
            )
            assert q.theta_dot == pytest.approx(p.theta_dot)
            assert q.H == pytest.approx(p.H)

    def test_chart_image_lies_on_level(self, rng):
        ctx = make_context(LH)
        for _ in range(50):
            p = PendulumState(rng.uniform(-6, 6), rng.uniform(-2, 2), rng.uniform(0.2, 3))
            x = from_pendulum(ctx, p)
            _, _, h0 = first_integrals(LH, x)
            assert h0 == pytest.approx(p.H, rel=1e-12)


class TestDynamics:
    def test_accel_oracles(self):
        ctx = make_context(MB)  # b1*b3/gamma = -1
        assert pendulum_accel(ctx, 0.5, 0.0) == pytest.approx(-1.0)
        assert pendulum_accel(ctx, 0.5, math.pi / 2) == pytest.approx(0.0, abs=1e-15)
        ctx2 = make_context(make_params(2, -1, 2))  # gamma = sqrt(2)
        assert pendulum_accel(ctx2, 2.0, 0.0) == pytest.approx(4 / math.sqrt(2) * 2)
        with pytest.raises(ValueError):
            pendulum_accel(ctx, -1.0, 0.0)

    def test_accel_matches_chart_derivative(self, rng):
        # theta_ddot from the chart must equal d/dt[(b3/gamma) x1]
        for _ in range(20):
            b = random_definite_params(rng)
            ctx = make_context(b)
            x = rng.uniform(0.2, 2.0, size=3)
            p = to_pendulum(ctx, x)
            lhs = pendulum_accel(ctx, p.H, p.theta)
            # d/dt x1 = b1 x2, so theta_ddot = (b3/gamma) b1 x2
            rhs = b.b3 / ctx.gamma * b.b1 * x[1]
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_pendulum_energy_constant(self):
        ctx = make_context(LH)
        p0 = PendulumState(0.3, 0.7, 1.2)
        times, thetas, theta_dots = integrate_pendulum(
            ctx, p0, 30.0, IntegratorSpec(method="rk45_adaptive", rtol=1e-11)
        )
        E = pendulum_energy(ctx, p0.H, thetas, theta_dots)
        assert np.max(np.abs(E - E[0])) <= 1e-8

    def test_theta_unwinds_continuously(self):
        # on a circulating orbit theta should pass multiples of 2*pi
        ctx = make_context(MB)
        p0 = PendulumState(0.0, 4.0, 0.5)
        _, thetas, _ = integrate_pendulum(ctx, p0, 20.0)
        assert np.max(np.abs(np.diff(thetas))) < 1.0
        assert thetas[-1] > 2 * math.pi


class TestTwoRouteVerification:
    def test_known_case(self):
        ctx = make_context(LH)
        assert verify_reduction(ctx, [0, 1, 0], 10.0) <= 1e-6

    def test_zero_horizon(self):
        ctx = make_context(MB)
        assert verify_reduction(ctx, [0.5, 1.0, 0.5], 0.0) == 0.0

    def test_random_cases(self, rng):
        for _ in range(5):
            ctx = make_context(random_definite_params(rng))
            x0 = rng.uniform(0.3, 1.5, size=3)
            spec = IntegratorSpec(method="rk45_adaptive", rtol=1e-11, atol=1e-13)
            assert verify_reduction(ctx, x0, 10.0, spec) <= 1e-6

    def test_level_identity_along_solution(self, rng):
        # H0 evaluated on the mapped pendulum solution stays at its start value
        ctx = make_context(make_params(1, -1, 2))
        x0 = np.array([0.4, 1.1, -0.3])
        p0 = to_pendulum(ctx, x0)
        _, thetas, theta_dots = integrate_pendulum(
            ctx, p0, 15.0, IntegratorSpec(method="rk45_adaptive", rtol=1e-11)
        )
        for th, thd in zip(thetas[::20], theta_dots[::20]):
            x = from_pendulum(ctx, PendulumState(th, thd, p0.H))
            _, _, h0 = first_integrals(ctx.b, x)
            assert h0 == pytest.approx(p0.H, abs=1e-8)
