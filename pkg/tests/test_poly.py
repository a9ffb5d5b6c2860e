import numpy as np
import pytest

from mbtop.core import first_integrals, named_realization, preset, realization
from mbtop.errors import DegreeOverflow
from mbtop.poly import (
    Poly3,
    bracket,
    casimir_residual,
    coordinate_probes,
    hamiltonian_form_residual,
    jacobi_residual,
    leibniz_residual,
    named_poisson_poly,
    poisson_poly,
    poly_C,
    poly_H,
    poly_mixed,
    random_poly,
    random_unimodular,
)

from conftest import random_params


X1, X2, X3 = Poly3.var(1), Poly3.var(2), Poly3.var(3)


class TestPoly3:
    def test_arithmetic_and_eval(self):
        p = (X1 + 2 * X2) * (X1 - X3) + 1.0
        x = (1.3, -0.7, 2.1)
        assert p(x) == pytest.approx((1.3 - 1.4) * (1.3 - 2.1) + 1.0, abs=1e-15)

    def test_diff(self):
        p = X1 * X1 * X2
        assert p.diff(1).coeffs == {(1, 1, 0): 2.0}
        assert p.diff(2).coeffs == {(2, 0, 0): 1.0}
        assert p.diff(3).is_zero()

    def test_degree_overflow(self):
        p = Poly3({(2, 0, 0): 1.0}, max_degree=4)
        with pytest.raises(DegreeOverflow):
            _ = p * p * p

    def test_zero_coefficients_dropped(self):
        p = X1 - X1
        assert p.coeffs == {}
        assert p.is_zero()


class TestBracket:
    def test_coordinate_with_hamiltonian(self, rng):
        # {x1, H} reproduces the first equation of motion, b1*x2
        b = random_params(rng)
        out = bracket(named_poisson_poly(b, "base"), X1, poly_H(b))
        assert out.coeffs == pytest.approx({(0, 1, 0): b.b1})

    def test_antisymmetry_diagonal(self, rng):
        b = random_params(rng)
        P = named_poisson_poly(b, "base")
        f = random_poly(rng)
        assert bracket(P, f, f).max_abs() <= 1e-12

    def test_casimir_bracket_vanishes(self, rng):
        b = random_params(rng)
        out = bracket(named_poisson_poly(b, "base"), poly_C(b), X2)
        assert out.max_abs() <= 1e-13

    def test_antisymmetry(self, rng):
        b = random_params(rng)
        P = named_poisson_poly(b, "base")
        f, g = random_poly(rng), random_poly(rng)
        assert (bracket(P, f, g) + bracket(P, g, f)).max_abs() <= 1e-12

    def test_bilinearity(self, rng):
        b = random_params(rng)
        P = named_poisson_poly(b, "base")
        f, g, h = (random_poly(rng) for _ in range(3))
        lhs = bracket(P, 2.0 * f + g, h)
        rhs = 2.0 * bracket(P, f, h) + bracket(P, g, h)
        assert (lhs - rhs).max_abs() <= 1e-12

    def test_leibniz_rule(self, rng):
        for _ in range(10):
            b = random_params(rng)
            P = poisson_poly(b, *rng.uniform(-1.5, 1.5, size=2))
            f, g, h = (random_poly(rng) for _ in range(3))
            assert leibniz_residual(P, f, g, h) <= 1e-12

    def test_zero_probe_accepted(self, rng):
        b = random_params(rng)
        P = named_poisson_poly(b, "base")
        z = Poly3.zero()
        assert bracket(P, z, z).is_zero()
        assert jacobi_residual(P, z, z, z) == 0.0


class TestJacobi:
    def test_coordinates(self, rng):
        for _ in range(10):
            b = random_params(rng)
            P = named_poisson_poly(b, "base")
            assert jacobi_residual(P, X1, X2, X3) <= 1e-12

    def test_random_realizations_random_quadratics(self, rng):
        for _ in range(20):
            b = random_params(rng)
            r = random_unimodular(rng)
            P = poisson_poly(b, r.alpha, r.beta)
            f, g, h = (random_poly(rng) for _ in range(3))
            assert jacobi_residual(P, f, g, h) <= 1e-10

    def test_probe_basis_sweep(self, rng):
        probes = coordinate_probes()
        for _ in range(50):
            b = random_params(rng)
            r = random_unimodular(rng)
            P = poisson_poly(b, r.alpha, r.beta)
            worst = max(
                jacobi_residual(P, f, g, h)
                for f in probes
                for g in probes
                for h in probes
            )
            assert worst <= 1e-10

    def test_negative_control(self, rng):
        # patching entry (1,2) to x1*x2 must break the Jacobi identity
        b = preset("maxwell_bloch")
        broken = named_poisson_poly(b, "base").with_entry(1, 2, X1 * X2)
        assert jacobi_residual(broken, X1, X2, X3) > 1e-3


class TestCasimir:
    def test_base(self, rng):
        probes = [X1, X2, X3, X1 * X3]
        for _ in range(10):
            b = random_params(rng)
            P = named_poisson_poly(b, "base")
            assert casimir_residual(P, poly_C(b), probes) <= 1e-12

    def test_bar(self, rng):
        # the bar Casimir is H (positive printed convention)
        probes = [X1, X2, X3]
        for _ in range(10):
            b = random_params(rng)
            P = named_poisson_poly(b, "bar")
            assert casimir_residual(P, poly_H(b), probes) <= 1e-12

    def test_mixed_casimir_for_random_realization(self, rng):
        probes = coordinate_probes()
        for _ in range(20):
            b = random_params(rng)
            r = random_unimodular(rng)
            P = poisson_poly(b, r.alpha, r.beta)
            assert casimir_residual(P, poly_mixed(b, r.alpha, r.beta), probes) <= 1e-12

    def test_hamiltonian_is_not_a_casimir(self, rng):
        # {x3, H} = b3*x1*x2 != 0
        b = random_params(rng)
        P = named_poisson_poly(b, "base")
        assert casimir_residual(P, poly_H(b), [X1, X2, X3]) > 1e-3


class TestHamiltonianFormResidual:
    def test_base_and_bar(self, rng):
        for which in ("base", "bar"):
            b = random_params(rng)
            bundle = named_realization(b, which)
            assert hamiltonian_form_residual(b, bundle, 100, 7) <= 1e-12

    def test_random_realizations(self, rng):
        for _ in range(5):
            b = random_params(rng)
            bundle = realization(b, random_unimodular(rng))
            assert hamiltonian_form_residual(b, bundle, 100, 7) <= 1e-12

    def test_casimir_generates_no_flow(self, rng):
        # swapping grad(H) for grad(C) must leave a large residual
        b = random_params(rng)
        base = named_realization(b, "base")
        import dataclasses

        wrong = dataclasses.replace(base, hamiltonian_grad=base.casimir_grad)
        assert hamiltonian_form_residual(b, wrong, 100, 7) > 1e-2

    def test_requires_samples(self, rng):
        b = random_params(rng)
        with pytest.raises(ValueError):
            hamiltonian_form_residual(b, named_realization(b, "base"), 0, 7)
