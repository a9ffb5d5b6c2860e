import math

import numpy as np
import pytest

from mbtop.core import (
    Params,
    Realization,
    first_integrals,
    grad_C,
    grad_H,
    make_params,
    named_realization,
    poisson_matrix,
    preset,
    realization,
    vector_field,
)
from mbtop.errors import DegenerateParams, NotUnimodular, UnknownPreset
from mbtop.poly import bracket, poly_field, poly_C, poly_H, random_unimodular

from conftest import random_params


class TestParams:
    def test_maxwell_bloch_triple(self):
        assert make_params(1, 1, -1).as_tuple() == (1.0, 1.0, -1.0)

    def test_lorenz_hamilton_triple(self):
        assert make_params(0.5, -1, 1).as_tuple() == (0.5, -1.0, 1.0)

    @pytest.mark.parametrize("bad", [(1, 0, 1), (0, 1, 1), (1, 1, 0)])
    def test_zero_component_rejected(self, bad):
        with pytest.raises(DegenerateParams):
            make_params(*bad)

    def test_nonfinite_rejected(self):
        with pytest.raises(DegenerateParams):
            make_params(math.nan, 1, 1)


class TestPreset:
    def test_known_presets(self):
        assert preset("maxwell_bloch").as_tuple() == (1.0, 1.0, -1.0)
        assert preset("lorenz-hamilton").as_tuple() == (0.5, -1.0, 1.0)

    def test_unknown(self):
        with pytest.raises(UnknownPreset):
            preset("lorenz84")


class TestVectorField:
    def test_hand_substitution(self):
        b = preset("maxwell_bloch")
        assert np.array_equal(vector_field(b, [1, 2, 3]), [2.0, 3.0, -2.0])

    def test_origin_is_equilibrium(self, rng):
        for _ in range(5):
            b = random_params(rng)
            assert np.array_equal(vector_field(b, [0, 0, 0]), [0.0, 0.0, 0.0])

    def test_x1_axis_is_equilibrium(self):
        b = preset("lorenz_hamilton")
        assert np.array_equal(vector_field(b, [2, 0, 0]), [0.0, 0.0, 0.0])


class TestFirstIntegrals:
    def test_hand_substitution(self):
        b = preset("maxwell_bloch")
        H, C, H0 = first_integrals(b, [5, 2, 4])
        assert H == pytest.approx(10.0, abs=1e-15)
        assert C == pytest.approx(16.5, abs=1e-15)
        assert H0 == pytest.approx(10.0, abs=1e-15)

    def test_origin_vanishes(self):
        b = preset("maxwell_bloch")
        assert first_integrals(b, [0, 0, 0]) == (0.0, 0.0, 0.0)

    def test_circular_level_set(self):
        # for (1/2, -1, 1) the H0 level sets are circles x2^2 + x3^2 = 2*H0
        b = preset("lorenz_hamilton")
        _, _, H0 = first_integrals(b, [0, 1, 1])
        assert H0 == pytest.approx(1.0, abs=1e-15)

    def test_H_is_b1_times_H0(self, rng):
        for _ in range(50):
            b = random_params(rng)
            x = rng.uniform(-5, 5, size=3)
            H, _, H0 = first_integrals(b, x)
            assert H == pytest.approx(b.b1 * H0, abs=1e-15, rel=1e-15)

    def test_symbolic_conservation(self, rng):
        # grad(H) . f and grad(C) . f must be the zero polynomial
        for _ in range(50):
            b = random_params(rng)
            f = poly_field(b)
            for integral in (poly_H(b), poly_C(b)):
                ddt = sum(integral.diff(i + 1) * f[i] for i in range(3))
                assert ddt.max_abs() <= 1e-12

    def test_gradients_match_finite_differences(self, rng):
        b = random_params(rng)
        x = rng.uniform(-2, 2, size=3)
        eps = 1e-7
        for grad, which in ((grad_H(b, x), 0), (grad_C(b, x), 1)):
            for i in range(3):
                xp, xm = x.copy(), x.copy()
                xp[i] += eps
                xm[i] -= eps
                fd = (first_integrals(b, xp)[which] - first_integrals(b, xm)[which]) / (
                    2 * eps
                )
                assert grad[i] == pytest.approx(fd, abs=1e-6)


class TestRealizations:
    def test_identity_coefficients_give_base(self, rng):
        b = random_params(rng)
        bundle = realization(b, Realization(1, 0, 0, 1))
        x = rng.uniform(-3, 3, size=3)
        assert np.allclose(bundle.poisson_matrix(x), poisson_matrix(b, x), atol=0)
        H, C, _ = first_integrals(b, x)
        assert bundle.hamiltonian(x) == pytest.approx(H, abs=1e-15)
        assert bundle.casimir(x) == pytest.approx(C, abs=1e-15)

    def test_base_entry_12_is_one(self, rng):
        for _ in range(5):
            b = random_params(rng)
            x = rng.uniform(-5, 5, size=3)
            assert named_realization(b, "base").poisson_matrix(x)[0][1] == 1.0

    def test_bar_first_row(self):
        # b1*b2/b3 = -1 for the Maxwell-Bloch triple
        b = preset("maxwell_bloch")
        bundle = named_realization(b, "bar")
        x = np.array([0.7, -1.2, 2.5])
        row = bundle.poisson_matrix(x)[0]
        assert row == pytest.approx([0.0, -x[2], x[1]], abs=1e-15)

    def test_bar_hamiltonian_is_C(self):
        b = preset("lorenz_hamilton")
        bundle = named_realization(b, "bar")
        x = np.array([1.5, 0.3, -0.8])
        # b3/(2 b1) = 1 here
        assert bundle.hamiltonian(x) == pytest.approx(-x[0] ** 2 + x[2], abs=1e-14)

    def test_bar_casimir_positive_convention(self, rng):
        # printed convention: the bar Casimir equals H, not -H
        b = random_params(rng)
        bundle = named_realization(b, "bar")
        x = rng.uniform(-3, 3, size=3)
        H, _, _ = first_integrals(b, x)
        assert bundle.casimir(x) == pytest.approx(H, abs=1e-14, rel=1e-14)

    def test_degenerate_coefficients_rejected(self):
        with pytest.raises(NotUnimodular):
            Realization(1, 1, 1, 1)

    def test_skew_symmetry_and_hamiltonian_form(self, rng):
        for _ in range(1000):
            b = random_params(rng)
            x = rng.uniform(-5, 5, size=3)
            bundle = named_realization(b, rng.choice(["base", "bar"]))
            P = bundle.poisson_matrix(x)
            assert np.max(np.abs(P + P.T)) <= 1e-14
            resid = P @ bundle.hamiltonian_grad(x) - vector_field(b, x)
            scale = max(1.0, float(np.max(np.abs(vector_field(b, x)))))
            assert np.max(np.abs(resid)) / scale <= 1e-12

    def test_flow_invariance_across_realizations(self, rng):
        b = random_params(rng)
        for _ in range(20):
            r = random_unimodular(rng)
            bundle = realization(b, r)
            x = rng.uniform(-3, 3, size=3)
            resid = bundle.poisson_matrix(x) @ bundle.hamiltonian_grad(x) - vector_field(
                b, x
            )
            assert np.max(np.abs(resid)) <= 1e-12

    def test_casimir_annihilated(self, rng):
        # P(x) @ grad(Casimir)(x) = 0 for arbitrary realizations
        b = random_params(rng)
        for _ in range(20):
            bundle = realization(b, random_unimodular(rng))
            x = rng.uniform(-3, 3, size=3)
            assert np.max(np.abs(bundle.poisson_matrix(x) @ bundle.casimir_grad(x))) <= 1e-12
