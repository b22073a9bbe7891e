"""Reflectionless potentials: jets, Jost solutions, Weyl data, classification."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdvbvp.errors import (
    CapExceededError,
    PoleCollisionError,
    PoleWeightError,
    SignPatternError,
)
from kdvbvp.soliton import (
    DiscreteWeylFunction,
    SolitonData,
    alphas,
    classify,
    expected_alpha_signs,
    from_alphas,
    jost_minus,
    jost_plus,
    potential_grid,
    potential_jet,
    weyl_function,
)

from conftest import fd_jet, shoot_jost_minus, shoot_jost_plus

D2 = SolitonData([0.6, 1.3], [0.9, 2.7])
D3 = SolitonData([0.4, 0.9, 1.7], [1.1, 0.5, 6.0])


class TestSolitonData:
    def test_validation(self):
        with pytest.raises(ValueError):
            SolitonData([1.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            SolitonData([1.0, 0.5], [1.0, 1.0])  # not increasing
        with pytest.raises(ValueError):
            SolitonData([1.0], [-1.0])
        with pytest.raises(CapExceededError):
            SolitonData(np.arange(1, 14), np.ones(13))

    def test_shift_is_a_group_action(self):
        a = D2.shift(0.3).shift(0.5)
        b = D2.shift(0.8)
        np.testing.assert_allclose(a.g, b.g, rtol=1e-14)

    def test_shift_translates_the_potential(self):
        for x in (-1.0, 0.0, 0.7):
            left = potential_jet(D2.shift(0.4), x, 2)
            right = potential_jet(D2, x + 0.4, 2)
            np.testing.assert_allclose(left, right, atol=1e-12)

    def test_reflected_mirrors_the_potential(self):
        refl = D2.reflected()
        for x in (-2.0, -0.3, 1.1):
            left = potential_jet(refl, x, 1)
            right = potential_jet(D2, -x, 1)
            assert left[0] == pytest.approx(right[0], abs=1e-11)
            assert left[1] == pytest.approx(-right[1], abs=1e-11)

    def test_json_round_trip(self):
        doc = D2.to_json_obj()
        back = SolitonData.from_json_obj(doc)
        assert back == D2


class TestPotential:
    def test_one_soliton_closed_form(self):
        k, g = 0.8, 1.1
        x0 = math.log(g / (2.0 * k)) / (2.0 * k)
        data = SolitonData([k], [g])
        for x in (-4.0, -0.5, 0.0, 2.3):
            d = k * (x - x0)
            jet = potential_jet(data, x, 2)
            assert jet[0] == pytest.approx(-2.0 * k**2 / math.cosh(d) ** 2, abs=1e-13)
            assert jet[1] == pytest.approx(
                4.0 * k**3 * math.tanh(d) / math.cosh(d) ** 2, abs=1e-13
            )

    def test_jets_match_finite_differences(self):
        # [DERIVED] oracle: repeated central differences on q values
        for x in (-1.5, 0.0, 0.8):
            jet = potential_jet(D3, x, 4)
            coarse = fd_jet(D3, x, 4, h=1e-2)
            fine = fd_jet(D3, x, 4, h=5e-3)
            # truncation error shrinks ~4x with h -> the jet is the limit
            err_c = np.max(np.abs(jet - coarse) / (np.abs(coarse) + 1.0))
            err_f = np.max(np.abs(jet - fine) / (np.abs(fine) + 1.0))
            assert err_c < 1e-2
            assert err_f < 0.35 * err_c

    def test_decay_at_infinity(self):
        assert abs(potential_jet(D2, 30.0, 0)[0]) < 1e-12
        assert abs(potential_jet(D2, -30.0, 0)[0]) < 1e-12

    def test_grid_shape(self):
        grid = potential_grid(D2, np.linspace(-1, 1, 7), 3)
        assert grid.shape == (7, 4)

    def test_empty_data_is_zero(self):
        np.testing.assert_array_equal(potential_jet(SolitonData(), 0.3, 5), np.zeros(6))


class TestJost:
    def test_plus_matches_shooting_oracle(self):
        # [DERIVED] ODE integration from the decaying asymptotics
        for rho in (1.3, 0.9 + 0.5j, 0.45j):
            e, de = jost_plus(D2, 0.4, rho)
            oe, ode = shoot_jost_plus(D2, 0.4, rho)
            assert e == pytest.approx(oe, rel=2e-8, abs=2e-8)
            assert de == pytest.approx(ode, rel=2e-8, abs=2e-8)

    def test_minus_matches_shooting_oracle(self):
        # Im rho <= 0 keeps the left-shooting oracle numerically stable
        for rho in (0.7, -1.1 - 0.3j):
            e, de = jost_minus(D2, -0.6, rho)
            oe, ode = shoot_jost_minus(D2, -0.6, rho)
            assert e == pytest.approx(oe, rel=2e-8, abs=2e-8)
            assert de == pytest.approx(ode, rel=2e-8, abs=2e-8)

    def test_free_case(self):
        e, de = jost_plus(SolitonData(), 1.2, 0.8)
        assert e == pytest.approx(np.exp(1j * 0.8 * 1.2))
        assert de == pytest.approx(1j * 0.8 * e)

    def test_schroedinger_equation_residual(self):
        # -e'' + q e = rho^2 e, via finite differences of the closed form
        rho = 0.9 + 0.4j
        h = 1e-4
        x = 0.3
        em, _ = jost_plus(D2, x - h, rho)
        e0, _ = jost_plus(D2, x, rho)
        ep, _ = jost_plus(D2, x + h, rho)
        q = potential_jet(D2, x, 0)[0]
        lhs = -(em - 2 * e0 + ep) / h**2 + q * e0
        assert lhs == pytest.approx(rho**2 * e0, rel=1e-6)


class TestWeylFunction:
    def test_frozen_two_soliton_values(self):
        # [DERIVED] cross-checked against the half-plane glue probes
        mw = weyl_function(D2)
        np.testing.assert_allclose(
            mw.xi, [-0.7595688065616155, 0.24224856617655777], atol=1e-12
        )
        np.testing.assert_allclose(
            mw.w, [0.46592699474892624, 0.9484438655350395], atol=1e-12
        )

    def test_matches_jost_log_derivative(self):
        mw = weyl_function(D3)
        rho = 1.1 + 0.8j
        e, de = jost_plus(D3, 0.0, rho)
        assert mw(rho) == pytest.approx(de / e, rel=1e-10)

    def test_poles_inside_spectral_bound(self):
        for data in (D2, D3):
            mw = weyl_function(data)
            assert np.all(np.abs(mw.xi) < max(data.kappa))

    def test_b_n_against_boundary_functionals(self):
        from kdvbvp.diffpoly import b_n_eval

        mw = weyl_function(D3)
        jet = potential_jet(D3, 0.0, 6)
        for n in range(1, 7):
            assert mw.b_n(n) == pytest.approx(b_n_eval(n, jet), rel=1e-10, abs=1e-12)

    def test_weight_positivity_enforced(self):
        with pytest.raises(PoleWeightError):
            DiscreteWeylFunction([0.3], [-1.0])

    def test_pole_collision_enforced(self):
        with pytest.raises(PoleCollisionError):
            DiscreteWeylFunction([0.5, 0.5 + 1e-14], [1.0, 1.0])

    def test_at_imag_consistency(self):
        mw = weyl_function(D2)
        kappa = 2.2
        value = complex(mw(1j * kappa))
        assert value.imag == pytest.approx(0.0, abs=1e-14)
        assert mw.at_imag(kappa) == pytest.approx(value.real, rel=1e-12)


class TestClassification:
    def test_generic_case_recovers_eigenvalues(self):
        mw = weyl_function(D2)
        cls = classify(mw)
        assert cls.lambda2 == ()
        np.testing.assert_allclose(sorted(cls.lambda1), [0.6, 1.3], rtol=1e-10)
        assert len(cls.lambda0_1) == 2

    def test_paired_case(self):
        # symmetric measure: poles at +-xi with weights -> paired eigenvalues
        mw = DiscreteWeylFunction([-0.8, 0.8], [0.3, 0.5])
        cls = classify(mw)
        assert cls.lambda2 == (0.8,)
        # the pair also feeds the symmetry equation: -1 + 0.8/(lam-0.64) = 0
        np.testing.assert_allclose(cls.lambda1, [1.2], rtol=1e-12)
        w_minus, w_plus = cls.pair_weights[0.8]
        assert (w_minus, w_plus) == (0.3, 0.5)

    def test_alphas_match_connection_coefficient_oracle(self):
        # [DERIVED] alpha(kappa) = e-(0, -i kappa) / e+(0, i kappa), both by ODE
        mw = weyl_function(D2)
        cls = classify(mw)
        al = alphas(mw, cls)
        for kappa_ref in (0.6, 1.3):
            kappa = min(al, key=lambda k: abs(k - kappa_ref))
            em, _ = shoot_jost_minus(D2, 0.0, -1j * kappa_ref)
            ep, _ = shoot_jost_plus(D2, 0.0, 1j * kappa_ref)
            assert al[kappa] == pytest.approx((em / ep).real, rel=1e-6)

    def test_sign_pattern(self):
        assert expected_alpha_signs(3) == [1.0, -1.0, 1.0]
        mw = weyl_function(D3)
        cls = classify(mw)
        al = alphas(mw, cls)
        kappas = sorted(al)
        for k, sign in zip(kappas, expected_alpha_signs(3)):
            assert math.copysign(1.0, al[k]) == sign


class TestFromAlphas:
    def test_round_trip(self):
        mw = weyl_function(D2)
        cls = classify(mw)
        al = alphas(mw, cls)
        back = from_alphas(cls.eigenvalues, al, check_roundtrip=True)
        np.testing.assert_allclose(sorted(back.kappa), sorted(D2.kappa), rtol=1e-10)
        np.testing.assert_allclose(
            [g for _, g in sorted(zip(back.kappa, back.g))],
            [g for _, g in sorted(zip(D2.kappa, D2.g))],
            rtol=1e-10,
        )

    @settings(max_examples=15, deadline=None)
    @given(
        st.lists(
            st.floats(min_value=0.2, max_value=3.0, allow_nan=False),
            min_size=1,
            max_size=4,
            unique=True,
        ),
        st.data(),
    )
    def test_round_trip_random(self, kappas, data):
        kappas = sorted(kappas)
        if any(b - a < 0.08 for a, b in zip(kappas, kappas[1:])):
            return
        gs = [
            data.draw(st.floats(min_value=0.1, max_value=10.0, allow_nan=False))
            for _ in kappas
        ]
        original = SolitonData(kappas, gs)
        mw = weyl_function(original)
        cls = classify(mw)
        back = from_alphas(cls.eigenvalues, alphas(mw, cls), check_roundtrip=False)
        np.testing.assert_allclose(sorted(back.kappa), kappas, rtol=1e-8)
        np.testing.assert_allclose(
            [g for _, g in sorted(zip(back.kappa, back.g))], gs, rtol=1e-7
        )

    def test_inadmissible_sign_rejected(self):
        with pytest.raises(SignPatternError):
            from_alphas([0.5, 1.0], {0.5: 0.4, 1.0: 0.7})  # needs (-1, +1) pattern
