import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from mpmath import mp

from bdecay import (
    GENERATOR,
    InconsistentCoefficientsError,
    InsufficientCoefficientsError,
    PrecisionCtx,
    PrecisionExhaustedError,
    RateLadder,
    ReducibleChainError,
    build_eps_sis_ladder,
    char_coeffs,
    decay_report,
    dense_spectrum,
    exact_zeta,
    lagrange_zeta,
    newton_bound,
    required_precision,
    restrict_transient,
)
from bdecay._numbers import to_mpf
from conftest import rational_ladders


def two_node_coeffs():
    return char_coeffs(restrict_transient(build_eps_sis_ladder(2, 1, 1, 0)))


class TestLagrange:
    def test_single_zero_chain_is_exact_at_all_orders(self):
        sub = restrict_transient(build_eps_sis_ladder(1, 1, Fraction(3), 0))
        coeffs = char_coeffs(sub)
        assert coeffs.f == (Fraction(1), Fraction(1, 3))
        for order in (1, 2, 3):
            assert lagrange_zeta(coeffs, order) == -3

    def test_two_node_orders(self):
        coeffs = two_node_coeffs()
        assert lagrange_zeta(coeffs, 1) == Fraction(-1, 2)
        assert lagrange_zeta(coeffs, 2) == Fraction(-9, 16)  # -0.5625 exactly
        exact = -(2 - math.sqrt(2))
        assert exact < -0.5625 < -0.5

    def test_order_validation(self):
        coeffs = two_node_coeffs()
        with pytest.raises(ValueError):
            lagrange_zeta(coeffs, 4)

    def test_missing_coefficients_rejected(self):
        ladder = build_eps_sis_ladder(6, 1, 1, 1)
        with pytest.raises(InsufficientCoefficientsError):
            lagrange_zeta(char_coeffs(ladder, kmax=1), 3)


class TestNewtonBound:
    def test_vanishing_second_coefficient_reduces_to_first_bound(self):
        sub = restrict_transient(build_eps_sis_ladder(1, 1, 1, 0))
        coeffs = char_coeffs(sub)
        assert float(newton_bound(coeffs)) == -1.0

    def test_two_node_value(self):
        nb = newton_bound(two_node_coeffs())
        assert abs(float(nb) + 1 / math.sqrt(3)) < 1e-15
        assert -(2 - math.sqrt(2)) <= float(nb)

    def test_bad_radicand_rejected(self):
        from dataclasses import replace

        coeffs = two_node_coeffs()
        broken = replace(coeffs, f=(coeffs.f[0], coeffs.f[1], Fraction(50)))
        with pytest.raises(InconsistentCoefficientsError):
            newton_bound(broken)


class TestExactZeta:
    def test_two_state_generator_trace(self):
        lam, mu = Fraction(5, 7), Fraction(2, 3)
        ladder = RateLadder(up=[lam], down=[mu], mode=GENERATOR)
        z = exact_zeta(ladder)
        assert abs(float(z) + float(lam + mu)) < 1e-30

    def test_pure_death_restricted(self):
        # all up-rates zero: triangular sub-generator, spectrum {-delta..-n delta}
        full = RateLadder(up=[0, 0, 0], down=[2, 4, 6], mode=GENERATOR)
        sub = restrict_transient(full)
        z = exact_zeta(sub)
        assert abs(float(z) + 2) < 1e-25

    def test_two_node_epidemic_quadratic_root(self):
        sub = restrict_transient(build_eps_sis_ladder(2, 1, 1, 0))
        z = exact_zeta(sub, PrecisionCtx(mantissa_bits=128))
        with mp.workprec(128):
            assert abs(z + (2 - mp.sqrt(2))) < 1e-12

    def test_reducible_unrestricted_rejected(self):
        with pytest.raises(ReducibleChainError):
            exact_zeta(build_eps_sis_ladder(3, 1, 1, 0))

    def test_precision_exhausted_on_tiny_eigenvalue(self):
        # x = 3, n = 60: |zeta| ~ 5e-12 sits below the 64-bit resolution floor
        sub = restrict_transient(build_eps_sis_ladder(60, Fraction(3, 60), 1, 0))
        with pytest.raises(PrecisionExhaustedError):
            exact_zeta(sub, PrecisionCtx(mantissa_bits=64))
        z = exact_zeta(sub, PrecisionCtx(mantissa_bits=required_precision(60, 3)))
        assert -1e-10 < float(z) < 0

    def test_rational_exact_mode(self):
        ladder = RateLadder(up=[Fraction(1, 2)], down=[Fraction(1, 3)], mode=GENERATOR)
        ctx = PrecisionCtx(mode="rational-exact", mantissa_bits=64)
        z = exact_zeta(ladder, ctx, tol=Fraction(1, 10**12))
        assert isinstance(z, Fraction)
        assert abs(z + Fraction(5, 6)) < Fraction(1, 10**11)

    @settings(max_examples=10, deadline=None)
    @given(rational_ladders(min_states=3, max_states=9))
    def test_agrees_with_dense_oracle(self, ladder):
        ctx = PrecisionCtx()
        z = exact_zeta(ladder, ctx)
        spec = dense_spectrum(ladder, ctx)
        with mp.workprec(ctx.mantissa_bits):
            assert abs(z - spec[1]) <= 10 * to_mpf(ctx.default_tol)
            assert all(e <= to_mpf(ctx.default_tol) for e in spec)


class TestRequiredPrecision:
    @pytest.mark.parametrize(
        "n,x,bits", [(10, 1, 128), (100, 2, 196), (50, 4, 196), (1, 1, 128)]
    )
    def test_values(self, n, x, bits):
        assert required_precision(n, x) == bits

    def test_invalid(self):
        with pytest.raises(ValueError):
            required_precision(0, 1)
        with pytest.raises(ValueError):
            required_precision(5, 0)


class TestDecayReport:
    def test_two_node_epidemic(self):
        sub = restrict_transient(build_eps_sis_ladder(2, 1, 1, 0))
        rep = decay_report(sub)
        assert abs(float(rep.zeta_exact) + 0.585786437626905) < 1e-12
        assert rep.zeta_lagrange[1] == Fraction(-1, 2)
        assert rep.zeta_lagrange[2] == Fraction(-9, 16)
        assert abs(float(rep.zeta_newton_bound) + 0.57735026918962576) < 1e-12
        assert rep.ordering_ok

    def test_single_node_everything_collapses(self):
        sub = restrict_transient(build_eps_sis_ladder(1, 1, 1, 0))
        rep = decay_report(sub)
        assert float(rep.zeta_exact) == pytest.approx(-1, abs=1e-25)
        assert all(v == -1 for v in rep.zeta_lagrange.values())
        assert float(rep.zeta_newton_bound) == -1.0

    @settings(max_examples=10, deadline=None)
    @given(rational_ladders(min_states=3, max_states=7))
    def test_ordering_invariant_random(self, ladder):
        assert decay_report(ladder).ordering_ok

    @pytest.mark.parametrize("n", [4, 10, 25, 40])
    @pytest.mark.parametrize("x", [2, 3])
    def test_second_order_beats_first_above_threshold(self, n, x):
        sub = restrict_transient(build_eps_sis_ladder(n, Fraction(x, n), 1, 0))
        ctx = PrecisionCtx(mantissa_bits=required_precision(n, x))
        rep = decay_report(sub, ctx)
        with mp.workprec(ctx.mantissa_bits):
            z = to_mpf(rep.zeta_exact)
            e1 = abs(to_mpf(rep.zeta_lagrange[1]) - z)
            e2 = abs(to_mpf(rep.zeta_lagrange[2]) - z)
            assert e2 <= e1
