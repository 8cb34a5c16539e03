"""Closed-form constants: pinned values, limits, scaling, and monotonicity."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neumann_cert import constants
from neumann_cert.errors import DomainError


def rel_err(x: float, y: float) -> float:
    return abs(x - y) / max(abs(y), 1e-300)


class TestEigenvalues:
    def test_lambda_values(self):
        assert constants.lambda_n(0, 1.0) == 0.0
        assert rel_err(constants.lambda_n(1, 1.0), math.pi ** 2) <= 1e-15
        assert rel_err(constants.lambda_n(3, 2.0), 9.0 * math.pi ** 2 / 4.0) <= 1e-15

    def test_mu_values(self):
        assert rel_err(constants.mu_n(1, 1.0), math.pi ** 2 / 4.0) <= 1e-15
        assert rel_err(constants.mu_n(2, 1.0), 9.0 * math.pi ** 2 / 4.0) <= 1e-15

    def test_negative_level_rejected(self):
        with pytest.raises(DomainError):
            constants.lambda_n(-1, 1.0)
        with pytest.raises(DomainError):
            constants.lambda_n(1, 0.0)


class TestSharpConstants:
    def test_beta1_level_one(self):
        assert rel_err(constants.beta1(1, 1.0), 4.0 * math.pi) <= 1e-12

    def test_beta1_level_two(self):
        assert rel_err(constants.beta1(2, 1.0),
                       12.0 * math.pi / math.sqrt(3.0)) <= 1e-12

    def test_beta1_closed_form(self):
        # (2 pi n (n+1) / L) cot(n pi / (2 (n+1)))
        for n in range(1, 8):
            for L in (0.5, 1.0, 2.5):
                expect = (2.0 * math.pi * n * (n + 1) / L) \
                    * constants.cot(n * math.pi / (2.0 * (n + 1)))
                assert rel_err(constants.beta1(n, L), expect) <= 1e-14

    def test_beta1_small_level_limit(self):
        assert abs(constants.beta1(1e-6, 1.0) - 4.0) <= 1e-5

    def test_beta_inf_is_next_eigenvalue(self):
        for n in range(1, 10):
            assert rel_err(constants.beta_inf(n, 1.0),
                           constants.lambda_n(n + 1, 1.0)) <= 1e-12

    def test_beta1_below_beta_inf_mass(self):
        # the L^1 constant is strictly below the L^inf constant times L
        for n in range(1, 6):
            assert constants.beta1(n, 1.0) < constants.beta_inf(n, 1.0) * 1.0


class TestIntegralBound:
    # frozen oracle values (50-digit evaluation of the closed form)
    def test_pinned_values(self):
        assert rel_err(constants.yong_bound(4.0, 0), 6.568370463737323) <= 1e-13
        assert rel_err(constants.yong_bound(1.0, 0), 4.660975443424904) <= 1e-13
        assert rel_err(constants.yong_bound(1.0, 1), 16.665269458583760) <= 1e-13

    def test_formula(self):
        for A, k in ((2.0, 0), (3.5, 1), (0.7, 2)):
            expect = A + 2.0 * (k + 1) * math.sqrt(A) \
                * constants.cot(math.sqrt(A) / (2.0 * (k + 1)))
            assert rel_err(constants.yong_bound(A, k), expect) <= 1e-14


class TestCot:
    def test_values(self):
        assert rel_err(constants.cot(math.pi / 4.0), 1.0) <= 1e-14
        assert abs(constants.cot(math.pi / 2.0)) <= 1e-12

    def test_pole_guard(self):
        with pytest.raises(DomainError):
            constants.cot(0.0)
        with pytest.raises(DomainError):
            constants.cot(math.pi)

    @given(st.floats(0.01, math.pi - 0.01))
    @settings(max_examples=60, deadline=None)
    def test_matches_reciprocal_tan(self, x):
        assert abs(constants.cot(x) - 1.0 / math.tan(x)) <= 1e-9 * (
            1.0 + abs(constants.cot(x)))


class TestJMin:
    def test_boundary_value_zero(self):
        # at M = pi^2 / (4 w^2) the minimum is exactly 0
        for w in (0.5, 1.0, 1.7):
            assert abs(constants.j_min(math.pi ** 2 / (4 * w * w), 0.0, w)) <= 1e-12

    def test_interior_value(self):
        # M = 1 on [0, pi/3]: sqrt(M) cot(sqrt(M) w) = cot(pi/3)
        expect = constants.cot(math.pi / 3.0)
        assert rel_err(constants.j_min(1.0, 0.0, math.pi / 3.0), expect) <= 1e-14

    def test_inadmissible_rejected(self):
        with pytest.raises(DomainError):
            constants.j_min(1.01 * math.pi ** 2 / 4.0, 0.0, 1.0)

    @given(st.floats(0.05, 0.999), st.floats(0.2, 2.0))
    @settings(max_examples=60, deadline=None)
    def test_decreasing_in_mass(self, frac, w):
        # a larger admissible M can only lower the minimum
        M = frac * math.pi ** 2 / (4 * w * w)
        lower = constants.j_min(M, 0.0, w)
        higher = constants.j_min(0.5 * M, 0.0, w)
        assert lower <= higher + 1e-12


class TestFMin:
    def test_equal_split_formula(self):
        for r, S in ((4, math.pi), (3, 0.5 * math.pi), (6, 0.9 * math.pi)):
            assert rel_err(constants.f_min(r, S),
                           r * constants.cot(S / r)) <= 1e-14

    def test_infeasible_rejected(self):
        with pytest.raises(DomainError):
            constants.f_min(2, 1.01 * math.pi)  # needs r pi/2 >= S


class TestScaling:
    @given(st.integers(1, 6), st.floats(0.3, 3.0), st.floats(0.25, 4.0))
    @settings(max_examples=60, deadline=None)
    def test_covariance(self, n, L, s):
        assert rel_err(constants.lambda_n(n, L * s),
                       constants.lambda_n(n, L) / (s * s)) <= 1e-12
        assert rel_err(constants.mu_n(n, L * s),
                       constants.mu_n(n, L) / (s * s)) <= 1e-12
        assert rel_err(constants.beta1(n, L * s),
                       constants.beta1(n, L) / s) <= 1e-12

    def test_property_monotone_half_waves(self):
        for n in range(1, 11):
            prev = None
            for m in range(n + 1, n + 51):
                val = 2.0 * m * constants.cot(n * math.pi / (2.0 * m))
                if prev is not None:
                    assert val > prev
                prev = val
