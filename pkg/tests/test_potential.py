"""Potential representations: exact integrals, comparisons, serialization."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neumann_cert import serialize
from neumann_cert.errors import DomainError, RepresentationError
from neumann_cert.potential import (Interval, Potential, pointwise_le,
                                    PIECEWISE_CONSTANT, SAMPLED)

from conftest import random_pc


def brute_l1_excess(a: Potential, level: float, lo: float, hi: float,
                    n: int = 200_001) -> float:
    xs = np.linspace(lo, hi, n)
    return float(np.trapezoid(np.abs(a.values_at(xs) - level), xs))


class TestConstruction:
    def test_piecewise_constant(self):
        a = Potential.piecewise_constant([0.0, 0.3, 1.0], [1.0, 2.0])
        assert a.kind == PIECEWISE_CONSTANT
        assert a.L == 1.0
        assert a.value_at(0.0) == 1.0
        assert a.value_at(0.3) == 2.0  # cells are right-continuous
        assert a.value_at(1.0) == 2.0

    def test_sampled(self):
        a = Potential.sampled([0.0, 0.5, 1.0], [0.0, 1.0, 0.0])
        assert a.kind == SAMPLED
        assert a.value_at(0.25) == pytest.approx(0.5, abs=1e-15)

    def test_validation_errors(self):
        with pytest.raises(RepresentationError):
            Potential.piecewise_constant([0.0, 1.0], [1.0, 2.0])  # count
        with pytest.raises(RepresentationError):
            Potential.piecewise_constant([0.0, 0.5, 0.5, 1.0], [1, 2, 3])
        with pytest.raises(RepresentationError):
            Potential.piecewise_constant([0.1, 1.0], [1.0])  # must start at 0
        with pytest.raises(RepresentationError):
            Potential.sampled([0.0, 1.0], [1.0, math.inf])
        with pytest.raises(RepresentationError):
            Potential.piecewise_constant([0.0, 1.0], [1.0], L=2.0)

    def test_immutability(self):
        a = Potential.constant(3.0, 1.0)
        with pytest.raises(ValueError):
            a.values[0] = 5.0


class TestExcess:
    def test_constant_exact(self):
        a = Potential.constant(7.0, 2.0)
        assert a.l1_excess(3.0) == pytest.approx(8.0, abs=1e-15)
        assert a.l1_excess(9.0) == pytest.approx(4.0, abs=1e-15)

    def test_sign_change_inside_cell(self):
        # sampled ramp from -1 to 1 crosses the level inside one cell
        a = Potential.sampled([0.0, 1.0], [-1.0, 1.0])
        assert a.l1_excess(0.0) == pytest.approx(0.5, abs=1e-15)

    @given(st.integers(0, 2 ** 31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_matches_quadrature_piecewise(self, seed):
        rng = np.random.default_rng(seed)
        a = random_pc(rng)
        level = float(rng.uniform(-12.0, 52.0))
        exact = a.l1_excess(level)
        approx = brute_l1_excess(a, level, 0.0, 1.0)
        assert abs(exact - approx) <= 2e-3 * max(1.0, abs(exact))

    @given(st.integers(0, 2 ** 31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_matches_quadrature_sampled(self, seed):
        rng = np.random.default_rng(seed)
        grid = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, 6)), [1.0]])
        a = Potential.sampled(grid, rng.uniform(-5, 5, grid.size))
        level = float(rng.uniform(-6.0, 6.0))
        exact = a.l1_excess(level)
        approx = brute_l1_excess(a, level, 0.0, 1.0)
        assert abs(exact - approx) <= 1e-6 * max(1.0, abs(exact))

    def test_subinterval(self):
        a = Potential.piecewise_constant([0.0, 0.5, 1.0], [1.0, 3.0])
        assert a.l1_excess(0.0, (0.25, 0.75)) == pytest.approx(1.0, abs=1e-15)

    def test_interval_domain_checked(self):
        a = Potential.constant(1.0, 1.0)
        with pytest.raises(DomainError):
            a.l1_excess(0.0, (0.5, 1.5))


class TestCumulative:
    def test_piecewise_exact(self):
        a = Potential.piecewise_constant([0.0, 0.25, 1.0], [4.0, -2.0])
        xs = np.array([0.0, 0.1, 0.25, 0.6, 1.0])
        expect = np.array([0.0, 0.4, 1.0, 0.3, -0.5])
        assert np.allclose(a.cumulative(xs), expect, atol=1e-15)

    @given(st.integers(0, 2 ** 31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_difference_is_integral(self, seed):
        rng = np.random.default_rng(seed)
        a = random_pc(rng)
        lo, hi = np.sort(rng.uniform(0.0, 1.0, 2))
        if hi - lo < 1e-9:
            return
        diff = float(a.cumulative(hi) - a.cumulative(lo))
        assert abs(diff - a.integral((lo, hi))) <= 1e-12 * max(1.0, abs(diff))


class TestBoundsAndMasses:
    def test_ess_bounds(self):
        a = Potential.piecewise_constant([0.0, 0.5, 1.0], [-1.0, 4.0])
        assert a.ess_inf() == -1.0
        assert a.ess_sup() == 4.0
        assert a.ess_inf((0.5, 1.0)) == 4.0

    def test_dominance(self):
        a = Potential.constant(10.0, 1.0)
        assert a.dominates(9.0).holds
        assert not a.dominates(10.0).holds  # no strict part
        assert a.dominated_by(11.0).holds

    def test_deviation_mass(self):
        a = Potential.piecewise_constant([0.0, 0.5, 1.0], [1.0, 3.0])
        assert a.deviation_mass(2.0) == pytest.approx(1.0, abs=1e-12)
        assert a.deviation_mass(1.0) == pytest.approx(1.0, abs=1e-12)

    def test_pointwise_le(self):
        a = Potential.piecewise_constant([0.0, 0.5, 1.0], [1.0, 2.0])
        b = Potential.piecewise_constant([0.0, 0.25, 1.0], [1.0, 2.0])
        assert pointwise_le(a, b)
        assert not pointwise_le(b, a)


class TestTransforms:
    def test_clip_min(self):
        a = Potential.sampled([0.0, 1.0], [-1.0, 1.0])
        c = a.clip_min(0.0)
        assert c.ess_inf() >= 0.0
        assert c.value_at(1.0) == 1.0
        assert c.l1_excess(0.0) == pytest.approx(0.25, abs=1e-15)

    def test_restrict(self):
        a = Potential.piecewise_constant([0.0, 0.5, 1.0], [1.0, 3.0])
        r = a.restrict((0.25, 0.75))
        assert r.L == pytest.approx(0.5)
        assert r.value_at(0.0) == 1.0
        assert r.value_at(0.4) == 3.0

    def test_reflected(self):
        a = Potential.piecewise_constant([0.0, 0.25, 1.0], [5.0, 1.0])
        r = a.reflected()
        assert r.value_at(0.1) == 1.0
        assert r.value_at(0.9) == 5.0
        assert r.l1_excess(0.0) == pytest.approx(a.l1_excess(0.0), abs=1e-15)


class TestSerialization:
    def test_round_trip_piecewise(self):
        a = Potential.piecewise_constant([0.0, 1.0 / 3.0, 1.0], [1.5, -2.25])
        b = Potential.from_json_dict(json.loads(json.dumps(a.to_json_dict())))
        assert np.array_equal(a.xs, b.xs)
        assert np.array_equal(a.values, b.values)
        assert b.kind == PIECEWISE_CONSTANT

    def test_round_trip_sampled(self):
        a = Potential.sampled([0.0, 0.1, 1.0], [1.0, 2.0, 3.0])
        doc = a.to_json_dict()
        assert doc["interpolation"] == "linear"
        b = Potential.from_json_dict(doc)
        assert np.array_equal(a.xs, b.xs)

    def test_canonical_bytes_stable(self):
        a = Potential.piecewise_constant([0.0, 1.0 / 7.0, 1.0], [math.pi, -1.0])
        assert serialize.dumps(a.to_json_dict()) == serialize.dumps(a.to_json_dict())

    def test_17_digit_round_trip(self):
        x = 0.1 + 0.2  # not exactly 0.3
        assert float(serialize.format_float(x)) == x

    def test_malformed_rejected(self):
        with pytest.raises(RepresentationError):
            Potential.from_json_dict({"L": 1.0, "kind": "piecewise_constant"})
        with pytest.raises(RepresentationError):
            Potential.from_json_dict({"L": 1.0, "kind": "nope", "breakpoints": [0, 1],
                                      "values": [1.0]})


class TestInterval:
    def test_validation(self):
        with pytest.raises(DomainError):
            Interval(1.0, 1.0)
        with pytest.raises(DomainError):
            Interval(0.0, math.nan)
        assert Interval(0.0, 2.0).width == 2.0
