"""Potential families: exactness, dominance, margins, and preconditions."""

import math

import numpy as np
import pytest

from neumann_cert import certify, constants, constructions, ode
from neumann_cert.errors import NeumannCertError
from neumann_cert.potential import Potential

PINNED_PARTITION = certify.Partition(1, np.array([0.0, 0.2, 0.45, 0.8, 1.0]))


class TestConstantResonant:
    def test_solution_is_cosine(self):
        a, sol = constructions.constant_resonant(3, 1.0)
        assert a.values[0] == pytest.approx(constants.lambda_n(3, 1.0), rel=1e-15)
        xs = np.linspace(0.0, 1.0, 101)
        u = np.array([sol.u(float(x)) for x in xs])
        assert np.max(np.abs(u - np.cos(3 * math.pi * xs))) <= 1e-12
        assert sol.joint_defect() <= 1e-15
        assert constructions.max_ode_defect(a, sol) <= 1e-8

    def test_rejects_bad_count(self):
        with pytest.raises(NeumannCertError):
            constructions.constant_resonant(0, 1.0)


class TestResonantStep:
    def test_pinned_partition(self):
        a, sol = constructions.resonant_step(PINNED_PARTITION)
        gaps = PINNED_PARTITION.gaps
        assert np.allclose(a.values, (math.pi ** 2) / (4.0 * gaps ** 2), rtol=1e-15)
        # derivative zeros exactly at the even points, zeros at the odd ones
        assert sol.du(0.0) == 0.0
        assert sol.du(1.0) == 0.0
        for z in PINNED_PARTITION.points[1::2]:
            assert abs(sol.u(float(z))) <= 1e-12
        assert sol.joint_defect() <= 1e-12
        assert constructions.max_ode_defect(a, sol) <= 1e-8
        assert abs(ode.neumann_residual(a)) <= 1e-8

    def test_unvalidated_construction_matches(self):
        a1, _ = constructions.resonant_step(PINNED_PARTITION, validate=False)
        a2, _ = constructions.resonant_step(PINNED_PARTITION, validate=True)
        assert np.array_equal(a1.values, a2.values)

    def test_equal_partition_reduces_to_constant(self):
        part = certify.Partition(1, np.linspace(0.0, 1.0, 5))
        a, _ = constructions.resonant_step(part)
        assert np.allclose(a.values, constants.lambda_n(2, 1.0), rtol=1e-12)


class TestMinimizingSequence:
    def test_structure_and_margins(self):
        n, L, eps = 1, 1.0, 1e-2
        a, sol = constructions.minimizing_sequence(n, L, eps,
                                                   nodes_per_subinterval=10_000)
        lam = constants.lambda_n(n, L)
        assert a.dominates(lam).holds
        excess = a.l1_excess(lam)
        beta = constants.beta1(n, L)
        assert excess > beta  # never attained, approached from above
        assert (excess - beta) / beta <= 0.03
        assert sol.joint_defect() <= 1e-12
        # the potential equals lambda_n away from the correction bumps
        assert a.value_at(0.5) == pytest.approx(lam, rel=1e-12)

    def test_solution_solves_equation(self):
        a, sol = constructions.minimizing_sequence(1, 1.0, 1e-2,
                                                   nodes_per_subinterval=10_000)
        assert constructions.max_ode_defect(a, sol) <= 1e-6

    def test_preconditions(self):
        with pytest.raises(NeumannCertError):
            constructions.minimizing_sequence(0, 1.0, 1e-2)
        with pytest.raises(NeumannCertError):
            constructions.minimizing_sequence(1, 1.0, 0.3)  # eps > T/10
        with pytest.raises(NeumannCertError):
            constructions.minimizing_sequence(1, 1.0, 1e-2,
                                              nodes_per_subinterval=100)


class TestClosedFormSolution:
    def test_breakpoint_ownership(self):
        _, sol = constructions.resonant_step(PINNED_PARTITION)
        # evaluation at a breakpoint uses the piece to its left; just left
        # and right of it the values agree (C^1 joints)
        for b in sol.breakpoints[1:-1]:
            b = float(b)
            assert abs(sol.u(b) - sol.u(b - 1e-9)) <= 1e-7
            assert abs(sol.u(b) - sol.u(b + 1e-9)) <= 1e-7
        assert sol.u(0.0) == sol.u(1e-300)  # x = 0 belongs to the first piece

    def test_descriptor_round_trip(self):
        _, sol = constructions.constant_resonant(2, 1.0)
        doc = sol.to_json_dict()
        assert doc["L"] == 1.0
        assert len(doc["pieces"]) >= 1
        assert all("kind" in p for p in doc["pieces"])

    def test_min_amplitude_positive(self):
        _, sol = constructions.resonant_step(PINNED_PARTITION)
        assert sol.min_amplitude() > 0.0


class TestNonAttainmentWitness:
    def test_closed_form(self):
        for n in range(1, 6):
            w = constructions.non_attainment_witness(n, 1.0)
            expect = (n * math.pi) * constants.cot(
                n * math.pi / (2.0 * (n + 1)))
            assert abs(w - expect) <= 1e-10 * max(1.0, abs(expect))
            assert w > 0.0


class TestL1Counterexample:
    def test_pinned_case(self):
        a = constructions.l1_counterexample(PINNED_PARTITION, 1e-3)
        lam = constants.lambda_n(1, 1.0)
        assert a.dominates(lam).holds
        cert = certify.check_l1_partition(a, PINNED_PARTITION)
        assert cert.verdict == certify.UNIQUE_TRIVIAL
        assert a.l1_excess(lam) > constants.beta1(1, 1.0)
        glob = certify.check_l1_global(a, 1)
        assert glob.verdict == certify.INCONCLUSIVE

    def test_equal_gaps_rejected(self):
        part = certify.Partition(1, np.linspace(0.0, 1.0, 5))
        with pytest.raises(NeumannCertError):
            constructions.l1_counterexample(part, 1e-3)

    def test_oversized_eps_rejected(self):
        with pytest.raises(NeumannCertError):
            constructions.l1_counterexample(PINNED_PARTITION, 100.0)
