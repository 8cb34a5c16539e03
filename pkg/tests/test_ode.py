"""Shooting integrator: closed-form checks, residuals, zero profiles."""

import math

import numpy as np
import pytest

from neumann_cert import constants, ode
from neumann_cert.errors import PreconditionError
from neumann_cert.potential import Potential


class TestConstantPotentialClosedForm:
    def test_cosine_solution(self):
        lam = 4.0
        a = Potential.constant(lam, 1.0)
        t = ode.neumann_shot(a)
        xs = np.linspace(0.0, 1.0, 97)
        w = math.sqrt(lam)
        assert np.max(np.abs(t.eval_u(xs) - np.cos(w * xs))) <= 1e-9
        assert np.max(np.abs(t.eval_du(xs) + w * np.sin(w * xs))) <= 1e-8

    def test_cosh_solution_negative_potential(self):
        a = Potential.constant(-1.0, 1.0)
        t = ode.neumann_shot(a)
        xs = np.linspace(0.0, 1.0, 50)
        assert np.max(np.abs(t.eval_u(xs) - np.cosh(xs))) <= 1e-9
        assert t.end_residual > 0.1  # far from resonance

    def test_residual_zero_at_eigenvalues(self):
        for q in (1, 2, 3, 5):
            a = Potential.constant(constants.lambda_n(q, 1.0), 1.0)
            assert abs(ode.neumann_residual(a)) <= 1e-10

    def test_residual_large_off_eigenvalues(self):
        a = Potential.constant(0.5 * (constants.lambda_n(1, 1.0)
                                      + constants.lambda_n(2, 1.0)), 1.0)
        assert abs(ode.neumann_residual(a)) >= 1e-2

    def test_scale_invariance_of_residual(self):
        a = Potential.constant(7.0, 1.0)
        r1 = ode.integrate(a, 1.0, 0.0).end_residual
        r2 = ode.integrate(a, 2.0, 0.0).end_residual
        assert abs(r1 - r2) <= 1e-12 * max(1.0, abs(r1))


class TestPruferAngle:
    def test_angle_advance_counts_half_waves(self):
        for q in (1, 2, 4):
            a = Potential.constant(constants.lambda_n(q, 1.0), 1.0)
            t = ode.neumann_shot(a)
            advance = float(t.eval_theta(1.0) - t.eval_theta(0.0))
            assert abs(advance - q * math.pi) <= 1e-6

    def test_energy_integrals(self):
        lam = constants.lambda_n(1, 1.0)
        a = Potential.constant(lam, 1.0)
        t = ode.neumann_shot(a)
        assert float(t.eval_P(1.0)) == pytest.approx(0.5, abs=1e-8)
        assert float(t.eval_Q(1.0)) == pytest.approx(0.5 * lam, abs=1e-6)


class TestPiecewiseIntegration:
    def test_step_potential_continuity(self):
        a = Potential.piecewise_constant([0.0, 0.5, 1.0], [4.0, 25.0])
        t = ode.neumann_shot(a)
        # closed form on the left cell: cos(2x)
        xs = np.linspace(0.0, 0.5, 40)
        assert np.max(np.abs(t.eval_u(xs) - np.cos(2 * xs))) <= 1e-9
        # C^1 across the breakpoint
        assert abs(float(t.eval_u(0.5 + 1e-7)) - float(t.eval_u(0.5))) <= 1e-5
        assert abs(float(t.eval_du(0.5 + 1e-7)) - float(t.eval_du(0.5))) <= 1e-4

    def test_sampled_potential_runs(self):
        grid = np.linspace(0.0, 1.0, 11)
        a = Potential.sampled(grid, 5.0 + np.sin(2 * np.pi * grid))
        t = ode.neumann_shot(a)
        assert np.all(np.isfinite(t.u))
        assert t.xs[0] == 0.0 and t.xs[-1] == 1.0


class TestWitnessSearch:
    def test_found_at_resonance(self, lam2_const):
        t = ode.find_nontrivial_neumann(lam2_const)
        assert t is not None
        assert abs(t.end_residual) <= ode.RESIDUAL_TOL

    def test_none_off_resonance(self, mid_band):
        assert ode.find_nontrivial_neumann(mid_band) is None


class TestZeroProfile:
    def test_constant_eigenfunction_zeros(self):
        q = 3
        a = Potential.constant(constants.lambda_n(q, 1.0), 1.0)
        t = ode.find_nontrivial_neumann(a)
        prof = ode.zero_profile(t)
        assert prof.m == q
        expect_zeros = (2.0 * np.arange(q) + 1.0) / (2.0 * q)
        assert np.max(np.abs(np.sort(prof.zeros) - expect_zeros)) <= 1e-9
        expect_dz = np.arange(q + 1) / q
        assert np.max(np.abs(np.sort(prof.dprime_zeros) - expect_dz)) <= 1e-9

    def test_interlacing_enforced(self):
        with pytest.raises(Exception):
            ode.ZeroProfile(dprime_zeros=np.array([0.0, 0.2, 1.0]),
                            zeros=np.array([0.5, 0.6]))

    def test_requires_neumann_residual(self, mid_band):
        t = ode.neumann_shot(mid_band)
        with pytest.raises(PreconditionError):
            ode.zero_profile(t, require_neumann=True)


class TestMixedResiduals:
    def test_principal_mixed_eigenvalue(self):
        a = Potential.constant(constants.mu_n(1, 1.0), 1.0)
        assert abs(ode.disfocal_residual(a, None, ode.MIXED_ND)) <= 1e-10
        assert abs(ode.disfocal_residual(a, None, ode.MIXED_DN)) <= 1e-10

    def test_disfocal_below_threshold(self):
        # |a| < pi^2/4 on a unit interval: both mixed problems nonresonant
        a = Potential.constant(0.9 * math.pi ** 2 / 4.0, 1.0)
        assert abs(ode.disfocal_residual(a, None, ode.MIXED_ND)) > 1e-3
        assert abs(ode.disfocal_residual(a, None, ode.MIXED_DN)) > 1e-3


class TestTrajectoryRecords:
    def test_json_records(self, mid_band):
        t = ode.neumann_shot(mid_band)
        recs = t.to_json_records()
        assert recs[0].keys() == {"x", "u", "du", "theta"}
        xs = [r["x"] for r in recs]
        assert xs == sorted(xs)
        assert xs[0] == 0.0 and xs[-1] == 1.0
        assert all(math.isfinite(r["u"]) for r in recs)
