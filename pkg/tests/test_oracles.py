"""Discretization oracles: quotient minima, simplex descent, spectra, search."""

import math

import numpy as np
import pytest

from neumann_cert import certify, constants, constructions, oracles
from neumann_cert.errors import DomainError
from neumann_cert.potential import Potential


class TestDiscreteJMin:
    def test_interior_pinned(self):
        # M=1 on [0, pi/3]: limit is cot(pi/3) = 0.5773502691896258
        got = oracles.discrete_j_min(1.0, (0.0, math.pi / 3.0), 2000)
        assert abs(got.value - 0.5773503) / 0.5773503 <= 1e-4
        assert got.grid_size == 2000
        assert got.residual <= 1e-5

    def test_boundary_pinned(self):
        got = oracles.discrete_j_min(math.pi ** 2 / 4.0, (0.0, 1.0), 2000)
        assert abs(got.value) <= 1e-4
        xs = np.linspace(0.0, 1.0, got.minimizer.size)
        assert np.max(np.abs(got.minimizer - np.sin(0.5 * math.pi * xs))) <= 1e-3

    def test_minimizer_normalized_endpoint(self):
        got = oracles.discrete_j_min(0.5, (0.0, 1.0), 500)
        assert got.minimizer[0] == pytest.approx(0.0, abs=1e-12)
        assert got.minimizer[-1] == pytest.approx(1.0, abs=1e-9)

    def test_preconditions(self):
        with pytest.raises(DomainError):
            oracles.discrete_j_min(1.0, (0.0, 1.0), 50)  # grid too coarse
        with pytest.raises(DomainError):
            oracles.discrete_j_min(1.1 * math.pi ** 2 / 4.0, (0.0, 1.0), 500)


class TestNumericFMin:
    def test_pinned_equal_split(self):
        res = oracles.numeric_f_min(4, math.pi, seed=0)
        assert abs(res.value - 4.0 * constants.cot(math.pi / 4.0)) <= 1e-6
        assert res.violations == 0
        assert float(np.ptp(res.minimizer)) <= 1e-4

    def test_boundary_escape(self):
        S = 0.5 * math.pi
        z0 = np.array([0.5 * math.pi - 1e-4, S - 0.5 * math.pi + 1e-4])
        z, val = oracles.descend_cotangent_sum(z0, S)
        assert float(np.ptp(z)) <= 1e-3
        assert abs(val - constants.f_min(2, S)) <= 1e-6

    def test_sample_simplex(self):
        rng = np.random.default_rng(0)
        zs = oracles.sample_simplex(rng, 5, math.pi, 500)
        assert zs.shape == (500, 5)
        assert np.allclose(np.sum(zs, axis=1), math.pi, atol=1e-9)
        assert np.all(zs > 0.0) and np.all(zs <= 0.5 * math.pi + 1e-12)

    def test_infeasible_rejected(self):
        with pytest.raises(DomainError):
            oracles.numeric_f_min(2, 1.2 * math.pi)


class TestFdSpectrum:
    def test_free_laplacian_eigenvalues(self):
        a = Potential.constant(0.0, 1.0)
        sigma = oracles.fd_spectrum(a, 800)
        # continuum eigenvalues (k pi)^2; indicator exactly zero
        assert abs(sigma[0]) <= 1e-9
        for k in (1, 2, 3):
            assert abs(sigma[k] - (k * math.pi) ** 2) <= 1e-2 * (k * math.pi) ** 2

    def test_resonance_detection_hook(self):
        a = Potential.constant(constants.lambda_n(2, 1.0), 1.0)
        assert oracles.resonance_indicator(a, 2000) <= 1e-3

    def test_mid_band_quiet(self, mid_band):
        assert oracles.resonance_indicator(mid_band, 800) >= 1.0

    def test_mixed_boundary_kinds(self):
        a = Potential.constant(constants.mu_n(1, 1.0), 1.0)
        assert oracles.resonance_indicator(a, 2000, oracles.FD_MIXED_DN) <= 1e-3
        assert oracles.resonance_indicator(a, 2000, oracles.FD_MIXED_ND) <= 1e-3
        free = Potential.constant(0.0, 1.0)
        assert oracles.resonance_indicator(free, 800, oracles.FD_MIXED_DN) \
            == pytest.approx(math.pi ** 2 / 4.0, rel=1e-3)

    def test_window_average_resolves_misaligned_step(self):
        # breakpoints off the grid: windowed sampling stays second-order
        part = certify.Partition(1, np.array([0.0, 0.22, 0.47, 0.77, 1.0]))
        a, _ = constructions.resonant_step(part)
        ind800 = oracles.resonance_indicator(a, 800)
        ind1600 = oracles.resonance_indicator(a, 1600)
        assert ind800 <= 5e-4
        assert ind1600 <= 0.3 * ind800  # ~4x decay per doubling

    def test_grid_too_coarse_rejected(self):
        with pytest.raises(DomainError):
            oracles.fd_spectrum(Potential.constant(1.0, 1.0), 100)


class TestBrutePartitionSearch:
    def test_easy_case_found_and_certified(self):
        a = Potential.constant(constants.lambda_n(1, 1.0) + 1.0, 1.0)
        part = oracles.brute_partition_check(a, 1, 30)
        assert part is not None
        assert certify.check_l1_partition(a, part).verdict == certify.UNIQUE_TRIVIAL

    def test_resonant_case_none(self, lam2_const):
        assert oracles.brute_partition_check(lam2_const, 1, 30) is None

    def test_limits_enforced(self):
        a = Potential.constant(1.0, 1.0)
        with pytest.raises(DomainError):
            oracles.brute_partition_check(a, 3, 30)
        with pytest.raises(DomainError):
            oracles.brute_partition_check(a, 1, 100)
