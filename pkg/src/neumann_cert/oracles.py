"""Independent brute-force verifiers for the closed forms and certificates.

Nothing here shares code paths with the shooting engine or the closed-form
constants: spectra come from symmetric finite differences, the interval
quotient from a discretized stationarity system, and the cotangent-sum
minimum from projected descent plus random feasible sampling.  Agreement
between these and the analytic routes is what the test suites certify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal, solveh_banded

from . import certify, constants
from .errors import DomainError
from .potential import TAU_AE, Interval, Potential

FD_NEUMANN = "neumann"
FD_MIXED_DN = "mixed_dn"  # u(lo) = 0, u'(hi) = 0
FD_MIXED_ND = "mixed_nd"  # u'(lo) = 0, u(hi) = 0


@dataclass(frozen=True)
class DiscreteMinimum:
    """Discretized minimum of the interval quotient, with its minimizer."""

    value: float
    minimizer: np.ndarray
    grid_size: int
    residual: float  # |value(N) - value(N/2)|, a convergence diagnostic


def _j_value_on_grid(M: float, lo: float, hi: float, N: int) -> tuple[float, np.ndarray]:
    """Minimize (int u'^2 - M int u^2) / u(hi)^2 over grid functions with
    u(lo) = 0, u(hi) = 1 by solving the stationarity system."""
    h = (hi - lo) / N
    inv_h = 1.0 / h
    # interior unknowns u_1..u_{N-1}; tridiagonal stationarity matrix
    diag = np.full(N - 1, 2.0 * inv_h - M * h)
    off = np.full(N - 2, -inv_h)
    rhs = np.zeros(N - 1)
    rhs[-1] = inv_h  # coupling to the fixed u_N = 1
    ab = np.zeros((2, N - 1))
    ab[0, 1:] = off
    ab[1, :] = diag
    interior = solveh_banded(ab, rhs, lower=False)
    u = np.concatenate([[0.0], interior, [1.0]])
    # the quotient at the stationary point (u(hi) = 1 so no denominator)
    grad = np.diff(u) * inv_h
    kinetic = float(np.sum(grad * grad) * h)
    weights = np.full(N + 1, h)
    weights[0] = weights[-1] = 0.5 * h
    mass = float(np.sum(weights * u * u))
    return kinetic - M * mass, u


def discrete_j_min(M: float, I, N: int) -> DiscreteMinimum:
    """Second-order finite-difference minimization of the interval quotient
    (int u'^2 - M int u^2)/u^2 at the free endpoint; converges to j_min at
    O(N^-2)."""
    if N < 100:
        raise DomainError("grid must have at least 100 cells")
    if not isinstance(I, Interval):
        I = Interval(float(I[0]), float(I[1]))
    w = I.width
    if not (M > 0.0 and M <= (math.pi ** 2) / (4.0 * w * w) * (1.0 + 1e-12)):
        raise DomainError(
            "level exceeds the quarter-period disfocality bound for the interval")
    value, u = _j_value_on_grid(M, I.lo, I.hi, N)
    coarse, _ = _j_value_on_grid(M, I.lo, I.hi, max(N // 2, 50))
    return DiscreteMinimum(value=value, minimizer=u, grid_size=N,
                           residual=abs(value - coarse))


@dataclass(frozen=True)
class FMinResult:
    """Projected-descent minimum of the cotangent sum on the simplex."""

    value: float
    violations: int
    minimizer: np.ndarray


def sample_simplex(rng: np.random.Generator, r: int, S: float,
                   count: int) -> np.ndarray:
    """count feasible points of {z > 0, sum z = S, z_i <= pi/2}, uniformly."""
    rows = []
    have = 0
    while have < count:
        batch = max(count - have, 1024)
        e = rng.exponential(size=(batch, r))
        z = S * e / np.sum(e, axis=1, keepdims=True)
        ok = z[np.all(z <= 0.5 * math.pi, axis=1)]
        if ok.size:
            rows.append(ok[: count - have])
            have += len(rows[-1])
    return np.concatenate(rows, axis=0)


def _project_simplex_box(z: np.ndarray, S: float, lo: float, hi: float) -> np.ndarray:
    """Euclidean projection onto {sum z = S, lo <= z_i <= hi} by bisection
    on the shift multiplier."""
    def total(mu: float) -> float:
        return float(np.sum(np.clip(z - mu, lo, hi)))

    a = float(np.min(z)) - hi
    b = float(np.max(z)) - lo
    for _ in range(200):
        mid = 0.5 * (a + b)
        if total(mid) > S:
            a = mid
        else:
            b = mid
        if b - a <= 1e-16 * max(1.0, abs(a), abs(b)):
            break
    return np.clip(z - 0.5 * (a + b), lo, hi)


def _cot_sum(z: np.ndarray) -> float:
    return float(np.sum(1.0 / np.tan(z)))


def descend_cotangent_sum(z0: np.ndarray, S: float) -> tuple[np.ndarray, float]:
    """Projected gradient descent of sum cot(z_i) on the feasible simplex
    from one start; backtracking line search, feasibility kept by projection."""
    r = z0.size
    hi = 0.5 * math.pi
    lo = 1e-9 * S / r
    z = _project_simplex_box(np.asarray(z0, dtype=float), S, lo, hi)
    val = _cot_sum(z)
    step = 0.1 * S / r
    for _ in range(400):
        s = np.sin(z)
        g = -1.0 / (s * s)
        moved = False
        trial = step
        for _ in range(40):
            cand = _project_simplex_box(z - trial * g, S, lo, hi)
            cval = _cot_sum(cand)
            if cval < val - 1e-15:
                z, val = cand, cval
                moved = True
                break
            trial *= 0.5
        if not moved:
            break
    return z, val


def numeric_f_min(r: int, S: float, samples: int = 10_000,
                  seed: int = 0) -> FMinResult:
    """Minimize sum cot(z_i) over the feasible simplex by projected descent
    from 32 random starts, and count random feasible samples falling below
    the closed-form minimum (must be none)."""
    if not (r >= 1 and r * math.pi > 2.0 * S and S > 0.0):
        raise DomainError("need r pi > 2 S > 0 for a feasible simplex")
    if samples < 10_000:
        raise DomainError("need at least 10^4 random samples")
    rng = np.random.default_rng(seed)

    best_val = math.inf
    best_arg = None
    for z0 in sample_simplex(rng, r, S, 32):
        z, val = descend_cotangent_sum(z0, S)
        if val < best_val:
            best_val = val
            best_arg = z

    closed = constants.f_min(r, S)
    zs = sample_simplex(rng, r, S, samples)
    fvals = np.sum(1.0 / np.tan(zs), axis=1)
    violations = int(np.count_nonzero(fvals < closed - 1e-9))
    return FMinResult(value=best_val, violations=violations, minimizer=best_arg)


def fd_spectrum(a: Potential, N: int, bc: str = FD_NEUMANN) -> np.ndarray:
    """All eigenvalues of the symmetric three-point discretization of
    -u'' - a(x) u under the chosen boundary conditions; resonance indicator
    is min |eigenvalue|.

    The potential enters through exact averages over node-centered windows
    (half windows at the ends), which keeps the scheme second-order accurate
    even when a jump of a piecewise-constant potential falls between nodes;
    for constant potentials the matrix coincides with pointwise sampling.
    """
    if N < 200:
        raise DomainError("grid must have at least 200 cells")
    L = a.L
    h = L / N
    xs = np.linspace(0.0, L, N + 1)
    lo = np.clip(xs - 0.5 * h, 0.0, L)
    hi = np.clip(xs + 0.5 * h, 0.0, L)
    av = (a.cumulative(hi) - a.cumulative(lo)) / (hi - lo)
    inv_h2 = 1.0 / (h * h)

    if bc == FD_NEUMANN:
        keep = slice(0, N + 1)
        left_neumann = right_neumann = True
    elif bc == FD_MIXED_DN:
        keep = slice(1, N + 1)
        left_neumann, right_neumann = False, True
    elif bc == FD_MIXED_ND:
        keep = slice(0, N)
        left_neumann, right_neumann = True, False
    else:
        raise DomainError(f"unknown boundary kind {bc!r}")

    vals = av[keep]
    m = vals.size
    d = 2.0 * inv_h2 - vals
    e = np.full(m - 1, -inv_h2)
    # half-weight boundary rows symmetrize to sqrt(2) off-diagonal couplings
    if left_neumann:
        e[0] = -math.sqrt(2.0) * inv_h2
    if right_neumann:
        e[-1] = -math.sqrt(2.0) * inv_h2
    return np.sort(eigh_tridiagonal(d, e, eigvals_only=True))


def resonance_indicator(a: Potential, N: int = 800, bc: str = FD_NEUMANN) -> float:
    """min |eigenvalue| of the finite-difference operator: near zero iff the
    boundary problem admits a nontrivial solution (up to O(N^-2) error)."""
    sigma = fd_spectrum(a, N, bc)
    return float(np.min(np.abs(sigma)))


def brute_partition_check(a: Potential, n: int, grid: int) -> Optional[certify.Partition]:
    """Exhaustive lexicographic search for a certifying partition with points
    on a uniform grid; cross-validates the greedy searcher for n <= 2."""
    if not (1 <= n <= 2):
        raise DomainError("exhaustive search supports levels 1 and 2 only")
    if not (2 * n + 3 <= grid + 1 and grid <= 60):
        raise DomainError("grid must have between 2n + 2 and 60 cells")
    L = a.L
    lam = constants.lambda_n(n, L)
    if not a.dominates(lam).holds:
        return None
    cap = L / (2.0 * n) - TAU_AE
    step = L / grid
    max_step = int(math.floor(cap / step))  # gap in grid steps must be <= this

    def interval_ok(x0: float, x1: float) -> bool:
        w = x1 - x0
        if not (0.0 < w < cap):
            return False
        bound = (n * math.pi / L) * constants.cot(n * math.pi * w / L)
        return a.l1_excess(lam, (x0, x1)) < bound * (1.0 - certify.TAU_MARGIN_REL)

    k = 2 * n + 1  # interior points to place
    chosen: list[int] = []

    def dfs(prev_idx: int, depth: int) -> Optional[list[int]]:
        if depth == k:
            if interval_ok(prev_idx * step, L):
                return list(chosen)
            return None
        lo_idx = prev_idx + 1
        hi_idx = min(prev_idx + max_step, grid - (k - depth))
        for j in range(lo_idx, hi_idx + 1):
            if not interval_ok(prev_idx * step, j * step):
                continue
            chosen.append(j)
            hit = dfs(j, depth + 1)
            if hit is not None:
                return hit
            chosen.pop()
        return None

    hit = dfs(0, 0)
    if hit is None:
        return None
    points = np.concatenate([[0.0], np.asarray(hit, dtype=float) * step, [L]])
    part = certify.Partition(n, points)
    if certify.check_l1_partition(a, part).verdict != certify.UNIQUE_TRIVIAL:
        return None
    return part
