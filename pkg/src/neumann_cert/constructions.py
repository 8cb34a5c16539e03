"""Explicit potential/solution families with closed-form verification.

Four generators: the excess-minimizing family (corrected sine plus alternating
reflections, whose excess approaches the optimal L^1 constant from above as
eps -> 0+ without attaining it), piecewise-cosine step resonators glued C^1
over a partition, constant resonant potentials, and the counterexample family
showing the per-interval L^1 criterion does not imply the global one.

Every generator returns exact closed-form solutions alongside the potential
and self-validates (C^1 joints, Neumann ends, domination) at build time.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from . import certify, constants, ode
from .errors import ConstructionError, DomainError
from .potential import Potential

# C^1 gluing defect allowed at piece joints, relative to the piece scale
JOINT_TOL = 1e-12
# default sampled-grid density of the minimizing family (nodes per subinterval)
MINIMIZING_NODES = 30_000


@dataclass(frozen=True)
class _TrigPiece:
    lo: float
    hi: float
    amp: float
    omega: float
    x0: float
    form: str  # "cos" or "sin"

    def u(self, x, sol):
        s = self.omega * (x - self.x0)
        return self.amp * (math.cos(s) if self.form == "cos" else math.sin(s))

    def du(self, x, sol):
        s = self.omega * (x - self.x0)
        if self.form == "cos":
            return -self.amp * self.omega * math.sin(s)
        return self.amp * self.omega * math.cos(s)

    def ddu(self, x, sol):
        return -(self.omega * self.omega) * self.u(x, sol)

    def scale(self):
        return abs(self.amp) * max(1.0, self.omega)

    def descriptor(self):
        return {"kind": self.form, "lo": self.lo, "hi": self.hi,
                "amplitude": self.amp, "omega": self.omega, "x0": self.x0}


@dataclass(frozen=True)
class _CorrectedSinePiece:
    """-sin(omega (x - node)) plus the cubic correction that zeroes u'(lo).

    The correction d0 (x - eps)^3 / (3 eps^2) with d0 = omega cos(omega node)
    vanishes to second order at x = eps, so the piece joins the pure sine
    exactly; at x = lo = 0 its derivative d0 ((x - eps)/eps)^2 cancels the
    sine slope exactly in floating point.
    """

    lo: float
    hi: float
    omega: float
    node: float
    eps: float
    d0: float

    def u(self, x, sol):
        p = x - self.eps
        return (-math.sin(self.omega * (x - self.node))
                + self.d0 * p * p * p / (3.0 * self.eps * self.eps))

    def du(self, x, sol):
        q = (x - self.eps) / self.eps
        return -(self.omega * math.cos(self.omega * (x - self.node))) + self.d0 * q * q

    def ddu(self, x, sol):
        w = self.omega
        return (w * w * math.sin(w * (x - self.node))
                + 2.0 * self.d0 * (x - self.eps) / (self.eps * self.eps))

    def scale(self):
        return max(1.0, self.omega, 2.0 * abs(self.d0) / self.eps)

    def descriptor(self):
        return {"kind": "corrected_sine", "lo": self.lo, "hi": self.hi,
                "omega": self.omega, "node": self.node, "eps": self.eps,
                "slope_deficit": self.d0}


@dataclass(frozen=True)
class _ReflectionPiece:
    """u(x) = sign * u(2 center - x), delegating to already-built pieces.

    The reflected point of every x in (lo, hi] lies strictly left of lo, so
    evaluation always terminates (breakpoints belong to their left piece).
    """

    lo: float
    hi: float
    center: float
    sign: float

    def u(self, x, sol):
        return self.sign * sol.u(2.0 * self.center - x)

    def du(self, x, sol):
        return -self.sign * sol.du(2.0 * self.center - x)

    def ddu(self, x, sol):
        return self.sign * sol.ddu(2.0 * self.center - x)

    def scale(self):
        return 1.0

    def descriptor(self):
        return {"kind": "reflection", "lo": self.lo, "hi": self.hi,
                "center": self.center, "sign": self.sign}


class ClosedFormSolution:
    """Piecewise closed-form nontrivial solution of u'' + a(x) u = 0.

    Evaluation dispatches on half-open-from-the-right pieces: a breakpoint
    belongs to the piece on its left (except 0, owned by the first piece).
    """

    def __init__(self, L: float, pieces: tuple, name: str):
        if not pieces:
            raise ConstructionError("solution needs at least one piece")
        if pieces[0].lo != 0.0 or pieces[-1].hi != L:
            raise ConstructionError("pieces must cover [0, L]")
        for p, q in zip(pieces, pieces[1:]):
            if p.hi != q.lo:
                raise ConstructionError("pieces must join contiguously")
        self.L = float(L)
        self.pieces = tuple(pieces)
        self.name = str(name)
        self._los = [p.lo for p in pieces]

    def _piece(self, x: float):
        # bisect_left gives the first piece lo >= x; the owner is the piece to
        # its left (breakpoints belong to their left piece), except x == 0
        if not (0.0 <= x <= self.L):
            raise DomainError(f"evaluation point {x!r} outside [0, {self.L!r}]")
        if x == 0.0:
            return self.pieces[0]
        k = bisect_left(self._los, x)
        if k < len(self._los) and self._los[k] == x:
            return self.pieces[max(k - 1, 0)]
        return self.pieces[k - 1]

    def u(self, x: float) -> float:
        return self._piece(x).u(float(x), self)

    def du(self, x: float) -> float:
        return self._piece(x).du(float(x), self)

    def ddu(self, x: float) -> float:
        return self._piece(x).ddu(float(x), self)

    def sample_u(self, xs) -> np.ndarray:
        return np.asarray([self.u(float(x)) for x in np.atleast_1d(xs)])

    def sample_du(self, xs) -> np.ndarray:
        return np.asarray([self.du(float(x)) for x in np.atleast_1d(xs)])

    @property
    def breakpoints(self) -> np.ndarray:
        return np.asarray(self._los + [self.L])

    def joint_defect(self) -> float:
        """Largest scaled C^1 mismatch across interior joints."""
        worst = 0.0
        for left, right in zip(self.pieces, self.pieces[1:]):
            x = left.hi
            s = max(left.scale(), right.scale())
            worst = max(worst,
                        abs(left.u(x, self) - right.u(x, self)) / s,
                        abs(left.du(x, self) - right.du(x, self)) / s)
        return worst

    def min_amplitude(self, samples_per_piece: int = 33) -> float:
        """Smallest sampled value of sqrt(u^2 + (u'/scale)^2)."""
        best = math.inf
        for p in self.pieces:
            s = max(p.scale(), 1.0)
            for x in np.linspace(p.lo, p.hi, samples_per_piece):
                x = float(min(max(x, 0.0), self.L))
                best = min(best, math.hypot(self.u(x), self.du(x) / s))
        return best

    def to_json_dict(self) -> dict:
        return {
            "L": self.L,
            "name": self.name,
            "breakpoints": [float(b) for b in self.breakpoints],
            "pieces": [p.descriptor() for p in self.pieces],
        }


def _validate_solution(sol: ClosedFormSolution) -> None:
    defect = sol.joint_defect()
    if not defect <= JOINT_TOL:
        raise ConstructionError(f"C1 joint defect {defect:.3e} exceeds {JOINT_TOL:.1e}")
    if not sol.min_amplitude() > 0.0:
        raise ConstructionError("solution amplitude vanishes somewhere")


def max_ode_defect(a: Potential, sol: ClosedFormSolution,
                   samples_per_piece: int = 1000) -> float:
    """max |u''(x) + a(x) u(x)| over interior samples of every piece."""
    worst = 0.0
    for p in sol.pieces:
        xs = np.linspace(p.lo, p.hi, samples_per_piece + 2)[1:-1]
        vals = a.values_at(xs)
        for x, ax in zip(xs, vals):
            x = float(x)
            worst = max(worst, abs(sol.ddu(x) + float(ax) * sol.u(x)))
    return worst


def minimizing_sequence(n: int, L: float, eps: float,
                        nodes_per_subinterval: int = MINIMIZING_NODES
                        ) -> tuple[Potential, ClosedFormSolution]:
    """The family whose excess over lambda_n approaches the optimal L^1
    constant from above as eps -> 0+.

    The base piece on [0, L/(2(n+1))] is a negative sine plus a cubic
    correction supported on [0, eps] that enforces u'(0) = 0; the remaining
    2n+1 subintervals are alternating reflections (sign flip across odd
    multiples of the subinterval length, none across even multiples).  The
    potential -u''/u equals lambda_n exactly except within eps of the even
    reflection points, where it exceeds lambda_n; it is emitted as a
    sampled-linear grid, dense on those bumps with exact constant tails.
    """
    if n < 1:
        raise DomainError("level must be >= 1")
    if not (L > 0.0 and math.isfinite(L)):
        raise DomainError("domain length must be positive and finite")
    T = L / (2.0 * (n + 1))
    if not (0.0 < eps <= T / 10.0):
        raise DomainError(
            f"eps must lie in (0, {T / 10.0!r}] (a tenth of the subinterval)")
    if nodes_per_subinterval < 10_000:
        raise DomainError("grid density must be at least 10^4 nodes per subinterval")

    omega = n * math.pi / L
    d0 = omega * math.cos(omega * T)
    lam = constants.lambda_n(n, L)

    joints = [2.0 * m * T for m in range(n + 2)]
    joints[-1] = L  # guard the last joint against accumulated rounding
    pieces: list = [
        _CorrectedSinePiece(0.0, eps, omega, T, eps, d0),
        _TrigPiece(eps, T, -1.0, omega, T, "sin"),
        _ReflectionPiece(T, joints[1], T, -1.0),
    ]
    for m in range(2, n + 2):
        pieces.append(_ReflectionPiece(joints[m - 1], joints[m],
                                       m * T, float((-1.0) ** m)))
    sol = ClosedFormSolution(L, tuple(pieces), f"minimizing_family_n{n}")

    du0 = sol.du(0.0)
    if not abs(du0) <= 1e-15 * omega:
        raise ConstructionError(f"left end slope {du0!r} is not exactly zero")
    # the right end reflects onto x ~ 0 up to rounding in the joint positions;
    # the residual slope is bounded by that rounding times the slope scale
    duL = sol.du(L)
    if not abs(duL) <= 1e-12 * (omega + 2.0 * d0 / eps) * max(1.0, L):
        raise ConstructionError(f"right end slope {duL!r} exceeds rounding scale")
    _validate_solution(sol)

    # grid: 10^4+ nodes on each bump side [e_j - eps, e_j] / [e_j, e_j + eps];
    # the outer edge of each side gets the exact constant lambda_n so the
    # linear tails between sides interpolate lambda_n exactly
    def bump_side(a_lo: float, a_hi: float, edge_at_start: bool):
        xs = np.linspace(a_lo, a_hi, nodes_per_subinterval + 1)
        vs = np.empty_like(xs)
        for i, x in enumerate(xs):
            x = float(x)
            vs[i] = -sol.ddu(x) / sol.u(x)
        vs[0 if edge_at_start else -1] = lam
        return xs, vs

    xs_parts = []
    vs_parts = []
    for j, e in enumerate(joints):
        if j > 0:
            xs, vs = bump_side(e - eps, e, edge_at_start=True)
            xs_parts.append(xs)
            vs_parts.append(vs)
        if j < len(joints) - 1:
            xs, vs = bump_side(e, e + eps, edge_at_start=False)
            xs_parts.append(xs)
            vs_parts.append(vs)
    grid = np.concatenate(xs_parts)
    values = np.concatenate(vs_parts)
    order = np.argsort(grid, kind="stable")
    grid = grid[order]
    values = values[order]
    keep = np.concatenate([[True], np.diff(grid) > 0.0])
    grid = grid[keep]
    values = values[keep]
    grid[0] = 0.0
    grid[-1] = L
    pot = Potential.sampled(grid, values, L)

    dom = pot.dominates(lam)
    if not dom.holds:
        raise ConstructionError("emitted potential fails to dominate lambda_n")
    return pot, sol


def resonant_step(part: certify.Partition, validate: bool = True
                  ) -> tuple[Potential, ClosedFormSolution]:
    """Piecewise-constant resonant potential pi^2/(4 gap_i^2) on a partition,
    with its exact piecewise-cosine Neumann solution.

    The solution is k_i cos(pi (x - y_i) / (2 gap_i)) on even intervals and
    k_i cos(pi (y_{i+1} - x) / (2 gap_i)) on odd ones; k_0 = 1 and C^1 gluing
    forces k_{i+1} = -k_i gap_{i+1}/gap_i at zero joints (odd points) and
    k_{i+1} = k_i at maximum joints (even points).
    """
    pts = part.points
    if pts[0] != 0.0:
        raise DomainError("partition must start at 0")
    L = float(pts[-1])
    gaps = part.gaps
    values = (math.pi ** 2) / (4.0 * gaps ** 2)

    k = [1.0]
    for i in range(gaps.size - 1):
        k.append(-k[i] * float(gaps[i + 1] / gaps[i]) if i % 2 == 0 else k[i])

    pieces = []
    for i in range(gaps.size):
        w = math.pi / (2.0 * float(gaps[i]))
        x0 = float(pts[i]) if i % 2 == 0 else float(pts[i + 1])
        pieces.append(_TrigPiece(float(pts[i]), float(pts[i + 1]), k[i], w, x0, "cos"))
    sol = ClosedFormSolution(L, tuple(pieces), f"step_resonant_n{part.n}")
    pot = Potential.piecewise_constant(pts, values)

    if sol.du(0.0) != 0.0 or sol.du(L) != 0.0:
        raise ConstructionError("end slopes of the glued cosine are not exactly zero")
    _validate_solution(sol)
    if validate:
        res = ode.neumann_residual(pot)
        if not abs(res) <= 1e-8:
            raise ConstructionError(f"step potential residual {res:.3e} exceeds 1e-8")
    return pot, sol


def constant_resonant(q: int, L: float) -> tuple[Potential, ClosedFormSolution]:
    """The constant potential (q pi / L)^2 with solution cos(q pi x / L)."""
    if q < 1:
        raise DomainError("mode number must be >= 1")
    if not (L > 0.0 and math.isfinite(L)):
        raise DomainError("domain length must be positive and finite")
    pot = Potential.constant(constants.lambda_n(q, L), L)
    sol = ClosedFormSolution(
        L, (_TrigPiece(0.0, L, 1.0, q * math.pi / L, 0.0, "cos"),),
        f"constant_resonant_q{q}")
    _validate_solution(sol)
    return pot, sol


def non_attainment_witness(n: int, L: float) -> float:
    """|u'(0)| of the would-be extremal profile: the strictly positive slope
    obstruction (n pi / L) cot(n pi / (2(n+1))) proving the optimal L^1
    constant is approached but never attained."""
    if n < 1:
        raise DomainError("level must be >= 1")
    if not (L > 0.0 and math.isfinite(L)):
        raise DomainError("domain length must be positive and finite")
    w = n * math.pi / L
    return w * constants.cot(n * math.pi / (2.0 * (n + 1)))


def l1_counterexample(part: certify.Partition, eps: float) -> Potential:
    """A potential certified by the per-interval L^1 criterion whose global
    excess strictly exceeds the optimal constant.

    Each partition interval carries a rectangular bump of mass
    (n pi / L) cot(n pi gap_i / L) - eps abutting the interval endpoint where
    the comparison solution vanishes (right end on even intervals, left end
    on odd ones); bump width is min(gap_i/10, L/100).
    """
    n = part.n
    pts = part.points
    if pts[0] != 0.0:
        raise DomainError("partition must start at 0")
    L = float(pts[-1])
    gaps = part.gaps
    cap = L / (2.0 * n)
    if not np.all(gaps < cap):
        raise DomainError(f"every gap must be below L/(2n) = {cap!r}")
    if float(np.max(gaps) - np.min(gaps)) <= 1e-12 * L:
        raise DomainError("gaps must not all be equal")
    lam = constants.lambda_n(n, L)
    bounds = [(n * math.pi / L) * constants.cot(n * math.pi * float(g) / L)
              for g in gaps]
    if not (0.0 < eps < min(bounds)):
        raise DomainError(
            f"eps must lie in (0, {min(bounds)!r}), below every interval bound")

    edges = [0.0]
    vals = []
    for i in range(gaps.size):
        lo, hi = float(pts[i]), float(pts[i + 1])
        w = min(float(gaps[i]) / 10.0, 0.01 * L)
        height = (bounds[i] - eps) / w
        if i % 2 == 0:  # comparison solution vanishes at the right endpoint
            edges.extend([hi - w, hi])
            vals.extend([lam, lam + height])
        else:           # and at the left endpoint on odd intervals
            edges.extend([lo + w, hi])
            vals.extend([lam + height, lam])
    pot = Potential.piecewise_constant(np.asarray(edges), np.asarray(vals))

    if not pot.dominates(lam).holds:
        raise ConstructionError("counterexample fails to dominate lambda_n")
    cert = certify.check_l1_partition(pot, part)
    if cert.verdict != certify.UNIQUE_TRIVIAL:
        raise ConstructionError("counterexample fails its per-interval certificate")
    excess = pot.l1_excess(lam)
    beta = constants.beta1(n, L)
    if not excess > beta:
        raise ConstructionError(
            f"global excess {excess!r} does not exceed the optimal constant {beta!r}")
    return pot
