"""Nonresonance certificates for the Neumann problem.

Each criterion checks sufficient conditions for the trivial solution to be
unique and emits a Certificate whose margins say by how much every
tolerance-adjusted condition clears.  Verdicts are conservative: a condition
holding by less than its tolerance margin yields Inconclusive, never
UniqueTrivial.  Resonance itself is only ever claimed by the shooting front
door, with the witness trajectory attached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import constants, ode
from .errors import DomainError, PreconditionError
from .potential import (
    TAU_AE,
    TAU_STRICT,
    Interval,
    Potential,
    pointwise_le,
    tau_mass,
)

UNIQUE_TRIVIAL = "UniqueTrivial"
RESONANT_WITNESS = "ResonantWitness"
INCONCLUSIVE = "Inconclusive"

METHOD_CLASSICAL = "ClassicalFirst"
METHOD_DOLPH = "Dolph"
METHOD_L1_GLOBAL = "L1Global"
METHOD_LINF_PARTITION = "LinfPartition"
METHOD_L1_PARTITION = "L1Partition"
METHOD_GREEDY = "GreedyPartition"
METHOD_SHOOTING = "Shooting"

# relative margin below a strict bound required before certifying
TAU_MARGIN_REL = 1e-9


@dataclass(frozen=True)
class Partition:
    """A certification partition 0 = y_0 < ... < y_{2n+2} = L for level n."""

    n: int
    points: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("partition level must be >= 1")
        pts = np.asarray(self.points, dtype=float)
        if pts.size != 2 * self.n + 3:
            raise DomainError(
                f"partition for level {self.n} needs {2 * self.n + 3} points, got {pts.size}")
        if not np.all(np.isfinite(pts)) or np.any(np.diff(pts) <= 0.0):
            raise DomainError("partition points must be finite and strictly increasing")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @staticmethod
    def equal(n: int, L: float) -> "Partition":
        return Partition(n, np.linspace(0.0, L, 2 * n + 3))

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.points)

    def intervals(self) -> list[Interval]:
        return [Interval(float(self.points[i]), float(self.points[i + 1]))
                for i in range(self.points.size - 1)]

    def validate_domain(self, L: float) -> None:
        if self.points[0] != 0.0 or self.points[-1] != L:
            raise DomainError("partition must start at 0 and end at L")


@dataclass(frozen=True)
class Certificate:
    verdict: str
    method: str
    n: int
    partition: Optional[list[float]]
    margins: dict[str, float]
    tolerances: dict[str, float]
    assumptions: list[str] = field(default_factory=list)
    witness: Optional[ode.Trajectory] = None

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "method": self.method,
            "n": self.n,
            "partition": self.partition,
            "margins": {k: float(v) for k, v in self.margins.items()},
            "tolerances": {k: float(v) for k, v in self.tolerances.items()},
            "assumptions": list(self.assumptions),
        }


def _verdict(margins: dict[str, float]) -> str:
    return UNIQUE_TRIVIAL if all(v > 0.0 for v in margins.values()) else INCONCLUSIVE


def _base_tolerances(L: float) -> dict[str, float]:
    return {"tau_ae": TAU_AE, "tau_strict": TAU_STRICT, "tau_mass": tau_mass(L)}


def _dominance_margins(report, prefix: str, L: float) -> dict[str, float]:
    return {
        f"{prefix}_ae_gap": report.ess_inf_gap + TAU_AE,
        f"{prefix}_strict_mass": report.strict_mass - tau_mass(L),
    }


def check_classical_first(a: Potential) -> Certificate:
    """Certify via: a not identically zero, nonnegative mean, and the
    positive part staying below pi^2 / L^2 in the dominance sense."""
    L = a.L
    level = (math.pi / L) ** 2
    sup = a.sup_norm()
    upper = a.clip_min(0.0).dominated_by(level)
    margins = {
        "nonzero_sup": sup,
        "mean_mass": a.integral() + TAU_AE * (1.0 + sup) * L,
        **_dominance_margins(upper, "upper", L),
    }
    return Certificate(
        verdict=_verdict(margins),
        method=METHOD_CLASSICAL,
        n=0,
        partition=None,
        margins=margins,
        tolerances=_base_tolerances(L),
    )


def check_dolph(a: Potential, n: int) -> Certificate:
    """Certify via strict spectral-gap pinching lambda_n < a < lambda_{n+1}."""
    if n < 0:
        raise DomainError("level must be >= 0")
    L = a.L
    lower = a.dominates(constants.lambda_n(n, L))
    upper = a.dominated_by(constants.lambda_n(n + 1, L))
    margins = {
        **_dominance_margins(lower, "lower", L),
        **_dominance_margins(upper, "upper", L),
    }
    return Certificate(
        verdict=_verdict(margins),
        method=METHOD_DOLPH,
        n=n,
        partition=None,
        margins=margins,
        tolerances=_base_tolerances(L),
    )


def check_l1_global(a: Potential, n: int) -> Certificate:
    """Certify via the global L^1 bound: excess over lambda_n below the
    optimal constant beta1(n, L)."""
    if n < 1:
        raise DomainError("level must be >= 1")
    L = a.L
    lam = constants.lambda_n(n, L)
    bound = constants.beta1(n, L)
    excess = a.l1_excess(lam)
    margins = {
        **_dominance_margins(a.dominates(lam), "lower", L),
        "excess_slack": bound - TAU_MARGIN_REL * bound - excess,
    }
    tol = _base_tolerances(L)
    tol["tau_margin"] = TAU_MARGIN_REL * bound
    return Certificate(
        verdict=_verdict(margins),
        method=METHOD_L1_GLOBAL,
        n=n,
        partition=None,
        margins=margins,
        tolerances=tol,
    )


def check_linf_partition(a: Potential, part: Partition) -> Certificate:
    """Certify via per-interval quarter-period L^inf bounds on a partition,
    plus the proviso that a is not the exact critical constant everywhere."""
    part.validate_domain(a.L)
    n = part.n
    L = a.L
    margins = _dominance_margins(a.dominates(constants.lambda_n(n, L)), "lower", L)
    quarter = 0.25 * math.pi ** 2
    deviations = []
    for i, I in enumerate(part.intervals()):
        w = I.width
        margins[f"sup_slack_{i:03d}"] = quarter + TAU_AE - w * w * a.sup_norm(I)
        critical = quarter / (w * w)
        deviations.append(a.deviation_mass(critical, I) - 1e-9 * w)
    margins["max_deviation_mass"] = float(max(deviations))
    return Certificate(
        verdict=_verdict(margins),
        method=METHOD_LINF_PARTITION,
        n=n,
        partition=[float(p) for p in part.points],
        margins=margins,
        tolerances=_base_tolerances(L),
    )


def _cot_bound(n: int, L: float, gap: float) -> float:
    """Per-interval cotangent bound (n pi / L) cot(n pi gap / L) for gap < L/(2n)."""
    arg = n * math.pi * gap / L
    if arg >= 0.5 * math.pi:
        return math.nan
    return (n * math.pi / L) * constants.cot(arg)


def check_l1_partition(a: Potential, part: Partition) -> Certificate:
    """Certify via per-interval L^1 cotangent bounds on a partition."""
    part.validate_domain(a.L)
    n = part.n
    L = a.L
    lam = constants.lambda_n(n, L)
    margins = _dominance_margins(a.dominates(lam), "lower", L)
    gap_cap = L / (2.0 * n)
    for i, I in enumerate(part.intervals()):
        w = I.width
        margins[f"gap_slack_{i:03d}"] = gap_cap - TAU_AE - w
        bound = _cot_bound(n, L, w)
        if math.isnan(bound):
            margins[f"excess_slack_{i:03d}"] = -1.0
        else:
            margins[f"excess_slack_{i:03d}"] = (
                bound - TAU_MARGIN_REL * bound - a.l1_excess(lam, I))
    return Certificate(
        verdict=_verdict(margins),
        method=METHOD_L1_PARTITION,
        n=n,
        partition=[float(p) for p in part.points],
        margins=margins,
        tolerances=_base_tolerances(L),
    )


def greedy_partition(a: Potential, n: int, eps: float | None = None) -> Optional[Partition]:
    """Search a certifying partition by balancing each interval's excess ratio.

    Each knot is placed where the interval's excess-to-cotangent ratio reaches
    n pi / L - eps (the ratio is monotone in the right endpoint); windows with
    no excess mass close just under L/(2n).  The candidate is accepted only if
    check_l1_partition certifies it; on terminal failure one retry runs with a
    coarser eps.
    """
    if n < 1:
        raise DomainError("level must be >= 1")
    L = a.L
    rate = n * math.pi / L
    eps_list = [eps] if eps is not None else [1e-6 * rate, 1e-3 * rate]
    for e in eps_list:
        if not (0.0 < e < rate):
            raise DomainError("eps must lie in (0, n pi / L)")
        part = _greedy_attempt(a, n, e)
        if part is not None:
            return part
    return None


def _greedy_attempt(a: Potential, n: int, eps: float) -> Optional[Partition]:
    L = a.L
    lam = constants.lambda_n(n, L)
    target = n * math.pi / L - eps
    wmax = (L / (2.0 * n)) * (1.0 - 1e-6)
    xtol = 1e-12 * L

    def excess_to(s: float, y: float) -> float:
        hi = min(y, L)
        return a.l1_excess(lam, (s, hi)) if hi > s else 0.0

    ys = [0.0]
    for _ in range(2 * n + 1):
        s = ys[-1]

        def g(y: float) -> float:
            # the argument stays in (0, pi/2): cos/sin is stable there, and
            # near 0+ the cotangent is huge positive, keeping g negative
            arg = n * math.pi * (y - s) / L
            return excess_to(s, y) - target * (math.cos(arg) / math.sin(arg))

        y_hi = s + wmax
        if g(y_hi) >= 0.0:
            root = brentq(g, s + 1e-12 * wmax, y_hi, xtol=xtol)
        else:
            root = y_hi
        ys.append(float(root))

    if ys[-1] >= L:
        mu = min(1e-6 * L, 0.5 * (L - ys[-2]))
        for _ in range(10):
            candidate = ys[:-1] + [L - mu, L]
            if candidate[-2] > ys[-2]:
                part = Partition(n, np.asarray(candidate))
                if check_l1_partition(a, part).verdict == UNIQUE_TRIVIAL:
                    return part
            mu *= 0.1
        return None
    part = Partition(n, np.asarray(ys + [L]))
    if check_l1_partition(a, part).verdict == UNIQUE_TRIVIAL:
        return part
    return None


def check_nonlinear(alpha: Potential, beta: Potential, n: int, mode: str,
                    partition: Optional[Partition] = None,
                    eps: float | None = None) -> Certificate:
    """Certify uniqueness for slope-bounded nonlinearities.

    The slope envelope alpha <= f(x, u)/u <= beta is a hypothesis, never
    evaluated: alpha must dominate lambda_n and beta must pass the selected
    partition-type criterion.
    """
    if alpha.L != beta.L:
        raise PreconditionError("slope envelopes live on different domains")
    if not pointwise_le(alpha, beta):
        raise PreconditionError("lower envelope exceeds upper envelope")
    L = alpha.L
    lower = alpha.dominates(constants.lambda_n(n, L))
    margins = _dominance_margins(lower, "alpha_lower", L)

    if mode == "linf_partition":
        if partition is None:
            raise PreconditionError("linf_partition mode needs a partition")
        inner = check_linf_partition(beta, partition)
    elif mode == "l1_partition":
        if partition is None:
            raise PreconditionError("l1_partition mode needs a partition")
        inner = check_l1_partition(beta, partition)
    elif mode == "greedy":
        found = greedy_partition(beta, n, eps)
        if found is None:
            inner = Certificate(INCONCLUSIVE, METHOD_GREEDY, n, None,
                                {"greedy_found": -1.0}, _base_tolerances(L))
        else:
            inner = check_l1_partition(beta, found)
    else:
        raise DomainError(f"unknown nonlinear mode {mode!r}")

    for k, v in inner.margins.items():
        margins[f"beta_{k}"] = v
    method = {"linf_partition": METHOD_LINF_PARTITION,
              "l1_partition": METHOD_L1_PARTITION,
              "greedy": METHOD_GREEDY}[mode]
    return Certificate(
        verdict=_verdict(margins),
        method=method,
        n=n,
        partition=inner.partition,
        margins=margins,
        tolerances=_base_tolerances(L),
        assumptions=[
            "slope envelope: alpha(x) <= f(x, u)/u <= beta(x) for all u != 0",
            "f is measurable in x and continuous in u",
        ],
    )


@dataclass(frozen=True)
class ZeroDistributionReport:
    """Zero-structure diagnostics of a resonant potential at level n."""

    n: int
    profile: ode.ZeroProfile
    gaps: np.ndarray
    j_values: np.ndarray
    excesses: np.ndarray
    max_gap_slack: float   # L/(2n) + 1e-9 - max gap        (>= 0 required)
    strict_gap_slack: float  # L/(2n) - 1e-9 - min gap      (> 0 required)
    min_j_slack: float     # min over intervals of excess - J

    @property
    def ok(self) -> bool:
        return (self.max_gap_slack >= 0.0 and self.strict_gap_slack > 0.0
                and self.profile.m >= self.n + 1 and self.min_j_slack >= -1e-8)


def verify_zero_distribution(a: Potential, n: int,
                             tol: float = ode.RESIDUAL_TOL) -> ZeroDistributionReport:
    """Check the interlacing, gap, and interval-energy structure of a witness.

    Requires a to dominate lambda_n and the Neumann shot to be resonant.  The
    interval energies J_i = (int u'^2 - lambda_n int u^2) / u^2(x_end) use the
    trajectory's cumulative integrals; x_end is the interval's derivative-zero
    endpoint.
    """
    if n < 1:
        raise DomainError("level must be >= 1")
    L = a.L
    lam = constants.lambda_n(n, L)
    if not a.dominates(lam).holds:
        raise PreconditionError("potential does not dominate lambda_n")
    traj = ode.find_nontrivial_neumann(a, tol)
    if traj is None:
        raise PreconditionError("potential is not resonant within tol")
    prof = ode.zero_profile(traj, require_neumann=True, tol=tol)
    merged = np.sort(np.concatenate([prof.dprime_zeros, prof.zeros]))
    gaps = np.diff(merged)

    j_values = []
    excesses = []
    for i in range(merged.size - 1):
        xi, xj = float(merged[i]), float(merged[i + 1])
        dP = float(traj.eval_P(xj) - traj.eval_P(xi))
        dQ = float(traj.eval_Q(xj) - traj.eval_Q(xi))
        # denominator: the derivative-zero endpoint (right for odd i, left for even)
        x_den = xj if i % 2 == 1 else xi
        uden = float(traj.eval_u(x_den))
        j_values.append((dQ - lam * dP) / (uden * uden))
        excesses.append(a.l1_excess(lam, (xi, xj)))
    j_values = np.asarray(j_values)
    excesses = np.asarray(excesses)

    cap = L / (2.0 * n)
    return ZeroDistributionReport(
        n=n,
        profile=prof,
        gaps=gaps,
        j_values=j_values,
        excesses=excesses,
        max_gap_slack=cap + 1e-9 - float(np.max(gaps)),
        strict_gap_slack=cap - 1e-9 - float(np.min(gaps)),
        min_j_slack=float(np.min(excesses - j_values)),
    )


def certify_auto(a: Potential, n: int, tol: float = ode.RESIDUAL_TOL) -> Certificate:
    """Front-door flow: shoot for a resonance witness first, then try the
    criteria in order classical, spectral-gap, global L^1, greedy partition."""
    if n < 1:
        raise DomainError("level must be >= 1")
    L = a.L
    traj = ode.find_nontrivial_neumann(a, tol)
    if traj is not None:
        tolerances = _base_tolerances(L)
        tolerances["residual_tol"] = tol
        return Certificate(
            verdict=RESONANT_WITNESS,
            method=METHOD_SHOOTING,
            n=n,
            partition=None,
            margins={"neumann_residual": abs(traj.end_residual)},
            tolerances=tolerances,
            assumptions=["attempted: shooting"],
            witness=traj,
        )

    attempted = ["shooting"]
    cert = None
    for name, run in (
        ("classical_first", lambda: check_classical_first(a)),
        ("dolph", lambda: check_dolph(a, n)),
        ("l1_global", lambda: check_l1_global(a, n)),
        ("greedy_partition", lambda: _greedy_certificate(a, n)),
    ):
        attempted.append(name)
        cert = run()
        if cert.verdict == UNIQUE_TRIVIAL:
            break
    note = "attempted: " + ", ".join(attempted)
    return Certificate(
        verdict=cert.verdict,
        method=cert.method,
        n=cert.n,
        partition=cert.partition,
        margins=cert.margins,
        tolerances=cert.tolerances,
        assumptions=list(cert.assumptions) + [note],
        witness=None,
    )


def _greedy_certificate(a: Potential, n: int) -> Certificate:
    part = greedy_partition(a, n)
    if part is None:
        return Certificate(INCONCLUSIVE, METHOD_GREEDY, n, None,
                           {"greedy_found": -1.0}, _base_tolerances(a.L))
    cert = check_l1_partition(a, part)
    return Certificate(cert.verdict, METHOD_GREEDY, n, cert.partition,
                       cert.margins, cert.tolerances, cert.assumptions)
