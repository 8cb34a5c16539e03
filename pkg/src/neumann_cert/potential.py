"""Bounded potentials on [0, L] with exact piecewise representations.

Two representations are supported: piecewise-constant (cell value holds on
the half-open cell to the right of each breakpoint) and sampled with linear
interpolation between grid nodes.  Both admit exact integrals of |a - level|
and of one-sided clipped masses, which keeps every certificate margin free of
quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, RepresentationError

PIECEWISE_CONSTANT = "piecewise_constant"
SAMPLED = "sampled"

# almost-everywhere comparison slack
TAU_AE = 1e-12
# pointwise threshold defining the strict-inequality set
TAU_STRICT = 1e-9


def tau_mass(L: float) -> float:
    """Positive-measure threshold for strict dominance, scaled to the domain."""
    return 1e-9 * L


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError("interval endpoints must be finite")
        if not (self.hi > self.lo):
            raise DomainError("interval must have positive length")

    @property
    def width(self) -> float:
        return self.hi - self.lo


def _as_interval(I, L: float) -> Interval:
    if I is None:
        return Interval(0.0, L)
    if not isinstance(I, Interval):
        I = Interval(float(I[0]), float(I[1]))
    if I.lo < 0.0 or I.hi > L:
        raise DomainError(f"interval [{I.lo}, {I.hi}] outside domain [0, {L}]")
    return I


@dataclass(frozen=True)
class DominanceReport:
    """Outcome of an almost-everywhere one-sided comparison with a level.

    ess_inf_gap is the worst-case signed gap on the favourable side
    (min(a) - level for domination from above, level - max(a) for domination
    from below); strict_mass integrates the gap over the set where it clears
    tau_strict.  The relation holds when the gap survives the tau_ae slack
    and the strict mass clears the positive-measure threshold.
    """

    level: float
    ess_inf_gap: float
    strict_mass: float
    tau_ae: float
    tau_strict: float
    tau_mass: float

    @property
    def holds(self) -> bool:
        return self.ess_inf_gap >= -self.tau_ae and self.strict_mass > self.tau_mass


@dataclass(frozen=True)
class Potential:
    """A bounded potential a(x) on [0, L] in one of the two exact forms."""

    L: float
    kind: str
    xs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if not (math.isfinite(self.L) and self.L > 0.0):
            raise RepresentationError("domain length must be positive and finite")
        if xs.ndim != 1 or vals.ndim != 1:
            raise RepresentationError("breakpoints and values must be 1-d")
        if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(vals)):
            raise RepresentationError("breakpoints and values must be finite")
        if xs.size < 2 or np.any(np.diff(xs) <= 0.0):
            raise RepresentationError("breakpoints must be strictly increasing")
        if xs[0] != 0.0 or xs[-1] != self.L:
            raise RepresentationError("breakpoints must start at 0 and end at L")
        if self.kind == PIECEWISE_CONSTANT:
            if vals.size != xs.size - 1:
                raise RepresentationError("need one value per cell")
        elif self.kind == SAMPLED:
            if vals.size != xs.size:
                raise RepresentationError("need one value per grid node")
        else:
            raise RepresentationError(f"unknown representation kind {self.kind!r}")
        xs.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", vals)

    # ---------------------------------------------------------------- build

    @staticmethod
    def piecewise_constant(breakpoints: Sequence[float], values: Sequence[float],
                           L: float | None = None) -> "Potential":
        bp = np.asarray(breakpoints, dtype=float)
        if L is None:
            L = float(bp[-1]) if bp.size else 0.0
        return Potential(L=float(L), kind=PIECEWISE_CONSTANT, xs=bp,
                         values=np.asarray(values, dtype=float))

    @staticmethod
    def constant(value: float, L: float) -> "Potential":
        return Potential.piecewise_constant([0.0, L], [value], L)

    @staticmethod
    def sampled(grid: Sequence[float], values: Sequence[float],
                L: float | None = None) -> "Potential":
        g = np.asarray(grid, dtype=float)
        if L is None:
            L = float(g[-1]) if g.size else 0.0
        return Potential(L=float(L), kind=SAMPLED, xs=g,
                         values=np.asarray(values, dtype=float))

    # ------------------------------------------------------------- evaluate

    def values_at(self, x) -> np.ndarray:
        """Pointwise values; piecewise-constant cells are right-continuous."""
        x = np.asarray(x, dtype=float)
        if self.kind == PIECEWISE_CONSTANT:
            idx = np.searchsorted(self.xs, x, side="right") - 1
            idx = np.clip(idx, 0, self.values.size - 1)
            return self.values[idx]
        return np.interp(x, self.xs, self.values)

    def value_at(self, x: float) -> float:
        return float(self.values_at(np.asarray([x]))[0])

    def cells(self) -> Iterable[tuple[float, float, float, float]]:
        """Yield (lo, hi, alpha, beta) with a(x) = alpha + beta (x - lo) on [lo, hi]."""
        xs = self.xs
        if self.kind == PIECEWISE_CONSTANT:
            for j in range(self.values.size):
                yield float(xs[j]), float(xs[j + 1]), float(self.values[j]), 0.0
        else:
            v = self.values
            for j in range(xs.size - 1):
                w = float(xs[j + 1] - xs[j])
                yield float(xs[j]), float(xs[j + 1]), float(v[j]), (float(v[j + 1]) - float(v[j])) / w

    # ------------------------------------------------- clipped cell geometry

    def _clipped_cells(self, I: Interval):
        """Cell overlaps with I: (width, left value, right value) arrays.

        For the piecewise-constant form both value arrays coincide with the
        cell values; zero-width overlaps carry no mass and are kept as-is.
        """
        xs = self.xs
        left = np.clip(xs[:-1], I.lo, I.hi)
        right = np.clip(xs[1:], I.lo, I.hi)
        w = right - left
        if self.kind == PIECEWISE_CONSTANT:
            return w, self.values, self.values
        cw = xs[1:] - xs[:-1]
        slope = (self.values[1:] - self.values[:-1]) / cw
        p = self.values[:-1] + slope * (left - xs[:-1])
        q = self.values[:-1] + slope * (right - xs[:-1])
        return w, p, q

    # ----------------------------------------------------------- exact norms

    def integral(self, I=None) -> float:
        """Signed integral of a over I (default: the whole domain). Exact."""
        I = _as_interval(I, self.L)
        w, p, q = self._clipped_cells(I)
        return float(np.sum(0.5 * w * (p + q)))

    def cumulative(self, x) -> np.ndarray:
        """F(x) = integral of a over [0, x], vectorized.

        Exact for the piecewise-constant form (F is piecewise linear); for
        the sampled form F is exact at grid nodes and piecewise-linearly
        interpolated in between (error O(spacing^2) per node gap).
        """
        x = np.asarray(x, dtype=float)
        widths = np.diff(self.xs)
        if self.kind == PIECEWISE_CONSTANT:
            masses = widths * self.values
        else:
            masses = 0.5 * widths * (self.values[1:] + self.values[:-1])
        F = np.concatenate([[0.0], np.cumsum(masses)])
        return np.interp(x, self.xs, F)

    def l1_excess(self, level: float, I=None) -> float:
        """Integral of |a - level| over I.  Exact for both representations."""
        I = _as_interval(I, self.L)
        w, p, q = self._clipped_cells(I)
        p = p - level
        q = q - level
        same = p * q >= 0.0
        trap = 0.5 * w * np.abs(p + q)
        # sign change inside the cell: split at the root of the linear segment
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(same, 0.0, p / np.where(p == q, 1.0, p - q))
        split = 0.5 * (np.abs(p) * t + np.abs(q) * (1.0 - t)) * w
        return float(np.sum(np.where(same, trap, split)))

    def mass_above(self, level: float, I=None, tau: float = TAU_STRICT) -> float:
        """Integral of (a - level) over the subset of I where a > level + tau."""
        return self._one_sided_mass(level, I, tau, above=True)

    def mass_below(self, level: float, I=None, tau: float = TAU_STRICT) -> float:
        """Integral of (level - a) over the subset of I where a < level - tau."""
        return self._one_sided_mass(level, I, tau, above=False)

    def _one_sided_mass(self, level: float, I, tau: float, above: bool) -> float:
        I = _as_interval(I, self.L)
        w, p, q = self._clipped_cells(I)
        if above:
            p = p - level
            q = q - level
        else:
            p = level - p
            q = level - q
        # gap values p -> q vary linearly across each clipped cell; integrate
        # the gap over the sub-cell where it exceeds tau
        pin = p > tau
        qin = q > tau
        full = pin & qin
        none = ~pin & ~qin
        part = ~(full | none)
        total = float(np.sum(0.5 * w[full] * (p[full] + q[full])))
        if np.any(part):
            pw, pp, pq = w[part], p[part], q[part]
            t = (pp - tau) / (pp - pq)  # crossing fraction where gap == tau
            enters = pp > tau  # gap falls through tau going right
            sub_w = np.where(enters, t * pw, (1.0 - t) * pw)
            edge = np.where(enters, pp, pq)
            total += float(np.sum(0.5 * sub_w * (edge + tau)))
        return total

    def ess_sup(self, I=None) -> float:
        I = _as_interval(I, self.L)
        w, p, q = self._clipped_cells(I)
        mask = w > 0.0
        if not np.any(mask):
            raise DomainError("interval has no overlap of positive measure")
        return float(max(np.max(p[mask]), np.max(q[mask])))

    def ess_inf(self, I=None) -> float:
        I = _as_interval(I, self.L)
        w, p, q = self._clipped_cells(I)
        mask = w > 0.0
        if not np.any(mask):
            raise DomainError("interval has no overlap of positive measure")
        return float(min(np.min(p[mask]), np.min(q[mask])))

    def sup_norm(self, I=None) -> float:
        """Essential supremum of |a| over I."""
        I = _as_interval(I, self.L)
        w, p, q = self._clipped_cells(I)
        mask = w > 0.0
        if not np.any(mask):
            raise DomainError("interval has no overlap of positive measure")
        return float(max(np.max(np.abs(p[mask])), np.max(np.abs(q[mask]))))

    # ------------------------------------------------------------- dominance

    def dominates(self, level: float) -> DominanceReport:
        """Report on level < a in the a.e.-plus-positive-measure sense."""
        return DominanceReport(
            level=level,
            ess_inf_gap=self.ess_inf() - level,
            strict_mass=self.mass_above(level),
            tau_ae=TAU_AE,
            tau_strict=TAU_STRICT,
            tau_mass=tau_mass(self.L),
        )

    def dominated_by(self, level: float) -> DominanceReport:
        """Report on a < level in the a.e.-plus-positive-measure sense."""
        return DominanceReport(
            level=level,
            ess_inf_gap=level - self.ess_sup(),
            strict_mass=self.mass_below(level),
            tau_ae=TAU_AE,
            tau_strict=TAU_STRICT,
            tau_mass=tau_mass(self.L),
        )

    def deviation_mass(self, level: float, I=None) -> float:
        """Two-sided strict mass of a - level on I (non-constancy measure)."""
        return self.mass_above(level, I) + self.mass_below(level, I)

    # ----------------------------------------------------------- transforms

    def clip_min(self, floor: float) -> "Potential":
        """Pointwise max(a, floor), represented exactly."""
        if self.kind == PIECEWISE_CONSTANT:
            return Potential.piecewise_constant(self.xs, np.maximum(self.values, floor), self.L)
        g = self.xs
        v = self.values
        nodes = [float(g[0])]
        vals = [max(float(v[0]), floor)]
        for j in range(g.size - 1):
            p, q = float(v[j]) - floor, float(v[j + 1]) - floor
            if p * q < 0.0:
                root = float(g[j]) + (float(g[j + 1]) - float(g[j])) * p / (p - q)
                if nodes[-1] < root < float(g[j + 1]):
                    nodes.append(root)
                    vals.append(floor)
            nodes.append(float(g[j + 1]))
            vals.append(max(float(v[j + 1]), floor))
        return Potential.sampled(nodes, vals, self.L)

    def restrict(self, I) -> "Potential":
        """The restriction a|_I, shifted to start at 0."""
        I = _as_interval(I, self.L)
        xs = self.xs
        inner = xs[(xs > I.lo) & (xs < I.hi)]
        new_xs = np.concatenate(([I.lo], inner, [I.hi]))
        if self.kind == PIECEWISE_CONSTANT:
            idx = np.clip(np.searchsorted(xs, new_xs[:-1], side="right") - 1,
                          0, self.values.size - 1)
            return Potential.piecewise_constant(new_xs - I.lo, self.values[idx], I.width)
        vals = np.interp(new_xs, xs, self.values)
        return Potential.sampled(new_xs - I.lo, vals, I.width)

    def reflected(self) -> "Potential":
        """The mirror image a(L - x)."""
        xs = self.L - self.xs[::-1]
        xs = xs.copy()
        xs[0] = 0.0
        xs[-1] = self.L
        return Potential(L=self.L, kind=self.kind, xs=xs, values=self.values[::-1].copy())

    # ------------------------------------------------------------------ JSON

    def to_json_dict(self) -> dict:
        if self.kind == PIECEWISE_CONSTANT:
            return {
                "L": self.L,
                "kind": self.kind,
                "breakpoints": [float(x) for x in self.xs],
                "values": [float(v) for v in self.values],
            }
        return {
            "L": self.L,
            "kind": self.kind,
            "grid": [float(x) for x in self.xs],
            "values": [float(v) for v in self.values],
            "interpolation": "linear",
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "Potential":
        if not isinstance(obj, dict):
            raise RepresentationError("potential JSON must be an object")
        try:
            L = float(obj["L"])
            kind = obj["kind"]
        except (KeyError, TypeError, ValueError) as exc:
            raise RepresentationError(f"potential JSON missing L/kind: {exc}") from exc
        if kind == PIECEWISE_CONSTANT:
            if "breakpoints" not in obj:
                raise RepresentationError("piecewise_constant JSON needs breakpoints")
            return Potential.piecewise_constant(obj["breakpoints"], obj.get("values", []), L)
        if kind == SAMPLED:
            if "grid" not in obj:
                raise RepresentationError("sampled JSON needs grid")
            interp = obj.get("interpolation", "linear")
            if interp != "linear":
                raise RepresentationError(f"unsupported interpolation {interp!r}")
            return Potential.sampled(obj["grid"], obj.get("values", []), L)
        raise RepresentationError(f"unknown representation kind {kind!r}")


def pointwise_le(a: Potential, b: Potential, tol: float = 0.0) -> bool:
    """Whether a <= b + tol everywhere, decided exactly on merged cells."""
    if a.L != b.L:
        raise DomainError("potentials live on different domains")
    edges = np.union1d(a.xs, b.xs)
    la, ra = _cell_endpoint_values(a, edges)
    lb, rb = _cell_endpoint_values(b, edges)
    return bool(np.all(la <= lb + tol) and np.all(ra <= rb + tol))


def _cell_endpoint_values(a: Potential, edges: np.ndarray):
    """One-sided values of a at both ends of each merged cell [e_j, e_{j+1}]."""
    mids = 0.5 * (edges[:-1] + edges[1:])
    if a.kind == PIECEWISE_CONSTANT:
        v = a.values_at(mids)
        return v, v
    idx = np.clip(np.searchsorted(a.xs, mids, side="right") - 1, 0, a.xs.size - 2)
    x0 = a.xs[idx]
    w = a.xs[idx + 1] - x0
    slope = (a.values[idx + 1] - a.values[idx]) / w
    left = a.values[idx] + slope * (edges[:-1] - x0)
    right = a.values[idx] + slope * (edges[1:] - x0)
    return left, right
