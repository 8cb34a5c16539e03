"""Shooting engine for u'' + a(x) u = 0 with breakpoint-aligned restarts.

State per step is (u, u', theta, P, Q): theta is a continuous polar angle
with u = rho sin(theta), u' = rho cos(theta) (resynchronized from (u, u') at
every accepted step), and P, Q accumulate int u^2 and int u'^2 so interval
energies need no posterior quadrature.  The stepper is an embedded
Cash-Karp 5(4) pair; a step never straddles a representation breakpoint of
the potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, ExtractionError, IntegrationError, PreconditionError
from .potential import Interval, Potential, _as_interval

# boundary condition kinds
NEUMANN = "neumann"
MIXED_DN = "mixed_dn"  # u(lo) = 0, u'(hi) = 0
MIXED_ND = "mixed_nd"  # u'(lo) = 0, u(hi) = 0

# default local error control for trajectories
RTOL = 1e-10
ATOL = 1e-12
# tighter control used by residual-style operations
RTOL_RESIDUAL = 1e-12
ATOL_RESIDUAL = 1e-14
# scaled-residual threshold below which a shot counts as resonant
RESIDUAL_TOL = 1e-7

_HALF_PI = 0.5 * math.pi

# Cash-Karp 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0
_A51, _A52, _A53, _A54 = -11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0
_A61, _A62, _A63, _A64, _A65 = (
    1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0,
    44275.0 / 110592.0, 253.0 / 4096.0,
)
_B1, _B3, _B4, _B6 = 37.0 / 378.0, 250.0 / 621.0, 125.0 / 594.0, 512.0 / 1771.0
_D1 = 37.0 / 378.0 - 2825.0 / 27648.0
_D3 = 250.0 / 621.0 - 18575.0 / 48384.0
_D4 = 125.0 / 594.0 - 13525.0 / 55296.0
_D5 = -277.0 / 14336.0
_D6 = 512.0 / 1771.0 - 1.0 / 4.0


@dataclass(frozen=True)
class Trajectory:
    """Dense trajectory of one shot, with per-segment Hermite evaluation."""

    xs: np.ndarray
    u: np.ndarray
    du: np.ndarray
    theta: np.ndarray
    P: np.ndarray  # cumulative int u^2
    Q: np.ndarray  # cumulative int u'^2
    seg_a: np.ndarray      # a at each segment's left node
    seg_slope: np.ndarray  # slope of a on each segment
    a_scale: float

    @property
    def lo(self) -> float:
        return float(self.xs[0])

    @property
    def hi(self) -> float:
        return float(self.xs[-1])

    @property
    def amp_max(self) -> float:
        return float(np.max(np.sqrt(self.du ** 2 + self.a_scale * self.u ** 2)))

    @property
    def end_residual(self) -> float:
        return float(self.du[-1]) / self.amp_max

    @property
    def start_residual(self) -> float:
        return float(self.du[0]) / self.amp_max

    def _segments(self, x):
        x = np.asarray(x, dtype=float)
        k = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, self.xs.size - 2)
        h = self.xs[k + 1] - self.xs[k]
        s = (x - self.xs[k]) / h
        return k, h, s

    @staticmethod
    def _hermite(fk, fk1, dfk, dfk1, h, s):
        s2 = s * s
        s3 = s2 * s
        return ((2.0 * s3 - 3.0 * s2 + 1.0) * fk
                + (s3 - 2.0 * s2 + s) * h * dfk
                + (-2.0 * s3 + 3.0 * s2) * fk1
                + (s3 - s2) * h * dfk1)

    def _seg_coeff_ends(self, k, h):
        aL = self.seg_a[k]
        aR = self.seg_a[k] + self.seg_slope[k] * h
        return aL, aR

    def eval_u(self, x):
        k, h, s = self._segments(x)
        return self._hermite(self.u[k], self.u[k + 1], self.du[k], self.du[k + 1], h, s)

    def eval_du(self, x):
        k, h, s = self._segments(x)
        aL, aR = self._seg_coeff_ends(k, h)
        return self._hermite(self.du[k], self.du[k + 1],
                             -aL * self.u[k], -aR * self.u[k + 1], h, s)

    def eval_theta(self, x):
        k, h, s = self._segments(x)
        aL, aR = self._seg_coeff_ends(k, h)
        thk = self.theta[k]
        thk1 = self.theta[k + 1]
        dthk = np.cos(thk) ** 2 + aL * np.sin(thk) ** 2
        dthk1 = np.cos(thk1) ** 2 + aR * np.sin(thk1) ** 2
        return self._hermite(thk, thk1, dthk, dthk1, h, s)

    def eval_P(self, x):
        k, h, s = self._segments(x)
        return self._hermite(self.P[k], self.P[k + 1],
                             self.u[k] ** 2, self.u[k + 1] ** 2, h, s)

    def eval_Q(self, x):
        k, h, s = self._segments(x)
        return self._hermite(self.Q[k], self.Q[k + 1],
                             self.du[k] ** 2, self.du[k + 1] ** 2, h, s)

    def to_json_records(self) -> list[dict]:
        return [
            {"x": float(x), "u": float(u), "du": float(du), "theta": float(th)}
            for x, u, du, th in zip(self.xs, self.u, self.du, self.theta)
        ]


@dataclass(frozen=True)
class ZeroProfile:
    """Interlaced derivative zeros and zeros of one Neumann-type trajectory."""

    dprime_zeros: np.ndarray
    zeros: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.dprime_zeros, dtype=float)
        z = np.asarray(self.zeros, dtype=float)
        if z.size < 1 or d.size != z.size + 1:
            raise ExtractionError("profile needs m >= 1 zeros and m + 1 derivative zeros")
        if not (np.all(d[:-1] < z) and np.all(z < d[1:])):
            raise ExtractionError("zeros fail to interlace the derivative zeros")
        d.flags.writeable = False
        z.flags.writeable = False
        object.__setattr__(self, "dprime_zeros", d)
        object.__setattr__(self, "zeros", z)

    @property
    def m(self) -> int:
        return int(self.zeros.size)

    def gaps(self) -> np.ndarray:
        """Consecutive gaps of the full merged zero sequence."""
        merged = np.sort(np.concatenate([self.dprime_zeros, self.zeros]))
        return np.diff(merged)


def integrate(a: Potential, u0: float, du0: float, I=None,
              rtol: float = RTOL, atol: float = ATOL) -> Trajectory:
    """Shoot u'' + a u = 0 from (u0, u0') across I with local error control."""
    I = _as_interval(I, a.L)
    if u0 == 0.0 and du0 == 0.0:
        raise DomainError("initial data must be nontrivial")
    if not (rtol > 0.0 and atol > 0.0):
        raise DomainError("tolerances must be positive")

    sin = math.sin
    cos = math.cos
    sqrt = math.sqrt

    width = I.width
    h_floor = 1e-14 * max(width, 1.0)
    h_global_cap = width / 16.0

    u, du = float(u0), float(du0)
    th = math.atan2(u, du)
    P = 0.0
    Q = 0.0

    xs = [I.lo]
    us = [u]
    dus = [du]
    ths = [th]
    Ps = [P]
    Qs = [Q]
    seg_a: list[float] = []
    seg_slope: list[float] = []

    h = h_global_cap
    for clo, chi, alpha, beta in a.cells():
        lo = max(clo, I.lo)
        hi = min(chi, I.hi)
        if hi <= lo:
            continue
        # coefficient on this cell relative to its own left edge
        a_lo = alpha + beta * (lo - clo)
        a_sup = max(abs(a_lo), abs(alpha + beta * (hi - clo)))
        h_cap = min(h_global_cap, 0.5 / (1.0 + sqrt(a_sup)))
        x = lo
        h = min(h, h_cap, hi - lo)
        while x < hi:
            last = h >= (hi - x) * (1.0 - 1e-12)
            if last:
                h = hi - x
            ax = a_lo + beta * (x - lo)

            # Cash-Karp stages for (u, du, theta, P, Q)
            k1u = du
            k1d = -ax * u
            c1, s1 = cos(th), sin(th)
            k1t = c1 * c1 + ax * s1 * s1
            k1P = u * u
            k1Q = du * du

            a2 = a_lo + beta * (x + _A21 * h - lo)
            u2 = u + h * _A21 * k1u
            d2 = du + h * _A21 * k1d
            t2 = th + h * _A21 * k1t
            k2u = d2
            k2d = -a2 * u2
            c2, s2 = cos(t2), sin(t2)
            k2t = c2 * c2 + a2 * s2 * s2
            k2P = u2 * u2
            k2Q = d2 * d2

            a3 = a_lo + beta * (x + 0.3 * h - lo)
            u3 = u + h * (_A31 * k1u + _A32 * k2u)
            d3 = du + h * (_A31 * k1d + _A32 * k2d)
            t3 = th + h * (_A31 * k1t + _A32 * k2t)
            k3u = d3
            k3d = -a3 * u3
            c3, s3 = cos(t3), sin(t3)
            k3t = c3 * c3 + a3 * s3 * s3
            k3P = u3 * u3
            k3Q = d3 * d3

            a4 = a_lo + beta * (x + 0.6 * h - lo)
            u4 = u + h * (_A41 * k1u + _A42 * k2u + _A43 * k3u)
            d4 = du + h * (_A41 * k1d + _A42 * k2d + _A43 * k3d)
            t4 = th + h * (_A41 * k1t + _A42 * k2t + _A43 * k3t)
            k4u = d4
            k4d = -a4 * u4
            c4, s4 = cos(t4), sin(t4)
            k4t = c4 * c4 + a4 * s4 * s4
            k4P = u4 * u4
            k4Q = d4 * d4

            a5 = a_lo + beta * (x + h - lo)
            u5 = u + h * (_A51 * k1u + _A52 * k2u + _A53 * k3u + _A54 * k4u)
            d5 = du + h * (_A51 * k1d + _A52 * k2d + _A53 * k3d + _A54 * k4d)
            t5 = th + h * (_A51 * k1t + _A52 * k2t + _A53 * k3t + _A54 * k4t)
            k5u = d5
            k5d = -a5 * u5
            c5, s5 = cos(t5), sin(t5)
            k5t = c5 * c5 + a5 * s5 * s5
            k5P = u5 * u5
            k5Q = d5 * d5

            a6 = a_lo + beta * (x + 0.875 * h - lo)
            u6 = u + h * (_A61 * k1u + _A62 * k2u + _A63 * k3u + _A64 * k4u + _A65 * k5u)
            d6 = du + h * (_A61 * k1d + _A62 * k2d + _A63 * k3d + _A64 * k4d + _A65 * k5d)
            t6 = th + h * (_A61 * k1t + _A62 * k2t + _A63 * k3t + _A64 * k4t + _A65 * k5t)
            k6u = d6
            k6d = -a6 * u6
            c6, s6 = cos(t6), sin(t6)
            k6t = c6 * c6 + a6 * s6 * s6
            k6P = u6 * u6
            k6Q = d6 * d6

            nu = u + h * (_B1 * k1u + _B3 * k3u + _B4 * k4u + _B6 * k6u)
            nd = du + h * (_B1 * k1d + _B3 * k3d + _B4 * k4d + _B6 * k6d)
            nt = th + h * (_B1 * k1t + _B3 * k3t + _B4 * k4t + _B6 * k6t)
            nP = P + h * (_B1 * k1P + _B3 * k3P + _B4 * k4P + _B6 * k6P)
            nQ = Q + h * (_B1 * k1Q + _B3 * k3Q + _B4 * k4Q + _B6 * k6Q)

            eu = h * (_D1 * k1u + _D3 * k3u + _D4 * k4u + _D5 * k5u + _D6 * k6u)
            ed = h * (_D1 * k1d + _D3 * k3d + _D4 * k4d + _D5 * k5d + _D6 * k6d)
            et = h * (_D1 * k1t + _D3 * k3t + _D4 * k4t + _D5 * k5t + _D6 * k6t)
            eP = h * (_D1 * k1P + _D3 * k3P + _D4 * k4P + _D5 * k5P + _D6 * k6P)
            eQ = h * (_D1 * k1Q + _D3 * k3Q + _D4 * k4Q + _D5 * k5Q + _D6 * k6Q)

            r = 0.0
            for e, y0, y1 in ((eu, u, nu), (ed, du, nd), (et, th, nt),
                              (eP, P, nP), (eQ, Q, nQ)):
                sc = atol + rtol * max(abs(y0), abs(y1))
                q = e / sc
                r += q * q
            err = sqrt(r / 5.0)
            if not math.isfinite(err):
                raise IntegrationError(f"non-finite state near x = {x!r}")

            if err <= 1.0:
                x = hi if last else x + h
                u, du, th, P, Q = nu, nd, nt, nP, nQ
                # resynchronize the angle lift with the propagated (u, u')
                raw = math.atan2(u, du)
                delta = raw - th
                delta -= 2.0 * math.pi * round(delta / (2.0 * math.pi))
                th += delta
                xs.append(x)
                us.append(u)
                dus.append(du)
                ths.append(th)
                Ps.append(P)
                Qs.append(Q)
                seg_a.append(ax)
                seg_slope.append(beta)
                grow = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
                h = min(h * grow, h_cap)
            else:
                h = max(h * max(0.2, 0.9 * err ** -0.2), h_floor)
                if h <= h_floor:
                    raise IntegrationError(f"step size underflow near x = {x!r}")

    return Trajectory(
        xs=np.asarray(xs), u=np.asarray(us), du=np.asarray(dus),
        theta=np.asarray(ths), P=np.asarray(Ps), Q=np.asarray(Qs),
        seg_a=np.asarray(seg_a), seg_slope=np.asarray(seg_slope),
        a_scale=max(1.0, a.sup_norm(I)),
    )


def neumann_shot(a: Potential, rtol: float = RTOL_RESIDUAL,
                 atol: float = ATOL_RESIDUAL) -> Trajectory:
    """Shoot the Neumann initial data (u, u') = (1, 0) across the domain."""
    return integrate(a, 1.0, 0.0, rtol=rtol, atol=atol)


def neumann_residual(a: Potential, rtol: float = RTOL_RESIDUAL,
                     atol: float = ATOL_RESIDUAL) -> float:
    """Scaled terminal slope u'(L) / max_x sqrt(u'^2 + a_scale u^2)."""
    return neumann_shot(a, rtol=rtol, atol=atol).end_residual


def find_nontrivial_neumann(a: Potential, tol: float = RESIDUAL_TOL,
                            rtol: float = RTOL_RESIDUAL,
                            atol: float = ATOL_RESIDUAL) -> Optional[Trajectory]:
    """The Neumann shot when its scaled residual is below tol, else None."""
    t = neumann_shot(a, rtol=rtol, atol=atol)
    return t if abs(t.end_residual) <= tol else None


def disfocal_residual(a: Potential, I, kind: str,
                      rtol: float = RTOL_RESIDUAL,
                      atol: float = ATOL_RESIDUAL) -> float:
    """Scaled terminal defect of the mixed problem on I.

    mixed_dn shoots u(lo) = 0, u'(lo) = 1 and reports the scaled u'(hi);
    mixed_nd shoots u(lo) = 1, u'(lo) = 0 and reports the scaled u(hi)
    (weighted by sqrt(a_scale) so both kinds share one tolerance scale).
    """
    I = _as_interval(I, a.L)
    if kind == MIXED_DN:
        t = integrate(a, 0.0, 1.0, I=I, rtol=rtol, atol=atol)
        return float(t.du[-1]) / t.amp_max
    if kind == MIXED_ND:
        t = integrate(a, 1.0, 0.0, I=I, rtol=rtol, atol=atol)
        return math.sqrt(t.a_scale) * float(t.u[-1]) / t.amp_max
    raise DomainError(f"unknown mixed boundary kind {kind!r}")


def zero_profile(t: Trajectory, require_neumann: bool = True,
                 tol: float = RESIDUAL_TOL) -> ZeroProfile:
    """Extract the interlaced zeros of u' and u from the angle trajectory.

    Interior zeros are angle crossings of multiples of pi/2 (odd multiples:
    zeros of u'; even multiples: zeros of u), each refined by bracketed
    root-finding to 1e-12 * L.  The endpoints enter as derivative zeros; with
    require_neumann the scaled end slopes must first clear tol.
    """
    amp = t.amp_max
    if require_neumann:
        r0 = abs(float(t.du[0])) / amp
        r1 = abs(float(t.du[-1])) / amp
        if r0 > tol or r1 > tol:
            raise PreconditionError(
                f"trajectory is not Neumann within tol: end slopes {r0:.3e}, {r1:.3e}")

    L = t.hi - t.lo
    xtol = max(1e-12 * L, 5e-16 * max(abs(t.lo), abs(t.hi), 1.0))
    edge_guard = 1e-9 * L
    th = t.theta
    crossings: list[tuple[float, int]] = []  # (x, target index j)

    # node-exact hits at interior nodes
    for k in range(1, th.size - 1):
        j = round(th[k] / _HALF_PI)
        if abs(th[k] - j * _HALF_PI) <= 1e-12:
            crossings.append((float(t.xs[k]), int(j)))

    # strict sign changes within segments
    for k in range(th.size - 1):
        ta, tb = th[k], th[k + 1]
        jlo = math.floor(min(ta, tb) / _HALF_PI) + 1
        jhi = math.ceil(max(ta, tb) / _HALF_PI) - 1
        for j in range(jlo, jhi + 1):
            target = j * _HALF_PI
            fa = ta - target
            fb = tb - target
            if fa * fb < 0.0:
                root = brentq(lambda x: float(t.eval_theta(x)) - target,
                              float(t.xs[k]), float(t.xs[k + 1]), xtol=xtol)
                crossings.append((float(root), int(j)))

    crossings.sort()
    inner: list[tuple[float, int]] = []
    for x, j in crossings:
        if not (t.lo + edge_guard < x < t.hi - edge_guard):
            continue
        # a node-exact hit and its neighbouring bracket find the same crossing
        if inner and inner[-1][1] == j and abs(x - inner[-1][0]) <= 1e-7 * L:
            continue
        inner.append((x, j))

    dprime = [t.lo]
    zeros: list[float] = []
    want_zero = True  # after a derivative zero the next crossing is a zero of u
    for x, j in inner:
        is_zero = j % 2 == 0
        if is_zero != want_zero:
            raise ExtractionError(
                f"non-interlaced angle crossings near x = {x!r}")
        (zeros if is_zero else dprime).append(x)
        want_zero = not is_zero
    if want_zero:
        raise ExtractionError("trajectory ends without a zero before the endpoint")
    dprime.append(t.hi)
    if not zeros:
        raise ExtractionError("no interior zeros found")
    return ZeroProfile(dprime_zeros=np.asarray(dprime), zeros=np.asarray(zeros))
