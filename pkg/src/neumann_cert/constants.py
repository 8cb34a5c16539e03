"""Closed-form spectral constants and sharp integral bounds.

Everything here is exact scalar arithmetic: eigenvalues of the Neumann and
mixed problems, the optimal L^1 constants at higher eigenvalues, the
disfocality minimum on an interval, and the cotangent-sum minimum that ties
the per-interval bounds together.
"""

import math

from .errors import DomainError

# guard width around cotangent poles (multiples of pi)
COT_POLE_TOL = 1e-8


def cot(x: float) -> float:
    """Cotangent with a guarded pole: raises within 1e-8 of a multiple of pi."""
    r = math.fmod(x, math.pi)
    if r < 0.0:
        r += math.pi
    if r < COT_POLE_TOL or math.pi - r < COT_POLE_TOL:
        raise DomainError(f"cot argument {x!r} is within {COT_POLE_TOL} of a pole")
    return math.cos(x) / math.sin(x)


def lambda_n(n: int, L: float) -> float:
    """n-th Neumann eigenvalue n^2 pi^2 / L^2 (n = 0 gives 0)."""
    if n < 0:
        raise DomainError("eigenvalue index must be >= 0")
    if not (L > 0.0) or not math.isfinite(L):
        raise DomainError("interval length must be positive and finite")
    return (n * math.pi / L) ** 2


def mu_n(n: int, L: float) -> float:
    """n-th eigenvalue of u'' + mu u = 0 with u'(0) = u(L) = 0.

    Indexed so n = 1 gives pi^2 / (4 L^2); eigenfunctions cos((2n-1) pi x / (2L)).
    """
    if n < 1:
        raise DomainError("mixed-condition eigenvalue index must be >= 1")
    if not (L > 0.0) or not math.isfinite(L):
        raise DomainError("interval length must be positive and finite")
    return ((2 * n - 1) * math.pi / (2.0 * L)) ** 2


def beta1(n: float, L: float) -> float:
    """Optimal L^1 nonresonance constant at eigenvalue level n.

    beta1(n, L) = (2 pi n (n+1) / L) * cot(pi n / (2 (n+1))).  Defined for any
    real n > 0; tends to 4/L as n -> 0+.  The constant is an infimum that no
    potential attains.
    """
    if not (n > 0.0) or not math.isfinite(n):
        raise DomainError("level index must be positive and finite")
    if not (L > 0.0) or not math.isfinite(L):
        raise DomainError("interval length must be positive and finite")
    return (2.0 * math.pi * n * (n + 1.0) / L) * cot(math.pi * n / (2.0 * (n + 1.0)))


def beta_inf(n: int, L: float) -> float:
    """Optimal L^inf nonresonance constant at level n: the next eigenvalue."""
    if n < 0:
        raise DomainError("level index must be >= 0")
    return lambda_n(n + 1, L)


def j_min(M: float, lo: float, hi: float) -> float:
    """Minimum of (int u'^2 - M int u^2) / u(hi)^2 over u with u(lo) = 0.

    Equals sqrt(M) * cot(sqrt(M) (hi - lo)) for 0 < M <= pi^2 / (4 (hi-lo)^2),
    and exactly 0 at the quarter-period boundary.
    """
    if not (hi > lo):
        raise DomainError("interval must have positive length")
    width = hi - lo
    if not (M > 0.0):
        raise DomainError("level must be positive")
    s = math.sqrt(M) * width
    # boundary snap: at s = pi/2 the minimum is exactly zero
    if abs(s - 0.5 * math.pi) <= 4.0 * math.ulp(0.5 * math.pi):
        return 0.0
    if s > 0.5 * math.pi:
        raise DomainError(
            "level exceeds the quarter-period disfocality bound for the interval"
        )
    return math.sqrt(M) * cot(s)


def j_minimizer(M: float, lo: float, hi: float, x: float) -> float:
    """The minimizing profile sin(sqrt(M)(x - lo)) / sin(sqrt(M)(hi - lo))."""
    if not (hi > lo):
        raise DomainError("interval must have positive length")
    if not (M > 0.0) or math.sqrt(M) * (hi - lo) > 0.5 * math.pi * (1.0 + 1e-15):
        raise DomainError("level outside the quarter-period disfocality range")
    if x < lo or x > hi:
        raise DomainError("evaluation point outside the interval")
    w = math.sqrt(M)
    return math.sin(w * (x - lo)) / math.sin(w * (hi - lo))


def f_min(r: int, S: float) -> float:
    """Minimum of sum cot(z_i) over z in (0, pi/2]^r with sum z_i = S.

    Requires r pi > 2 S; the minimum r * cot(S / r) is attained only at the
    equal-component point z_i = S / r.
    """
    if r < 1:
        raise DomainError("component count must be >= 1")
    if not (S > 0.0):
        raise DomainError("component sum must be positive")
    if not (r * math.pi > 2.0 * S):
        raise DomainError("feasibility requires r * pi > 2 * S")
    return r * cot(S / r)


def yong_bound(A: float, k: int) -> float:
    """Corrected sharp bound A + 2(k+1) sqrt(A) cot(sqrt(A) / (2(k+1))).

    Upper bound on int_0^1 b for disfocality-type problems with k interior
    sign changes; requires sqrt(A) / (2(k+1)) < pi.
    """
    if not (A > 0.0):
        raise DomainError("leading level must be positive")
    if k < 0:
        raise DomainError("sign-change count must be >= 0")
    arg = math.sqrt(A) / (2.0 * (k + 1))
    if arg >= math.pi:
        raise DomainError("bound undefined: sqrt(A) / (2(k+1)) must be below pi")
    return A + 2.0 * (k + 1) * math.sqrt(A) * cot(arg)
