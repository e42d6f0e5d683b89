"""Configurable-precision numerical kernels.

Everything here runs on top of mpmath's ``mp`` context.  A
:class:`PrecisionContext` fixes the number of decimal digits; every public
function enters ``mp.workdps`` itself, so callers never touch the global
precision directly.

Kernels: Gamma on the positive axis (shifted Stirling series), the complete
elliptic integral K (AGM), Gauss-Legendre rules, and absolute-value line
integrals ``∫|f(t)||dt|`` along piecewise contours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

from mpmath import mp, mpc, mpf

__all__ = [
    "Adaptive",
    "ArcSegment",
    "ContourSpec",
    "DomainError",
    "FixedGauss",
    "LineSegment",
    "PrecisionContext",
    "PrecisionError",
    "QuadratureError",
    "RaySegment",
    "checked",
    "elliptic_K",
    "gamma",
    "gauss_legendre_nodes",
    "integrate_contour",
]


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class PrecisionError(ArithmeticError):
    """Requested accuracy could not be reached within the escalation cap."""


class QuadratureError(ArithmeticError):
    """Quadrature did not converge within its subdivision budget."""

    def __init__(self, message: str, estimates: tuple = ()):
        super().__init__(message)
        self.estimates = estimates


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable precision settings shared by all kernels."""

    digits: int = 80
    truncation_tail_tol: mpf | None = None

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 30:
            raise ValueError(f"digits must be an integer >= 30, got {self.digits!r}")

    @property
    def tail_tol(self) -> mpf:
        if self.truncation_tail_tol is not None:
            return mpf(self.truncation_tail_tol)
        return mpf(10) ** (-self.digits - 10)

    @property
    def eps(self) -> mpf:
        return mpf(10) ** (-self.digits)

    def workdps(self, extra: int = 0):
        return mp.workdps(self.digits + extra)

    def with_digits(self, digits: int) -> "PrecisionContext":
        return PrecisionContext(digits, self.truncation_tail_tol)


ComplexValue = mpc


def checked(value):
    """Return ``value`` unchanged, raising if it is not finite."""
    if isinstance(value, mpc):
        parts = (value.real, value.imag)
    else:
        parts = (mpf(value),)
    for p in parts:
        if mp.isnan(p) or mp.isinf(p):
            raise ArithmeticError(f"non-finite value encountered: {value}")
    return value


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------


def _stirling_plan(target: int) -> tuple[int, int]:
    """Pick (number of Stirling terms J, minimal argument y) for ``target`` digits.

    The Stirling remainder for real y > 0 is bounded by the first omitted term,
    so y is chosen with |C_{2J+1}| / y^{2J+1} < 10^-target.
    """
    from .seqcoeff import stirling_constants

    J = min(100, max(20, -(-target // 5)))
    table = stirling_constants(2 * J + 1)
    c_next = abs(table.C[2 * J + 1])
    log10_c = (math.log10(c_next.numerator) - math.log10(c_next.denominator))
    y_min = 10 ** ((log10_c + target) / (2 * J + 1))
    return J, int(math.ceil(y_min)) + 1


@lru_cache(maxsize=4096)
def _gamma_cached(x: mpf, digits: int) -> mpf:
    from .seqcoeff import stirling_constants

    J, y_min = _stirling_plan(digits + 5)
    table = stirling_constants(2 * J + 1)
    guard = 10 + len(str(y_min))
    with mp.workdps(digits + guard):
        shift = max(0, int(math.ceil(y_min - float(x))))
        y = x + shift
        lg = (y - mpf(1) / 2) * mp.log(y) - y + mp.log(2 * mp.pi) / 2
        inv_y = 1 / y
        inv_y2 = inv_y * inv_y
        power = inv_y
        for j in range(J):
            c = table.C[2 * j + 1]
            lg += mpf(c.numerator) / c.denominator * power
            power *= inv_y2
        prod = mpf(1)
        for i in range(shift):
            prod *= x + i
        result = mp.exp(lg) / prod
    return +result


def gamma(x, ctx: PrecisionContext) -> mpf:
    """Γ(x) for real x > 0, relative error below 10^(2 - digits)."""
    with ctx.workdps(10):
        x = mpf(x)
    if not x > 0:
        raise DomainError(f"gamma is only defined here for x > 0, got {x}")
    with ctx.workdps():
        return +_gamma_cached(x, ctx.digits)


# ---------------------------------------------------------------------------
# Complete elliptic integral of the first kind
# ---------------------------------------------------------------------------


def elliptic_K(k, ctx: PrecisionContext) -> mpf:
    """K(k) for 0 <= k < 1 via the arithmetic-geometric mean."""
    with ctx.workdps(10):
        k = mpf(k)
        if k < 0 or k >= 1:
            raise DomainError(f"elliptic_K requires 0 <= k < 1, got {k}")
        a, b = mpf(1), mp.sqrt(1 - k * k)
        tol = mpf(10) ** (-ctx.digits - 5)
        while abs(a - b) > tol * a:
            a, b = (a + b) / 2, mp.sqrt(a * b)
        result = mp.pi / (a + b)
    with ctx.workdps():
        return +result


# ---------------------------------------------------------------------------
# Gauss-Legendre rules
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _gl_cached(n: int, digits: int) -> tuple[tuple[mpf, mpf], ...]:
    with mp.workdps(digits + 15):
        tol = mpf(10) ** (-digits - 8)
        half = []
        for i in range(1, n // 2 + 1):
            x = mp.cos(mp.pi * (i - mpf(1) / 4) / (n + mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < tol:
                    break
            p0, p1 = mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            half.append((x, w))
        nodes = [(-x, w) for x, w in half]
        if n % 2:
            p0, p1 = mpf(1), mpf(0)
            for k in range(2, n + 1):
                p0, p1 = p1, (-(k - 1) * p0) / k
            # derivative of P_n at 0 is n * P_{n-1}(0)
            dp = n * p0
            nodes.append((mpf(0), 2 / (dp * dp)))
        nodes.extend(reversed(half))
    with mp.workdps(digits):
        return tuple((+x, +w) for x, w in nodes)


def gauss_legendre_nodes(n: int, ctx: PrecisionContext) -> list[tuple[mpf, mpf]]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], ascending."""
    if not 1 <= n <= 200:
        raise DomainError(f"gauss_legendre_nodes supports 1 <= n <= 200, got {n}")
    return list(_gl_cached(n, ctx.digits))


# ---------------------------------------------------------------------------
# Contours
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineSegment:
    a: mpc
    b: mpc

    def point(self, s):
        return self.a + (self.b - self.a) * s

    def speed(self, s):
        return abs(self.b - self.a)

    @property
    def start(self):
        return mpc(self.a)

    @property
    def end(self):
        return mpc(self.b)


@dataclass(frozen=True)
class ArcSegment:
    center: mpc
    radius: mpf
    theta0: mpf
    theta1: mpf

    def point(self, s):
        theta = self.theta0 + (self.theta1 - self.theta0) * s
        return self.center + self.radius * mp.expj(theta)

    def speed(self, s):
        return abs(self.radius * (self.theta1 - self.theta0))

    @property
    def start(self):
        return self.point(0)

    @property
    def end(self):
        return self.point(1)


@dataclass(frozen=True)
class RaySegment:
    """Ray ``start + direction * r`` for r >= 0, parametrised as r = s/(1-s).

    The ray is truncated where the integrand has become negligible (see
    :func:`integrate_contour`).
    """

    start_point: mpc
    direction: mpc

    def point(self, s):
        return self.start_point + self.direction * (s / (1 - s))

    def speed(self, s):
        return abs(self.direction) / (1 - s) ** 2

    @property
    def start(self):
        return mpc(self.start_point)

    @property
    def end(self):
        return None


Segment = Union[LineSegment, ArcSegment, RaySegment]


@dataclass(frozen=True)
class ContourSpec:
    """Ordered chain of segments; a ray may only appear last."""

    segments: tuple = field(default_factory=tuple)

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for i, seg in enumerate(segs):
            if isinstance(seg, RaySegment) and i != len(segs) - 1:
                raise ValueError("a truncated ray may only be the final segment")
            if i:
                prev_end = segs[i - 1].end
                gap = abs(prev_end - seg.start)
                if gap > mpf(10) ** (-(mp.dps - 5)) * (1 + abs(seg.start)):
                    raise ValueError(f"segments {i - 1} and {i} do not share an endpoint")

    @property
    def start(self):
        return self.segments[0].start if self.segments else None

    @property
    def is_empty(self) -> bool:
        return not self.segments

    def concat(self, other: "ContourSpec") -> "ContourSpec":
        return ContourSpec(self.segments + other.segments)

    def sample(self, per_segment: int = 64) -> list[mpc]:
        """Points along the path in order, ``per_segment`` per segment.

        Ray samples are spread over r in [0, 10^6] geometrically.
        """
        pts = []
        for seg in self.segments:
            if isinstance(seg, RaySegment):
                rs = [mpf(0)] + [mpf(10) ** (-3 + 9 * mpf(i) / (per_segment - 2))
                                 for i in range(per_segment - 1)]
                pts.extend(seg.start_point + seg.direction * r for r in rs)
            else:
                pts.extend(seg.point(mpf(i) / (per_segment - 1)) for i in range(per_segment))
        return pts


# ---------------------------------------------------------------------------
# Absolute-value contour quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixedGauss:
    n: int = 30


@dataclass(frozen=True)
class Adaptive:
    tol: float = 1e-12
    budget: int = 4000
    local_nodes: int = 15


QuadMode = Union[FixedGauss, Adaptive]


def _as_vector(value) -> tuple[list, bool]:
    if isinstance(value, (list, tuple)):
        return list(value), True
    return [value], False


def _gauss_on(g, s0, s1, rule) -> list:
    half = (s1 - s0) / 2
    mid = (s1 + s0) / 2
    acc = None
    for x, w in rule:
        vals = g(mid + half * x)
        if acc is None:
            acc = [w * v for v in vals]
        else:
            for i, v in enumerate(vals):
                acc[i] += w * v
    return [half * a for a in acc]


def _ray_cutoff(f_abs, seg: RaySegment, rough: list, tail_tol) -> mpf:
    """Parameter s_max beyond which the ray contributes below ``tail_tol``."""
    scale = max(max(rough), mpf(10) ** (-mp.dps))
    r = mpf(2)
    for _ in range(64):
        vals = f_abs(seg.start_point + seg.direction * r)
        if max(vals) * r * abs(seg.direction) < tail_tol * scale:
            return r / (1 + r)
        r = r * r if r > 4 else 4 * r
    raise QuadratureError("integrand does not decay along the ray", tuple(rough))


def integrate_contour(f: Callable, path: ContourSpec, mode: QuadMode, ctx: PrecisionContext):
    """Compute ∫|f(t)||dt| along ``path``.

    ``f`` may return a single complex value or a sequence of them; in the
    latter case a list of integrals (one per component) is returned and the
    adaptive criterion applies to every component.
    """
    with ctx.workdps(5):
        if path.is_empty:
            probe = None
        else:
            probe = f(path.segments[0].point(mpf(1) / 3))
        _, is_vec = _as_vector(probe) if probe is not None else ([0], False)

        def f_abs(t):
            vals, _ = _as_vector(f(t))
            return [abs(v) for v in vals]

        if path.is_empty:
            return [mpf(0)] * len(_as_vector(probe)[0]) if is_vec else mpf(0)

        total = None
        for seg in path.segments:
            part = _integrate_segment(f_abs, seg, mode, ctx)
            total = part if total is None else [a + b for a, b in zip(total, part)]
    with ctx.workdps():
        total = [+t for t in total]
    return total if is_vec else total[0]


def _integrate_segment(f_abs, seg: Segment, mode: QuadMode, ctx: PrecisionContext) -> list:
    def g(s):
        return [v * seg.speed(s) for v in f_abs(seg.point(s))]

    s_hi = mpf(1)
    if isinstance(mode, FixedGauss):
        rule = gauss_legendre_nodes(mode.n, ctx)
        if isinstance(seg, RaySegment):
            rough = _gauss_on(g, mpf(0), mpf(1) / 2, rule)
            s_hi = _ray_cutoff(f_abs, seg, rough, ctx.tail_tol)
        return _gauss_on(g, mpf(0), s_hi, rule)

    rule = gauss_legendre_nodes(mode.local_nodes, ctx)
    if isinstance(seg, RaySegment):
        rough = _gauss_on(g, mpf(0), mpf(1) / 2, rule)
        s_hi = _ray_cutoff(f_abs, seg, rough, ctx.tail_tol)
    return _adaptive(g, mpf(0), s_hi, rule, mode, ctx)


def _adaptive(g, a, b, rule, mode: Adaptive, ctx: PrecisionContext) -> list:
    tol = mpf(mode.tol)
    whole = _gauss_on(g, a, b, rule)
    # a coarse composite estimate guards against a lucky first rule
    pieces = 8
    edges = [a + (b - a) * mpf(i) / pieces for i in range(pieces + 1)]
    parts = [_gauss_on(g, edges[i], edges[i + 1], rule) for i in range(pieces)]
    ref = [sum(p[c] for p in parts) for c in range(len(whole))]
    floor = max(abs(r) for r in ref) * mpf(10) ** (-(ctx.digits - 10))
    floor = max(floor, mpf(10) ** (-(ctx.digits + 20)))
    thresholds = [tol * abs(r) + floor for r in ref]

    stack = [(edges[i], edges[i + 1], parts[i], 0) for i in range(pieces)]
    result = [mpf(0)] * len(whole)
    evaluations = pieces
    last = (whole, ref)
    while stack:
        lo, hi, est, depth = stack.pop()
        mid = (lo + hi) / 2
        left = _gauss_on(g, lo, mid, rule)
        right = _gauss_on(g, mid, hi, rule)
        evaluations += 2
        refined = [l + r for l, r in zip(left, right)]
        # local share of the global tolerance shrinks with depth
        share = mpf(2) ** (-depth) / pieces
        if all(abs(e - r) <= t * share for e, r, t in zip(est, refined, thresholds)):
            result = [acc + r for acc, r in zip(result, refined)]
            continue
        if evaluations > mode.budget or depth > 60:
            partial = [acc + r for acc, r in zip(result, refined)]
            raise QuadratureError(
                f"adaptive quadrature exceeded budget ({evaluations} panels)",
                (last[1], partial),
            )
        stack.append((mid, hi, right, depth + 1))
        stack.append((lo, mid, left, depth + 1))
    return result
