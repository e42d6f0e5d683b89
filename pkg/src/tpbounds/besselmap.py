"""The Bessel model: w'' = (ν²(1-z²)/z² - 1/(4z²)) w.

Solutions are z^{1/2} J_ν(νz), z^{1/2} H^{(1)}_ν(νz), z^{1/2} H^{(2)}_ν(νz).
The turning point is z0 = 1; reference points are z^{(0)} = 0 and
z^{(±1)} = ∓i∞.

Branch conventions (upper half plane; the lower half plane follows by
conjugation):

* w = √(1-z²) is principal, positive on (0, 1);
* f^{1/2} = -w/z, so that dξ/dz = f^{1/2} and ξ > 0 on (0, 1);
* arg ζ lies in (-π, 0], with arg ζ = -π on z > 1;
* ξ = (2/3) ζ^{3/2} with the principal power.

Coefficient functions are held exactly as P(z) z^{-m} (1-z²)^{-k/2}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from mpmath import mp, mpc, mpf

from .mpnum import ContourSpec, DomainError, LineSegment, PrecisionContext, RaySegment, gamma
from .seqcoeff import (
    FormalSeries,
    airy_seq_table,
    log_series,
    stirling_constants,
)

__all__ = [
    "AlgebraicFunction",
    "BesselModel",
    "ConnectionData",
    "MapPoint",
    "SectorLabel",
    "classify_sector",
    "connection_constants",
    "ehat_by_integration",
    "ehat_coefficients",
    "fhat_coefficients",
    "liouville_point",
    "modified_coefficients",
    "xi_zeta",
]


# ---------------------------------------------------------------------------
# Exact algebraic functions P(z) z^{-m} (1-z²)^{-k/2}
# ---------------------------------------------------------------------------


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _pmul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _padd(p, q):
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def _one_minus_z2_pow(e: int):
    out = [Fraction(1)]
    for _ in range(e):
        out = _pmul(out, [Fraction(1), Fraction(0), Fraction(-1)])
    return out


def _div_one_minus_z2(p):
    """(quotient, exact) for p / (1 - z²)."""
    p = list(p)
    if len(p) < 3:
        return None, False
    q = [Fraction(0)] * (len(p) - 2)
    # divide by z² - 1, negate at the end
    for i in range(len(p) - 1, 1, -1):
        c = p[i]
        q[i - 2] = c
        p[i - 2] += c
        p[i] = 0
    if p[0] != 0 or p[1] != 0:
        return None, False
    return [-c for c in q], True


class AlgebraicFunction:
    """P(z) · z^{-pow_z} · (1 - z²)^{-pow_surd/2} with rational P.

    Instances are kept in a canonical form (no factor z or 1 - z² left in P),
    so equality is structural.
    """

    __slots__ = ("poly", "pow_z", "pow_surd", "_num")

    def __init__(self, poly: Sequence = (), pow_z: int = 0, pow_surd: int = 0):
        p = _trim(Fraction(c) for c in poly)
        m, k = int(pow_z), int(pow_surd)
        if not p:
            m = 0
            k = k % 2
        else:
            while p[0] == 0:
                p = p[1:]
                m -= 1
            while True:
                q, ok = _div_one_minus_z2(p)
                if not ok:
                    break
                p, k = q, k - 2
        self.poly = tuple(p)
        self.pow_z = m
        self.pow_surd = k
        self._num = None

    @classmethod
    def constant(cls, c) -> "AlgebraicFunction":
        return cls((Fraction(c),))

    @classmethod
    def zero(cls, parity: int = 0) -> "AlgebraicFunction":
        return cls((), 0, parity)

    def is_zero(self) -> bool:
        return not self.poly

    def __repr__(self):
        return f"AlgebraicFunction({list(self.poly)!r}, pow_z={self.pow_z}, pow_surd={self.pow_surd})"

    def _coerce(self, other):
        if isinstance(other, AlgebraicFunction):
            return other
        if isinstance(other, (int, Fraction)):
            return AlgebraicFunction.constant(other)
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return (self.poly, self.pow_z, self.pow_surd) == (other.poly, other.pow_z, other.pow_surd)

    def __hash__(self):
        return hash((self.poly, self.pow_z, self.pow_surd))

    def lift(self, m: int, k: int) -> list:
        """Numerator polynomial when written over z^{-m} (1-z²)^{-k/2}."""
        if m < self.pow_z or k < self.pow_surd or (k - self.pow_surd) % 2:
            raise ValueError("cannot lift to a smaller or mismatched representation")
        p = [Fraction(0)] * (m - self.pow_z) + list(self.poly)
        return _pmul(p, _one_minus_z2_pow((k - self.pow_surd) // 2)) if p else []

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if (self.pow_surd - other.pow_surd) % 2:
            raise ValueError("cannot add terms with different parity of the square root power")
        m = max(self.pow_z, other.pow_z)
        k = max(self.pow_surd, other.pow_surd)
        return AlgebraicFunction(_padd(self.lift(m, k), other.lift(m, k)), m, k)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicFunction([-c for c in self.poly], self.pow_z, self.pow_surd)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraicFunction([c * other for c in self.poly], self.pow_z, self.pow_surd)
        if not isinstance(other, AlgebraicFunction):
            return NotImplemented
        return AlgebraicFunction(_pmul(list(self.poly), list(other.poly)),
                                 self.pow_z + other.pow_z, self.pow_surd + other.pow_surd)

    __rmul__ = __mul__

    def derivative(self) -> "AlgebraicFunction":
        # d/dz [P z^-m s^-k] = z^{-m-1} s^{-k-2} [P' z (1-z²) - m P (1-z²) + k z² P], s = √(1-z²)
        P = list(self.poly)
        if not P:
            return self
        m, k = self.pow_z, self.pow_surd
        dP = [i * P[i] for i in range(1, len(P))]
        one_m_z2 = [Fraction(1), Fraction(0), Fraction(-1)]
        term1 = _pmul(_pmul(dP, [Fraction(0), Fraction(1)]), one_m_z2) if dP else []
        term2 = [-m * c for c in _pmul(P, one_m_z2)]
        term3 = [Fraction(0), Fraction(0)] + [k * c for c in P]
        return AlgebraicFunction(_padd(_padd(term1, term2), term3), m + 1, k + 2)

    def half_z_over_surd_derivative(self) -> "AlgebraicFunction":
        """(z / (2√(1-z²))) d/dz applied to self."""
        return self.derivative() * AlgebraicFunction((0, Fraction(1, 2)), 0, 1)

    def value_at_zero(self) -> Fraction:
        if self.is_zero() or self.pow_z < 0:
            return Fraction(0)
        if self.pow_z > 0:
            raise DomainError("function has a pole at z = 0")
        return self.poly[0]

    def _numeric(self):
        """Coefficients as mpf at the current precision, in z² when P is even."""
        cached = self._num
        if cached is not None and cached[0] == mp.prec:
            return cached[1], cached[2]
        even = all(c == 0 for c in self.poly[1::2])
        src = self.poly[0::2] if even else self.poly
        coeffs = tuple(mpf(c.numerator) / c.denominator for c in reversed(src))
        self._num = (mp.prec, coeffs, even)
        return coeffs, even

    def evaluate(self, z, w=None):
        """Numeric value; ``w`` is the chosen √(1-z²) (principal by default)."""
        z = mpc(z)
        if w is None:
            w = mp.sqrt(1 - z * z)
        coeffs, even = self._numeric()
        x = z * z if even else z
        acc = mpc(0)
        for c in coeffs:
            acc = acc * x + c
        if self.pow_z:
            acc *= z ** (-self.pow_z)
        if self.pow_surd:
            acc *= w ** (-self.pow_surd)
        return acc

    def shape(self, s3: int) -> list:
        """Coefficients of P in z² when written as P(z²)/(1-z²)^{s3/2}.

        Raises ValueError if the function is not of that form.
        """
        if self.is_zero():
            return []
        if self.pow_z > 0 or s3 < self.pow_surd or (s3 - self.pow_surd) % 2:
            raise ValueError("not representable as P(z²)/(1-z²)^{s3/2}")
        p = self.lift(0, s3)
        if any(p[i] for i in range(1, len(p), 2)):
            raise ValueError("numerator is not even in z")
        return p[0::2]


# ---------------------------------------------------------------------------
# F̂_s and Ê_s
# ---------------------------------------------------------------------------


# f^{1/2} = -(1-z²)^{1/2}/z
_F_HALF = AlgebraicFunction((-1,), 1, -1)


@lru_cache(maxsize=8)
def _fhat_table(S: int) -> tuple:
    # z²(z²+4)/(8(z²-1)³) = -z²(z²+4)/8 · (1-z²)^{-3}
    F1 = AlgebraicFunction((0, 0, Fraction(-1, 2), 0, Fraction(-1, 8)), 0, 6)
    F = [F1]
    for s in range(1, S):
        nxt = F[s - 1].half_z_over_surd_derivative()
        for j in range(1, s):
            nxt = nxt - F[j - 1] * F[s - j - 1] * Fraction(1, 2)
        F.append(nxt)
    return tuple(F)


def fhat_coefficients(S: int) -> list:
    """F̂_1..F̂_S exactly."""
    if S < 1:
        raise ValueError("S must be >= 1")
    return list(_fhat_table(max(S, 1))[:S])


def _solve_exact(rows: list, rhs: list) -> list:
    """Solve an overdetermined consistent rational system by elimination."""
    n = len(rows[0]) if rows else 0
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(A)):
        if A[i][n] != 0:
            raise ArithmeticError("antiderivative ansatz is inconsistent")
    if len(piv_cols) != n:
        raise ArithmeticError("antiderivative ansatz is underdetermined")
    sol = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        sol[c] = A[i][n]
    return sol


def _antiderivative(target: AlgebraicFunction, s: int) -> AlgebraicFunction:
    """E = Σ_{i<=s} c_i z^{2i} (1-z²)^{-3s/2} with E' = target, exactly."""
    basis = [AlgebraicFunction([0] * (2 * i) + [1], 0, 3 * s) for i in range(s + 1)]
    derivs = [b.derivative() for b in basis]
    m = max([target.pow_z] + [d.pow_z for d in derivs if not d.is_zero()])
    k = max([target.pow_surd] + [d.pow_surd for d in derivs if not d.is_zero()])
    cols = [d.lift(m, k) if not d.is_zero() else [] for d in derivs]
    tvec = target.lift(m, k)
    L = max([len(tvec)] + [len(c) for c in cols])

    def pad(v):
        return list(v) + [Fraction(0)] * (L - len(v))

    cols = [pad(c) for c in cols]
    tvec = pad(tvec)
    rows = [[cols[i][r] for i in range(s + 1)] for r in range(L)]
    coef = _solve_exact(rows, tvec)
    E = AlgebraicFunction.zero(s % 2)
    for c, b in zip(coef, basis):
        E = E + b * c
    if E.derivative() != target:
        raise ArithmeticError("antiderivative check failed")
    return E


def ehat_by_integration(S: int) -> list:
    """Ê_1..Ê_S each as the antiderivative of F̂_s f^{1/2} vanishing at infinity."""
    F = fhat_coefficients(S)
    return [_antiderivative(F[s - 1] * _F_HALF, s) for s in range(1, S + 1)]


@lru_cache(maxsize=8)
def _ehat_table(S: int) -> tuple:
    F = fhat_coefficients(S)
    E = [None] * (S + 1)
    for s in range(1, S + 1, 2):
        E[s] = _antiderivative(F[s - 1] * _F_HALF, s)
    half = S // 2
    if half:
        one = AlgebraicFunction.constant(1)
        series = FormalSeries([one] + [F[2 * i] for i in range(half)])
        logs = log_series(series, zero=AlgebraicFunction.zero())
        for s in range(1, half + 1):
            raw = logs[s] * Fraction(-1, 2)
            alpha = -raw.value_at_zero()
            E[2 * s] = raw + alpha
    return tuple(E[1:])


def ehat_coefficients(S: int) -> list:
    """Ê_1..Ê_S exactly: odd by integration, even from the log identity."""
    if S < 1:
        raise ValueError("S must be >= 1")
    return list(_ehat_table(S))


# ---------------------------------------------------------------------------
# Liouville map
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MapPoint:
    """Liouville data at one z (all at the model's precision)."""

    z: mpc
    w: mpc            # principal √(1-z²)
    xi: mpc
    zeta: mpc
    zeta_arg: mpf
    ratio: mpc        # ζ/(1-z²), analytic and non-zero near z = 1

    @property
    def f_half(self) -> mpc:
        return -self.w / self.z

    def zeta_q(self) -> mpc:
        """ζ^{1/4} with arg ζ taken from ``zeta_arg``."""
        return abs(self.zeta) ** (mpf(1) / 4) * mp.expj(self.zeta_arg / 4)

    def zeta_over_f_q(self) -> mpc:
        """(ζ/f)^{1/4} = (ζ z²/(1-z²))^{1/4}."""
        return (self.ratio * self.z ** 2) ** (mpf(1) / 4)

    def zeta_f_q(self) -> mpc:
        """(ζ f)^{1/4}, the companion of :meth:`zeta_over_f_q`."""
        return self.zeta_over_f_q() * self.w / self.z

    def R(self) -> mpc:
        """(ζ/(1-z²))^{1/4}."""
        return self.ratio ** (mpf(1) / 4)


_SERIES_RADIUS = mpf(1) / 4
ZERO_TILT = mpf(1) / 100


def _h_series(v):
    """Σ v^k/(2k+3), so that artanh(w) - w = w³ h(w²)."""
    acc = mpc(0)
    term = mpc(1)
    tol = mpf(10) ** (-mp.dps - 5)
    k = 0
    while True:
        t = term / (2 * k + 3)
        acc += t
        if abs(t) < tol * abs(acc):
            break
        term *= v
        k += 1
    return acc


def liouville_point(z, ctx: PrecisionContext) -> MapPoint:
    """ξ, ζ and companions at z, following the module's branch rules."""
    with ctx.workdps(15):
        z = mpc(z)
        if z.imag == 0 and z.real <= 0:
            raise DomainError(f"z = {z} lies on the cut (-∞, 0]")
        if z.imag < 0:
            p = liouville_point(mp.conj(z), ctx)
            with ctx.workdps(15):
                return MapPoint(mp.conj(p.z), mp.conj(p.w), mp.conj(p.xi), mp.conj(p.zeta),
                                -p.zeta_arg, mp.conj(p.ratio))
        v = 1 - z * z
        w = mp.sqrt(v)
        if abs(v) < _SERIES_RADIUS:
            ratio = (3 * _h_series(v) / 2) ** (mpf(2) / 3)
            zeta = v * ratio
            arg = mp.arg(zeta) if zeta != 0 else mpf(0)
            if zeta.imag == 0 and zeta.real < 0:
                arg = -mp.pi
        elif z.imag == 0 and z.real < 1:
            xr = mp.log((1 + w.real) / z.real) - w.real
            zeta = mpc((3 * xr / 2) ** (mpf(2) / 3), 0)
            arg = mpf(0)
            ratio = zeta / v
        elif z.imag == 0:
            s = mp.sqrt(z.real ** 2 - 1)
            zeta = mpc(-((3 * (s - mp.atan(s)) / 2) ** (mpf(2) / 3)), 0)
            arg = -mp.pi
            ratio = zeta / v
        else:
            xp = mp.log((1 + w) / z) - w
            a = mp.arg(xp)
            if a > 0:
                a -= 2 * mp.pi
            arg = 2 * a / 3
            zeta = (3 * abs(xp) / 2) ** (mpf(2) / 3) * mp.expj(arg)
            ratio = zeta / v
        if z.imag == 0 and z.real > 1:
            # limits from the upper half-plane, matching arg ζ = -π
            w = mpc(0, -mp.sqrt(z.real ** 2 - 1))
        xi = 2 * abs(zeta) ** (mpf(3) / 2) * mp.expj(3 * arg / 2) / 3
        return MapPoint(z, w, xi, zeta, arg, ratio)


def xi_zeta(z, ctx: PrecisionContext) -> tuple:
    p = liouville_point(z, ctx)
    with ctx.workdps():
        return +p.xi, +p.zeta


# ---------------------------------------------------------------------------
# Modified coefficients, connection data, sectors
# ---------------------------------------------------------------------------


def _q(x) -> mpf:
    return mpf(x.numerator) / x.denominator


def modified_coefficients(s: int, z, variant: str, ctx: PrecisionContext) -> mpc:
    """𝓔_s (variant "script_E") or 𝓔̃_s ("script_E_tilde") at z."""
    if variant not in ("script_E", "script_E_tilde"):
        raise ValueError(f"unknown variant {variant!r}")
    with ctx.workdps(15):
        p = liouville_point(z, ctx)
        if p.xi == 0:
            raise DomainError("modified coefficients are singular at the turning point")
        E = ehat_coefficients(s)[s - 1].evaluate(p.z, p.w)
        table = airy_seq_table(max(s, 2))
        b = table.a[s - 1] if variant == "script_E" else table.a_tilde[s - 1]
        val = E + (-1) ** s * _q(b) / (s * p.xi ** s)
    with ctx.workdps():
        return +val


@dataclass(frozen=True)
class ConnectionData:
    nu: mpf
    lambda_plus: mpf
    lambda_minus: mpf
    n: int
    delta_pm: mpf     # δ_{n,±1}(ν); δ_{n,0} = 0
    mu: mpf           # μ_n(ν)

    def delta(self, j: int) -> mpf:
        return mpf(0) if j == 0 else self.delta_pm


def connection_constants(nu, m: int, ctx: PrecisionContext, n: int | None = None) -> ConnectionData:
    """λ_{±1}, δ_{n,±1} and μ_n for the Bessel model, with n = 2m+2 by default."""
    n = 2 * m + 2 if n is None else n
    with ctx.workdps(20):
        nu = mpf(nu)
        if not nu > 0:
            raise DomainError("nu must be positive")
        lam = mp.exp(nu) * gamma(nu + 1, ctx.with_digits(ctx.digits + 20)) / \
            (mp.sqrt(2 * mp.pi * nu) * nu ** nu)
        C = stirling_constants(max(n, 2)).C
        odd = sum(_q(C[s]) / nu ** s for s in range(1, n) if s % 2)
        delta = lam * mp.exp(-odd) - 1
        mu = mp.exp(odd)
    with ctx.workdps():
        return ConnectionData(+nu, +lam, +lam, n, +delta, +mu)


@dataclass(frozen=True)
class SectorLabel:
    j: int
    k: int

    @property
    def pair(self) -> tuple[int, int]:
        """(j, k) used by the away-from-turning-point bounds."""
        if self.j == 0:
            return (self.k, 0)
        if self.k == 0:
            return (self.j, 0)
        return (self.j, self.k)


def classify_sector(z, u, ctx: PrecisionContext | None = None) -> SectorLabel:
    """Sector T_{j,k} containing z; ties go towards T_{0,-1}."""
    ctx = ctx or PrecisionContext(30)
    with ctx.workdps(10):
        p = liouville_point(z, ctx)
        phi = 2 * mp.arg(mpc(u)) / 3 + p.zeta_arg
        if p.zeta == 0:
            phi = mpf(0)
        third = mp.pi / 3
        tol = mpf(10) ** (-ctx.digits + 5)
        if abs(phi) <= third + tol:
            return SectorLabel(0, 1 if phi > tol else -1)
        if phi < 0:
            return SectorLabel(-1, 0 if phi >= -2 * third - tol else 1)
        return SectorLabel(1, 0 if phi <= 2 * third + tol else -1)


# ---------------------------------------------------------------------------
# The model object
# ---------------------------------------------------------------------------


class BesselModel:
    """Bessel instance of the turning-point problem interface."""

    z0 = mpc(1)

    def __init__(self, ctx: PrecisionContext | None = None, max_order: int = 14):
        self.ctx = ctx or PrecisionContext()
        self._F = fhat_coefficients(max_order)
        self._E = ehat_coefficients(max_order)
        self.max_order = max_order

    def _grow(self, upto: int):
        if upto > self.max_order:
            self._F = fhat_coefficients(upto)
            self._E = ehat_coefficients(upto)
            self.max_order = upto

    def f(self, z):
        z = mpc(z)
        return (1 - z * z) / (z * z)

    def g(self, z):
        z = mpc(z)
        return -1 / (4 * z * z)

    def phi(self, z):
        return 2 * self._F[0].evaluate(z)

    def point(self, z) -> MapPoint:
        return liouville_point(z, self.ctx)

    def f_half(self, z):
        z = mpc(z)
        return -mp.sqrt(1 - z * z) / z

    def candidate_paths(self, z, j: int):
        """Paths from z to z^{(j)}, in order of preference.

        j = 0: the segment to the origin.  j = ∓1: the vertical ray towards
        ±i∞ when it stays on one side of the real axis; otherwise a segment
        down to a point of (0, 1) followed by the vertical ray.
        """
        z = mpc(z)
        if j == 0:
            if z == 0:
                yield ContourSpec(())
            else:
                yield ContourSpec((LineSegment(z, mpc(0)),))
            return
        direction = mpc(0, -j)      # j = -1 goes up, j = +1 goes down
        if z == 0:
            # on the imaginary axis every integrand is real up to a fixed phase and
            # |.| has many kinks; a slightly tilted ray avoids them
            yield ContourSpec((RaySegment(z, mp.expj(-j * (mp.pi / 2 - ZERO_TILT))),))
            yield ContourSpec((RaySegment(z, direction),))
            return
        side = z.imag * direction.imag
        if side > 0 or (z.imag == 0 and 0 <= z.real < 1):
            yield ContourSpec((RaySegment(z, direction),))
            return
        if z.imag == 0:
            raise DomainError(f"no W_{j} path from the real point {z} on the branch of ξ")
        # bend across (0, 1), where ξ is continuous
        for t in (0, 0.25, 0.5, 1, 1.5, 2, 3, 4):
            xc = z.real + mpf(t) * abs(z.imag)
            if not 0 < xc < 1:
                continue
            yield ContourSpec((LineSegment(z, mpc(xc)), RaySegment(mpc(xc), direction)))

    def fhat_values(self, z, upto: int, w=None) -> list:
        self._grow(upto)
        z = mpc(z)
        w = mp.sqrt(1 - z * z) if w is None else w
        return [F.evaluate(z, w) for F in self._F[:upto]]

    def ehat_values(self, z, upto: int, w=None) -> list:
        self._grow(upto)
        z = mpc(z)
        w = mp.sqrt(1 - z * z) if w is None else w
        return [E.evaluate(z, w) for E in self._E[:upto]]

    def ehat_reference(self, s: int, j: int):
        if j == 0:
            return _q(stirling_constants(max(s, 2)).C[s])
        return mpf(0)

    def connection(self, nu, n: int) -> ConnectionData:
        return connection_constants(nu, (n - 2) // 2, self.ctx, n=n)
