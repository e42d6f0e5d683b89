"""Reference values of J_ν, Y_ν, H^{(1,2)}_ν, Ai and Ai' at high precision.

Every evaluator sums a convergent ascending series and keeps track of the
largest term.  The number of digits lost to cancellation is
log10(max|term| / |sum|); if that eats into the requested accuracy the sum
is recomputed with more digits, up to four times the initial working
precision.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .besselmap import liouville_point
from .mpnum import DomainError, PrecisionContext, PrecisionError, gamma
from .seqcoeff import stirling_constants

__all__ = [
    "OracleValue",
    "airy",
    "airy_rotated",
    "bessel_H1",
    "bessel_H2",
    "bessel_J",
    "bessel_Y",
    "exact_AB",
]

log = logging.getLogger(__name__)

_GUARD = 10


@dataclass(frozen=True)
class OracleValue:
    value: mpc
    digits_used: int
    est_correct_digits: int


def _lost_digits(max_term, total) -> float:
    if total == 0:
        return float("inf") if max_term else 0.0
    return max(0.0, float(mp.log10(max_term / abs(total))))


def _escalate(kernel, ctx: PrecisionContext, initial_extra: int, label: str) -> OracleValue:
    """Run ``kernel`` (returning value, max_term) until cancellation is covered."""
    target = ctx.digits
    start = target + _GUARD + initial_extra
    cap = 4 * start
    dps = start
    while True:
        with mp.workdps(dps):
            value, max_term = kernel()
            lost = _lost_digits(max_term, value)
        correct = int(dps - lost - 5)
        if correct >= target + 5:
            log.debug("%s: dps=%d lost=%.1f", label, dps, lost)
            with mp.workdps(target + 5):
                return OracleValue(+value, dps, correct)
        need = int(math.ceil(target + lost + _GUARD + 5))
        if need > cap or lost == float("inf"):
            raise PrecisionError(f"{label}: needs {need} digits, cap is {cap}")
        dps = max(need, dps + 10)


def _wide(ctx: PrecisionContext):
    """Precision for converting arguments, so they are not rounded to the caller's setting."""
    return mp.workdps(ctx.digits + 40)


def _inputs(ctx: PrecisionContext, nu, x) -> tuple:
    with _wide(ctx):
        return mpf(nu), mpc(x)


def _rgamma(x):
    return mp.rgamma(x)


def _j_series(nu, x):
    """Σ (-1)^k (x/2)^{2k+ν} / (k! Γ(k+ν+1)) with its largest term."""
    half = x / 2
    q = -half * half
    lead = half ** nu * _rgamma(nu + 1) if nu != 0 else mpc(1)
    if nu != 0 and x == 0:
        return mpc(0), mpf(0)
    term = mpc(lead)
    total = term
    big = abs(term)
    tol = mpf(10) ** (-mp.dps - 5)
    k = 0
    while True:
        k += 1
        denom = k * (k + nu)
        if denom == 0:
            # Γ(k+ν+1) has a pole: the term vanishes for negative integer ν
            term = mpc(0)
            continue
        term = term * q / denom
        total += term
        at = abs(term)
        if at > big:
            big = at
        if at <= tol * big and k > abs(x):
            break
    return total, big


def bessel_J(nu, x, ctx: PrecisionContext) -> OracleValue:
    nu, x = _inputs(ctx, nu, x)
    if abs(x) > 200:
        raise DomainError("bessel_J oracle is limited to |x| <= 200")
    extra = int(float(abs(x)) * math.log10(math.e) / 2) + 1
    return _escalate(lambda: _j_series(nu, mpc(x)), ctx, extra, f"J_{nu}({x})")


def _jneg_series(nu, x):
    return _j_series(-nu, x)


def _y_integer_series(n: int, x):
    """Y_n(x) for integer n >= 0 from the logarithmic ascending series."""
    half = x / 2
    q = half * half
    big = mpf(0)
    # finite part
    fin = mpc(0)
    if n > 0:
        t = mpc(mp.factorial(n - 1))
        for k in range(n):
            if k:
                t = t * q / (k * (n - k))
            fin += t
            big = max(big, abs(t))
        fin = -fin * half ** (-n) / mp.pi
        big = big * abs(half ** (-n)) / mp.pi
    J, bigJ = _j_series(mpf(n), x)
    logpart = 2 * mp.log(half) * J / mp.pi
    big = max(big, bigJ * abs(2 * mp.log(half) / mp.pi))
    # digamma part
    psi_k = -mp.euler
    psi_nk = -mp.euler + mp.harmonic(n)
    t = half ** n / mp.factorial(n)
    s = mpc(0)
    tol = mpf(10) ** (-mp.dps - 5)
    bigs = mpf(0)
    k = 0
    while True:
        term = (psi_k + psi_nk) * t
        s += term
        bigs = max(bigs, abs(term))
        if abs(term) <= tol * bigs and k > abs(x):
            break
        k += 1
        psi_k += mpf(1) / k
        psi_nk += mpf(1) / (n + k)
        t = -t * q / (k * (n + k))
    total = fin + logpart - s / mp.pi
    big = max(big, bigs / mp.pi)
    return total, big


def _is_integer(nu) -> bool:
    return mp.isint(nu)


def bessel_Y(nu, x, ctx: PrecisionContext) -> OracleValue:
    nu, x = _inputs(ctx, nu, x)
    if x == 0:
        raise DomainError("Y_ν is singular at 0")
    if x.imag == 0 and x.real < 0:
        raise DomainError("bessel_Y oracle expects x off the negative real axis")
    extra = int(float(abs(x)) * math.log10(math.e) / 2) + 1
    if _is_integer(nu):
        n = int(abs(nu))
        res = _escalate(lambda: _y_integer_series(n, mpc(x)), ctx, extra, f"Y_{n}({x})")
        if nu < 0 and n % 2:
            return OracleValue(-res.value, res.digits_used, res.est_correct_digits)
        return res

    def kernel():
        a, ba = _j_series(nu, mpc(x))
        b, bb = _j_series(-nu, mpc(x))
        c, s = mp.cospi(nu), mp.sinpi(nu)
        return (a * c - b) / s, max(ba * abs(c), bb) / abs(s)

    return _escalate(kernel, ctx, extra, f"Y_{nu}({x})")


def bessel_H1(nu, x, ctx: PrecisionContext) -> OracleValue:
    """H^{(1)}_ν(x) for Im x >= 0."""
    nu, x = _inputs(ctx, nu, x)
    if x.imag < 0:
        raise DomainError("bessel_H1 oracle expects Im x >= 0")
    return _hankel1(nu, x, ctx)


def _hankel1(nu, x, ctx: PrecisionContext) -> OracleValue:
    # the ascending series are valid on the whole cut plane
    if x.imag == 0 and x.real < 0:
        raise DomainError("x lies on the branch cut")
    if x == 0:
        raise DomainError("H^{(1)} is singular at 0")
    extra = int(float(abs(x)) * math.log10(math.e) / 2) + 1
    if _is_integer(nu):
        n = int(abs(nu))

        def kernel():
            J, bj = _j_series(mpf(n), mpc(x))
            Y, by = _y_integer_series(n, mpc(x))
            return J + 1j * Y, max(bj, by)

        res = _escalate(kernel, ctx, extra, f"H1_{n}({x})")
        if nu < 0:
            with mp.workdps(ctx.digits + 5):
                return OracleValue(res.value * mp.expj(mp.pi * n), res.digits_used,
                                   res.est_correct_digits)
        return res

    def kernel():
        a, ba = _j_series(nu, mpc(x))
        b, bb = _j_series(-nu, mpc(x))
        e = mp.expj(-mp.pi * nu)
        d = 1j * mp.sinpi(nu)
        return (b - e * a) / d, max(ba, bb) / abs(d)

    return _escalate(kernel, ctx, extra, f"H1_{nu}({x})")


def bessel_H2(nu, x, ctx: PrecisionContext) -> OracleValue:
    """H^{(2)}_ν(x) via H^{(2)}_ν(x) = conj H^{(1)}_ν(conj x), real ν."""
    nu, x = _inputs(ctx, nu, x)
    r = _hankel1(nu, mp.conj(x), ctx)
    return OracleValue(mp.conj(r.value), r.digits_used, r.est_correct_digits)


def _airy_kernel(x, which: str, c1, c2):
    """c1 f - c2 g (Ai) or c1 f' - c2 g' (Ai') summed together, with the largest term."""
    x3 = x ** 3
    tol = mpf(10) ** (-mp.dps - 5)
    if which == "Ai":
        f_t, g_t = mpc(1), mpc(x)
        f_den = lambda k: (3 * k - 1) * (3 * k)
        g_den = lambda k: (3 * k) * (3 * k + 1)
    else:
        # f' starts at x^2/2, g' at 1
        f_t, g_t = x * x / 2, mpc(1)
        f_den = lambda k: (3 * k) * (3 * k + 2)
        g_den = lambda k: (3 * k - 2) * (3 * k)
    f_s, g_s = f_t, g_t
    big = max(abs(c1 * f_t), abs(c2 * g_t))
    k = 0
    while True:
        k += 1
        f_t = f_t * x3 / f_den(k)
        g_t = g_t * x3 / g_den(k)
        f_s += f_t
        g_s += g_t
        m = max(abs(c1 * f_t), abs(c2 * g_t))
        if m > big:
            big = m
        if m <= tol * big and k > 3:
            break
    return c1 * f_s - c2 * g_s, big


def airy(x, which: str, ctx: PrecisionContext) -> OracleValue:
    """Ai(x) or Ai'(x) from the Maclaurin pair f, g."""
    if which not in ("Ai", "Aip"):
        raise ValueError(f"which must be 'Ai' or 'Aip', got {which!r}")
    with _wide(ctx):
        x = mpc(x)
    if abs(x) > 60:
        raise DomainError("airy oracle is limited to |x| <= 60")
    extra = int(float(abs(x)) ** 1.5 * 2 / 3 * math.log10(math.e)) + 1

    def kernel():
        gctx = PrecisionContext(max(30, mp.dps))
        c1 = mpf(3) ** (-mpf(2) / 3) / gamma(mpf(2) / 3, gctx)
        c2 = mpf(3) ** (-mpf(1) / 3) / gamma(mpf(1) / 3, gctx)
        return _airy_kernel(mpc(x), which, c1, c2)

    return _escalate(kernel, ctx, extra, f"{which}({x})")


def airy_rotated(x, which: str, j: int, ctx: PrecisionContext) -> OracleValue:
    """Ai_j(x) = Ai(x e^{-2πij/3}) or its x-derivative."""
    with _wide(ctx):
        omega = mp.expj(-2 * mp.pi * j / 3)
        base = airy(mpc(x) * omega, which, ctx)
        val = base.value * (omega if which == "Aip" else 1)
    with ctx.workdps():
        return OracleValue(+val, base.digits_used, base.est_correct_digits)


def exact_AB(nu, z, m: int, ctx: PrecisionContext) -> tuple:
    """Exact 𝓐_{2m+2}(ν, z), 𝓑_{2m+2}(ν, z) assembled from J, H^{(1)} and Airy values."""
    inner = ctx.with_digits(ctx.digits + 30)
    with inner.workdps(10):
        nu = mpf(nu)
        z = mpc(z)
        if z.imag < 0:
            a, b = exact_AB(nu, mp.conj(z), m, ctx)
            return mp.conj(a), mp.conj(b)
        p = liouville_point(z, inner)
        x = nu ** (mpf(2) / 3) * p.zeta
        J = bessel_J(nu, nu * z, inner).value
        H = bessel_H1(nu, nu * z, inner).value
        ai = airy(x, "Ai", inner).value
        aip = airy(x, "Aip", inner).value
        ai_m1 = airy_rotated(x, "Ai", -1, inner).value
        aip_m1 = airy_rotated(x, "Aip", -1, inner).value
        C = stirling_constants(2 * m + 1).C
        csum = sum(mpf(C[2 * j + 1].numerator) / C[2 * j + 1].denominator / nu ** (2 * j + 1)
                   for j in range(m + 1))
        pref = mp.sqrt(mp.pi) * mp.exp(nu) * nu ** (-nu + mpf(5) / 6) * gamma(nu, inner) * \
            mp.exp(-csum) * mp.sqrt(z)
        ph = mp.expj(mp.pi / 6)
        A = pref * (ph * aip_m1 * J - 0.5j * aip * H)
        B = pref * (0.5j * ai * H - ph * ai_m1 * J)
    with ctx.workdps():
        return +A, +B
