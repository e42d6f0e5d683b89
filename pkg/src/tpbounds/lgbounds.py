"""Bounds away from the turning point.

LG solution error terms ω, ϖ, η; the truncated 𝓐, 𝓑 expansions with their
certified bounds; and the matching constant c_{m,0} for the Bessel model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .airylg import bound_inputs
from .besselmap import BesselModel, classify_sector
from .mpnum import (
    Adaptive,
    ContourSpec,
    DomainError,
    FixedGauss,
    PrecisionContext,
    QuadMode,
    RaySegment,
    gamma,
    integrate_contour,
)
from .seqcoeff import airy_seq_table, stirling_constants

__all__ = [
    "ExpansionValue",
    "LGBoundTerms",
    "LGSolution",
    "ProgressivePathError",
    "eta_lg_bound",
    "lg_bound_terms",
    "lg_solution_W",
    "matching_constant_c",
    "script_AB",
    "script_AB_pair",
]

log = logging.getLogger(__name__)

KINDS = ("A_script", "B_script")
BOUND_DIGITS = 30


class ProgressivePathError(DomainError):
    """No candidate path keeps Re((-1)^j u ξ) monotone."""


@dataclass(frozen=True)
class LGBoundTerms:
    """Path integrals behind ω_{n,j} and ϖ_{n,j}.

    ``single[s]`` is ∫|F̂_{s+1} f^{1/2} dt| (s = 0..n-1) and ``conv[s]`` is
    ∫|Σ_{k=s}^{n-1} F̂_k F̂_{s+n-k-1} f^{1/2} dt| (s = 1..n-1, index 0 unused).
    ω and ϖ follow for any |u| without further quadrature.
    """

    n: int
    j: int
    path: ContourSpec
    single: tuple
    conv: tuple

    def omega(self, u) -> mpf:
        au = abs(mpc(u))
        acc = 2 * self.single[self.n - 1]
        for s in range(1, self.n):
            acc += self.conv[s] / au ** s
        return acc

    def varpi(self, u) -> mpf:
        au = abs(mpc(u))
        return 4 * sum(self.single[s] / au ** s for s in range(self.n - 1))


@dataclass(frozen=True)
class ExpansionValue:
    value: mpc
    certified_bound: mpf
    m: int
    pair: tuple
    kind: str


@dataclass(frozen=True)
class LGSolution:
    value: mpc
    eta_bound: mpf        # bound on |η_{n,j}|, a relative error
    j: int
    n: int


def _q(x) -> mpf:
    return mpf(x.numerator) / x.denominator


def _norm_kind(kind: str) -> str:
    k = {"A": "A_script", "B": "B_script"}.get(kind, kind)
    if k not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    return k


# ---------------------------------------------------------------------------
# Progressive paths and ω, ϖ
# ---------------------------------------------------------------------------


def _path_samples(path: ContourSpec, per_segment: int) -> list:
    pts = []
    for p in path.sample(per_segment):
        if pts and abs(p - pts[-1]) == 0:
            continue
        pts.append(p)
    return pts


def is_progressive(model, path: ContourSpec, j: int, u, per_segment: int = 64) -> bool:
    """Re((-1)^j u ξ) must not decrease when moving from z along ``path``.

    The reference point itself (a pole or infinity) is never sampled.
    """
    sign = -1 if j % 2 else 1
    u = mpc(u)
    prev = None
    for t in _path_samples(path, per_segment):
        if t == 0:
            continue
        v = (sign * u * model.point(t).xi).real
        if prev is not None and v < prev - mpf(10) ** -20 * (1 + abs(prev)):
            return False
        prev = v
    return True


def _find_path(model, z, j: int, u) -> ContourSpec:
    for path in model.candidate_paths(z, j):
        if path.is_empty or is_progressive(model, path, j, u):
            return path
    raise ProgressivePathError(f"no progressive path from z = {z} to the reference point of W_{j}")


def _integrand(model, n: int):
    def f(t):
        F = [None] + list(model.fhat_values(t, n))
        fh = model.f_half(t)
        single = [F[s + 1] * fh for s in range(n)]
        conv = []
        for s in range(1, n):
            acc = sum(F[k] * F[s + n - k - 1] for k in range(s, n))
            conv.append(acc * fh)
        return single + conv
    return f


def _default_mode(seg) -> QuadMode:
    return Adaptive(tol=1e-12) if isinstance(seg, RaySegment) else FixedGauss(30)


def lg_bound_terms(model, z, j: int, n: int, mode: QuadMode | None = None,
                   ctx: PrecisionContext | None = None, u=1, path: ContourSpec | None = None
                   ) -> LGBoundTerms:
    """ω_{n,j}, ϖ_{n,j} integrals along a progressive path from z to z^{(j)}.

    With ``mode=None`` finite segments use 30-point Gauss-Legendre and rays
    the adaptive rule.  ``u`` only enters the progressiveness check (through
    its argument); ω and ϖ are evaluated later for any |u|.  The integrals
    feed error bounds only, so they are computed with at most
    ``BOUND_DIGITS`` digits.
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    ctx = ctx or model.ctx
    ctx = ctx.with_digits(min(ctx.digits, BOUND_DIGITS))
    with ctx.workdps(5):
        z = mpc(z)
        if path is None:
            path = _find_path(model, z, j, u)
        elif not (path.is_empty or is_progressive(model, path, j, u)):
            raise ProgressivePathError(f"supplied path is not progressive for W_{j}")
        if path.is_empty:
            zero = mpf(0)
            return LGBoundTerms(n, j, path, (zero,) * n, (zero,) * n)
        f = _integrand(model, n)
        total = None
        for seg in path.segments:
            part = integrate_contour(f, ContourSpec((seg,)), mode or _default_mode(seg), ctx)
            total = part if total is None else [a + b for a, b in zip(total, part)]
    single = tuple(total[:n])
    conv = (mpf(0),) + tuple(total[n:])
    return LGBoundTerms(n, j, path, single, conv)


def eta_lg_bound(terms: LGBoundTerms, u, n: int | None = None) -> mpf:
    """|u|^{-n} ω exp(|u|^{-1} ϖ + |u|^{-n} ω)."""
    n = terms.n if n is None else n
    au = abs(mpc(u))
    w = terms.omega(u) / au ** n
    return w * mp.exp(terms.varpi(u) / au + w)


# ---------------------------------------------------------------------------
# W_j
# ---------------------------------------------------------------------------


def lg_solution_W(model, z, j: int, n: int, nu, ctx: PrecisionContext | None = None,
                  terms: LGBoundTerms | None = None) -> LGSolution:
    """Truncated W_j(ν, ζ) with its η_{n,j} bound.

    All three solutions use the principal ξ of the model; this is the right
    branch for W_0, W_{-1} in the upper half plane and for W_1 on T_0.
    """
    ctx = ctx or model.ctx
    if j not in (-1, 0, 1):
        raise ValueError(f"j must be -1, 0 or 1, got {j}")
    with ctx.workdps(15):
        u = mpc(nu)
        z = mpc(z)
        p = model.point(z)
        if j == 1 and z.imag > 0 and p.zeta_arg < -2 * mp.pi / 3:
            raise DomainError("W_1 in the upper part of T_{-1} needs the other branch of ξ")
        if j == -1 and z.imag < 0 and p.zeta_arg > 2 * mp.pi / 3:
            raise DomainError("W_{-1} in the lower part of T_1 needs the other branch of ξ")
        E = model.ehat_values(z, n - 1, p.w)
        if j == 0:
            expo = -u * p.xi
            for s in range(1, n):
                expo += (-1) ** s * (E[s - 1] - model.ehat_reference(s, 0)) / u ** s
        else:
            expo = u * p.xi
            for s in range(1, n):
                expo += (E[s - 1] - model.ehat_reference(s, j)) / u ** s
        value = mp.exp(expo) / p.zeta_q()
        if terms is None:
            terms = lg_bound_terms(model, z, j, n, None, ctx, u=u)
        bound = eta_lg_bound(terms, u, n)
    with ctx.workdps():
        return LGSolution(+value, +bound, j, n)


# ---------------------------------------------------------------------------
# 𝓐 and 𝓑
# ---------------------------------------------------------------------------


def _airy_sector_ok(u, zeta_arg, branch: int) -> bool:
    phi = 2 * mp.arg(mpc(u)) / 3 + zeta_arg - branch * 2 * mp.pi / 3
    return abs(phi) <= 2 * mp.pi / 3 * (1 + mpf(10) ** -20)


def _e_term(u, n: int, delta, omega, varpi, gam, bet) -> mpf:
    au = abs(mpc(u))
    out = au ** n * abs(delta)
    out += omega * mp.exp(varpi / au + omega / au ** n)
    out += gam * mp.exp(bet / au + gam / au ** n)
    return out


def _eps_bound(u, n: int, script, e_j, e_k) -> mpf:
    au = abs(mpc(u))
    plus = mp.exp(sum((script[s - 1] / u ** s).real for s in range(1, n)))
    minus = mp.exp(sum(((-1) ** s * script[s - 1] / u ** s).real for s in range(1, n)))
    lead = au ** (-n)
    return lead * plus * e_j * (1 + e_j * lead / 2) ** 2 + \
        lead * minus * e_k * (1 + e_k * lead / 2) ** 2


def _exp_cosh(script, u, m: int, hyper) -> mpc:
    even = sum(script[2 * s - 1] / u ** (2 * s) for s in range(1, m + 1))
    odd = sum(script[2 * s] / u ** (2 * s + 1) for s in range(0, m + 1))
    return mp.exp(even) * hyper(odd)


def script_AB_pair(model, z, nu, m: int, ctx: PrecisionContext | None = None,
                   guard: bool = True, cache: dict | None = None) -> tuple:
    """(𝓐_{2m+2}, 𝓑_{2m+2}) as :class:`ExpansionValue` objects sharing one set of path integrals.

    ``guard`` enforces |ξ|ν >= 1.  ``cache`` (optional dict) keeps
    :class:`LGBoundTerms` keyed by (z, j, n) for reuse across ν.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    ctx = ctx or model.ctx
    n = 2 * m + 2
    with ctx.workdps(15):
        z = mpc(z)
        u = mpf(nu)
        if z.imag < 0:
            a, b = script_AB_pair(model, mp.conj(z), nu, m, ctx, guard, cache)
            return (ExpansionValue(mp.conj(a.value), a.certified_bound, m, (-a.pair[0], a.pair[1]), a.kind),
                    ExpansionValue(mp.conj(b.value), b.certified_bound, m, (-b.pair[0], b.pair[1]), b.kind))
        if z.imag == 0 and z.real <= 0:
            raise DomainError(f"z = {z} lies on the cut")
        p = model.point(z)
        if p.zeta == 0:
            raise DomainError("the expansions are not evaluated at the turning point here")
        if guard and abs(p.xi) * u < 1:
            raise DomainError(f"|ξ|ν = {float(abs(p.xi) * u):.3g} < 1: too close to the turning point")
        j, k = classify_sector(z, u, ctx).pair
        if (j, k) not in ((-1, 0), (1, 0)):
            raise DomainError(f"sector pair {(j, k)} is not supported by the away-from-turning-point bounds")
        for branch in (j, k):
            if not _airy_sector_ok(u, p.zeta_arg, branch):
                raise DomainError(f"u^(2/3)ζ outside the sector of Ai_{branch}")

        E = model.ehat_values(z, n - 1, p.w)
        table = airy_seq_table(max(n, 2))
        xi = p.xi
        sE = [E[s - 1] + (-1) ** s * _q(table.a[s - 1]) / (s * xi ** s) for s in range(1, n)]
        sEt = [E[s - 1] + (-1) ** s * _q(table.a_tilde[s - 1]) / (s * xi ** s) for s in range(1, n)]

        A_val = p.zeta_over_f_q() * _exp_cosh(sEt, u, m, mp.cosh)
        B_pref = 1 / (u ** (mpf(1) / 3) * p.zeta_f_q())
        B_val = B_pref * _exp_cosh(sE, u, m, mp.sinh)

        conn = model.connection(u, n)
        terms = {}
        for jj in (j, k):
            key = (z, jj, n)
            if cache is not None and key in cache:
                terms[jj] = cache[key]
            else:
                terms[jj] = lg_bound_terms(model, z, jj, n, None, ctx, u=u)
                if cache is not None:
                    cache[key] = terms[jj]
        airy = bound_inputs(u, xi, n, ctx)
        e, et = {}, {}
        for jj in (j, k):
            om, vp = terms[jj].omega(u), terms[jj].varpi(u)
            d = conn.delta(jj)
            e[jj] = _e_term(u, n, d, om, vp, airy.gamma_n, airy.beta_n)
            et[jj] = _e_term(u, n, d, om, vp, airy.gamma_tilde_n, airy.beta_tilde_n)
        eps_t = _eps_bound(u, n, sEt, et[j], et[k])
        eps = _eps_bound(u, n, sE, e[j], e[k])
        A_bound = abs(p.zeta_over_f_q()) * eps_t / 2
        B_bound = abs(B_pref) * eps / 2
    with ctx.workdps():
        return (ExpansionValue(+A_val, +A_bound, m, (j, k), "A_script"),
                ExpansionValue(+B_val, +B_bound, m, (j, k), "B_script"))


def script_AB(model, z, nu, m: int, kind: str, ctx: PrecisionContext | None = None,
              guard: bool = True) -> ExpansionValue:
    kind = _norm_kind(kind)
    a, b = script_AB_pair(model, z, nu, m, ctx, guard)
    return a if kind == "A_script" else b


# ---------------------------------------------------------------------------
# Matching constant
# ---------------------------------------------------------------------------


def matching_constant_c(nu, m: int, ctx: PrecisionContext, model=None) -> tuple:
    """Midpoint and enclosure half-width of c_{m,0}(ν) in J_ν(νz) = c z^{-1/2}(Ai 𝓐 + Ai' 𝓑)."""
    model = model or BesselModel(ctx)
    n = 2 * m + 2
    with ctx.workdps(15):
        nu = mpf(nu)
        if not nu > 0:
            raise DomainError("nu must be positive")
        C = stirling_constants(max(n, 2)).C
        csum = sum(_q(C[2 * i + 1]) / nu ** (2 * i + 1) for i in range(m + 1))
        conn = model.connection(nu, n)
        terms = lg_bound_terms(model, mpc(0), -1, n, None, ctx, u=nu)
        om, vp = terms.omega(nu), terms.varpi(nu)
        e0 = nu ** n * abs(conn.delta(-1)) + om * mp.exp(vp / nu + om / nu ** n)
        lead = nu ** (-n)
        h = lead * mp.exp(csum) * e0 * (1 + e0 * lead / 2) ** 2
        E = mp.exp(-csum)
        if h >= E:
            raise DomainError("the enclosure of c_{m,0} contains a pole: ν too small for this m")
        c0 = 2 * mp.sqrt(mp.pi) * nu ** (nu - mpf(5) / 6) / (mp.exp(nu) * gamma(nu, ctx))
        mid = c0 / E
        half = c0 * h / (E * (E - h))
    with ctx.workdps():
        return +mid, +half
