"""Exponential-form LG expansions of Ai, Ai' and their rotations, with bounds.

For |arg(u^{2/3} ζ)| <= 2π/3,

    Ai(u^{2/3} ζ)  = exp(-uξ + Σ_{s<n} (-1)^s a_s / (s u^s ξ^s)) / (2 √π u^{1/6} ζ^{1/4}) · (1 + η)
    Ai'(u^{2/3} ζ) = -u^{1/6} ζ^{1/4} exp(... ã_s ...) / (2 √π) · (1 + η̃)

with ξ = (2/3) ζ^{3/2}.  The rotated functions Ai_{±1}(x) = Ai(x e^{∓2πi/3})
have the same form with ξ -> -ξ and an extra phase e^{±πi/6}.  Derivatives of
rotated functions are taken with respect to x, i.e. Ai'_{±1}(x) means
d/dx Ai(x e^{∓2πi/3}).

Arguments of ζ are passed explicitly where the branch matters (negative real
ζ can carry arg π or -π).
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .mpnum import ContourSpec, DomainError, PrecisionContext, RaySegment
from .seqcoeff import airy_seq_table, lambda_cap

__all__ = [
    "AiryBoundInputs",
    "AiryExpansionResult",
    "airy_lg",
    "appendix_path",
    "bound_inputs",
    "eta_bound",
    "lambda_two_case",
]


@dataclass(frozen=True)
class AiryBoundInputs:
    gamma_n: mpf
    beta_n: mpf
    gamma_tilde_n: mpf
    beta_tilde_n: mpf

    def __post_init__(self):
        for name in ("gamma_n", "beta_n", "gamma_tilde_n", "beta_tilde_n"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class AiryExpansionResult:
    value: mpc
    bound: mpf
    n: int
    branch: int
    which: str


def _frac(q) -> mpf:
    return mpf(q.numerator) / q.denominator


def bound_inputs(u, xi, n: int, ctx: PrecisionContext) -> AiryBoundInputs:
    """γ_n, β_n and their tilde versions; they depend on |u| and |ξ| only."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    with ctx.workdps(10):
        au, ax = abs(mpc(u)), abs(mpc(xi))
        if ax == 0:
            raise DomainError("bound_inputs is singular at ξ = 0")
        table = airy_seq_table(max(n, 2))
        a = [None] + [_frac(q) for q in table.a]
        at = [None] + [abs(_frac(q)) for q in table.a_tilde]
        lam = {p: lambda_cap(p, ctx) for p in range(2, 2 * n + 1)}
        aux = au * ax

        def gamma_like(c):
            head = 2 * c[n] * lam[n + 1] / ax ** n
            tail = mpf(0)
            for s in range(n - 1):
                inner = sum(c[k] * c[s + n - k] for k in range(s + 1, n))
                tail += lam[n + s + 2] / aux ** s * inner
            return head + tail / (au * ax ** (n + 1))

        def beta_like(c):
            return 4 / ax * sum(c[s + 1] * lam[s + 2] / aux ** s for s in range(n - 1))

        out = AiryBoundInputs(gamma_like(a), beta_like(a), gamma_like(at), beta_like(at))
    with ctx.workdps():
        return AiryBoundInputs(+out.gamma_n, +out.beta_n, +out.gamma_tilde_n, +out.beta_tilde_n)


def eta_bound(gamma_n, beta_n, u, n: int) -> mpf:
    """|u|^{-n} γ exp(|u|^{-1} β + |u|^{-n} γ)."""
    au = abs(mpc(u))
    g = mpf(gamma_n) / au ** n
    return g * mp.exp(mpf(beta_n) / au + g)


def _zeta_polar(xi, zeta, zeta_arg):
    """(|ζ|, arg ζ) consistent with ξ = (2/3) ζ^{3/2}."""
    if zeta is None:
        xi = mpc(xi)
        r = (3 * abs(xi) / 2) ** (mpf(2) / 3)
        return r, 2 * mp.arg(xi) / 3
    zeta = mpc(zeta)
    arg = mp.arg(zeta) if zeta_arg is None else mpf(zeta_arg)
    return abs(zeta), arg


def airy_lg(u, xi, n: int, which: str, j: int, ctx: PrecisionContext,
            zeta=None, zeta_arg=None) -> AiryExpansionResult:
    """Expansion of Ai_j or Ai'_j at u^{2/3} ζ truncated after n-1 terms.

    ``which`` is "Ai" or "Aip".  If ``zeta`` is omitted it is recovered from
    ξ with the principal branch.
    """
    if which not in ("Ai", "Aip"):
        raise ValueError(f"which must be 'Ai' or 'Aip', got {which!r}")
    if j not in (-1, 0, 1):
        raise ValueError(f"branch must be -1, 0 or 1, got {j}")
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    with ctx.workdps(15):
        u = mpc(u)
        xi = mpc(xi)
        if xi == 0:
            raise DomainError("the Airy LG expansion is singular at ξ = 0")
        r, arg = _zeta_polar(xi, zeta, zeta_arg)
        phi = 2 * mp.arg(u) / 3 + arg - j * 2 * mp.pi / 3
        if abs(phi) > 2 * mp.pi / 3 * (1 + mpf(10) ** -20):
            raise DomainError(f"u^(2/3) ζ lies outside the sector of Ai_{j} (phase {phi})")
        zeta_q = r ** (mpf(1) / 4) * mp.expj(arg / 4)
        u6 = u ** (mpf(1) / 6)
        table = airy_seq_table(max(n, 2))
        seq = table.a if which == "Ai" else table.a_tilde
        sign = -1 if j == 0 else 1
        expo = sign * u * xi
        uxi = u * xi
        p = mpc(1)
        for s in range(1, n):
            p *= uxi
            expo += (sign ** s) * _frac(seq[s - 1]) / (s * p)
        phase = mp.expj(j * mp.pi / 6)
        half_rt_pi = 2 * mp.sqrt(mp.pi)
        if which == "Ai":
            pref = phase / (half_rt_pi * u6 * zeta_q)
        else:
            pref = phase * u6 * zeta_q / half_rt_pi
            if j == 0:
                pref = -pref
        value = pref * mp.exp(expo)
        inputs = bound_inputs(u, xi, n, ctx)
        if which == "Ai":
            bound = eta_bound(inputs.gamma_n, inputs.beta_n, u, n)
        else:
            bound = eta_bound(inputs.gamma_tilde_n, inputs.beta_tilde_n, u, n)
    with ctx.workdps():
        return AiryExpansionResult(+value, +bound, n, j, which)


# ---------------------------------------------------------------------------
# Integration paths behind Λ_p(uξ)
# ---------------------------------------------------------------------------


def appendix_path(u, xi) -> ContourSpec:
    """Ray from ξ to ∞ along which Re(ut) increases.

    t = ξτ (τ >= 1) when Re(uξ) >= 0, else t = ξ ∓ iξτ with ± = sign of Im(uξ).
    """
    u, xi = mpc(u), mpc(xi)
    uxi = u * xi
    if uxi.real >= 0:
        return ContourSpec((RaySegment(xi, xi),))
    sgn = 1 if uxi.imag >= 0 else -1
    return ContourSpec((RaySegment(xi, -sgn * mpc(0, 1) * xi),))


def lambda_two_case(p: int, z, ctx: PrecisionContext) -> mpf:
    """Λ_p(z): 1/(p-1) when Re z >= 0, otherwise the capacity Λ_p."""
    if p < 2:
        raise DomainError(f"p must be >= 2, got {p}")
    if mpc(z).real >= 0:
        with ctx.workdps():
            return mpf(1) / (p - 1)
    return lambda_cap(p, ctx)
