"""Bounds near the turning point via Cauchy integrals around a circle.

For z inside Γ = {|t - z0| = r0}, 𝓐 and 𝓑 are Cauchy integrals of their
truncated expansions over Γ, and the errors are bounded by suprema of the
away-from-turning-point bounds on Γ times l0(z) = ∮|dt/(t - z)|.

Suprema over Γ are found by sampling plus local golden-section refinement
and then inflated by a small safety factor; they are careful estimates,
not interval enclosures.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from mpmath import mp, mpc, mpf

from .airylg import bound_inputs
from .lgbounds import ExpansionValue, _norm_kind, is_progressive
from .mpnum import (
    Adaptive,
    ArcSegment,
    ContourSpec,
    DomainError,
    FixedGauss,
    LineSegment,
    PrecisionContext,
    QuadratureError,
    RaySegment,
    elliptic_K,
    integrate_contour,
)
from .seqcoeff import airy_seq_table

__all__ = [
    "LoopData",
    "LoopDataError",
    "build_loop_data",
    "cauchy_AB",
    "l0_by_quadrature",
    "l0_kernel",
]

log = logging.getLogger(__name__)

BOUND_DIGITS = 30
_GOLD = (math.sqrt(5) - 1) / 2


class LoopDataError(ArithmeticError):
    """A supremum over Γ did not settle under refinement."""


# ---------------------------------------------------------------------------
# l0
# ---------------------------------------------------------------------------


def l0_kernel(z, z0, r0, ctx: PrecisionContext) -> mpf:
    """l0(z) = 4 r0 K(k) / (|z - z0| + r0), k = 2√(r0|z - z0|) / (|z - z0| + r0)."""
    with ctx.workdps(10):
        a = abs(mpc(z) - mpc(z0))
        r0 = mpf(r0)
        if a >= r0:
            raise DomainError(f"|z - z0| = {a} must be below r0 = {r0}")
        k = 2 * mp.sqrt(r0 * a) / (a + r0)
        val = 4 * r0 * elliptic_K(k, ctx) / (a + r0)
    with ctx.workdps():
        return +val


def l0_by_quadrature(z, z0, r0, ctx: PrecisionContext, N: int = 0) -> mpf:
    """∮|dt/(t - z)| over the circle by the periodic trapezoidal rule.

    An independent route to :func:`l0_kernel`.  With ``N=0`` the node count
    doubles until two sums agree to the working precision.
    """
    with ctx.workdps(10):
        z, z0, r0 = mpc(z), mpc(z0), mpf(r0)
        if abs(z - z0) >= r0:
            raise DomainError("z must lie inside the circle")

        def trap(n):
            acc = mpf(0)
            for k in range(n):
                t = z0 + r0 * mp.expj(2 * mp.pi * k / n)
                acc += r0 / abs(t - z)
            return 2 * mp.pi * acc / n

        if N:
            val = trap(N)
        else:
            n, prev = 64, trap(64)
            while True:
                n *= 2
                val = trap(n)
                if abs(val - prev) <= mpf(10) ** (-ctx.digits - 2) * val:
                    break
                if n > 2 ** 16:
                    raise QuadratureError("l0 trapezoid did not converge", (prev, val))
                prev = val
    with ctx.workdps():
        return +val


# ---------------------------------------------------------------------------
# Loop data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopData:
    nu: mpf
    n: int
    r0: mpf
    center: mpc
    Upsilon: mpf
    Upsilon_tilde: mpf
    rho: mpf
    M: tuple              # M_s, index 0 is s = 1
    N: tuple
    M_tilde: tuple
    N_tilde: tuple
    omega_n_loop: mpf
    varpi_n_loop: mpf
    delta_n: mpf
    e_n: mpf
    e_tilde_n: mpf
    d: mpf
    d_tilde: mpf
    paths: dict
    theta_split: tuple    # polar angles (about z0) where arg ζ = -2π/3, -π/3
    path_integrals: dict = field(default_factory=dict, compare=False, repr=False)
    safety: float = 1.01
    _cache: dict = field(default_factory=dict, compare=False, repr=False)


def _circle_point(center, r0, theta):
    t = center + r0 * mp.expj(theta)
    if abs(t.imag) < mpf(10) ** (-mp.dps + 3):
        t = mpc(t.real, 0)      # keep θ = 0, π on the real axis
    return t


def _split_angles(model, center, r0, ctx) -> tuple:
    """Angles in (0, π) where arg ζ on the upper half of Γ equals -2π/3 and -π/3."""
    def arg_at(theta):
        return model.point(_circle_point(center, r0, theta)).zeta_arg

    out = []
    for target in (-2 * mp.pi / 3, -mp.pi / 3):
        lo, hi = mpf(0), mp.pi
        g_lo = arg_at(lo + mpf(10) ** -12) - target
        g_hi = arg_at(hi) - target
        if g_lo * g_hi > 0:
            raise LoopDataError("arg ζ does not sweep the expected range on Γ")
        theta = mp.findroot(lambda th: arg_at(th) - target, (lo + mpf(10) ** -12, hi),
                            solver="anderson")
        out.append(mpf(theta))
    return tuple(out)


def _continued_values(model, points):
    """(point, ξ continued along the sequence) starting from the principal branch."""
    out = []
    prev = None
    for t in points:
        xi = model.point(t).xi
        if prev is not None and abs(-xi - prev) < abs(xi - prev):
            xi = -xi
        out.append(xi)
        prev = xi
    return out


def _arc_progressive(model, arc: ArcSegment, j: int, u, lead_in, per_segment: int = 64) -> bool:
    """Re((-1)^j u ξ) must not increase moving along ``arc`` away from the connector.

    ``lead_in`` is a point just on the connector side, fixing the branch.
    """
    sign = -1 if j % 2 else 1
    pts = [lead_in] + [arc.point(mpf(i) / (per_segment - 1)) for i in range(per_segment)]
    xis = _continued_values(model, pts)[1:]
    vals = [(sign * mpc(u) * x).real for x in xis]
    tol = mpf(10) ** -20
    return all(b <= a + tol * (1 + abs(a)) for a, b in zip(vals, vals[1:]))


def _needed_regions(theta_a) -> list:
    """(j, θ_start, θ_end) arcs of the upper half where W_j must be bounded.

    The θ_start end has the principal branch.  Regions for W_1 and the lower
    half are mirror images of these: W_0 on the (-1, 0) arcs, and W_{-1} on
    the whole upper half continued across (z0 + r0) into the (1, -1) arc.
    """
    return [(0, mp.pi, theta_a), (-1, mp.pi, -theta_a)]


def _refine_extremum(g, a, b, sense: int, iters: int = 80):
    """Golden-section location of a max (sense=1) or min (sense=-1) of g on [a, b]."""
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = sense * g(c), sense * g(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = sense * g(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = sense * g(d)
        if abs(b - a) < mpf(10) ** -15:
            break
    return (a + b) / 2


def _monotone_pieces(model, center, r0, j: int, th0, th1, u, samples: int = 361) -> list:
    """Split the arc θ0 -> θ1 at the extrema of Re((-1)^j u ξ), ξ continued from θ0.

    Returns (θ_high, θ_low) pairs: along each piece the value falls from the
    θ_high end to the θ_low end.
    """
    sign = -1 if j % 2 else 1
    thetas = [th0 + (th1 - th0) * mpf(i) / (samples - 1) for i in range(samples)]
    pts = [_circle_point(center, r0, th) for th in thetas]
    xis = _continued_values(model, pts)
    vals = [(sign * u * x).real for x in xis]

    def g_near(i):
        ref = xis[i]

        def g(th):
            xi = model.point(_circle_point(center, r0, th)).xi
            if abs(-xi - ref) < abs(xi - ref):
                xi = -xi
            return (sign * u * xi).real
        return g

    cuts = [th0]
    for i in range(1, samples - 1):
        is_max = vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1]
        is_min = vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]
        if is_max or is_min:
            cuts.append(_refine_extremum(g_near(i), thetas[i - 1], thetas[i + 1], 1 if is_max else -1))
    cuts.append(th1)
    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        ga = g_near(0 if a == th0 else thetas.index(min(thetas, key=lambda t: abs(t - a))))(a)
        gb = g_near(thetas.index(min(thetas, key=lambda t: abs(t - b))))(b)
        pieces.append((a, b) if ga >= gb else (b, a))
    return pieces


def _gamma_paths(model, center, r0, theta_a, u) -> dict:
    """Progressive paths covering Γ: an arc piece followed by a connector to z^{(j)}.

    Keys are (j, index); values are (connector, arc) with the arc running from
    the junction on Γ away from the connector.
    """
    paths = {}
    for j, th0, th1 in _needed_regions(theta_a):
        for idx, (high, low) in enumerate(_monotone_pieces(model, center, r0, j, th0, th1, u)):
            junction = _circle_point(center, r0, high)
            if junction.imag < 0 or (junction.imag == 0 and junction.real > 1):
                raise LoopDataError(f"junction for W_{j} falls on the continued branch")
            conn = None
            for cand in model.candidate_paths(junction, j):
                if is_progressive(model, cand, j, u):
                    conn = cand
                    break
            if conn is None:
                raise LoopDataError(f"no progressive connector for W_{j} at {junction}")
            arc = ArcSegment(center, r0, high, low)
            lead = conn.segments[0].point(mpf(1) / 1000)
            if not _arc_progressive(model, arc, j, u, lead):
                raise LoopDataError(f"arc piece {idx} for W_{j} is not progressive")
            paths[(j, idx)] = (conn, arc)
    return paths


def _product_integrand(model, n: int):
    """|F̂_{s+1} f^{1/2}| for s < n, then |F̂_k F̂_{s+n-k-1} f^{1/2}| for 1 <= s <= k <= n-1."""
    def f(t):
        F = [None] + list(model.fhat_values(t, n))
        fh = model.f_half(t)
        out = [F[s + 1] * fh for s in range(n)]
        for s in range(1, n):
            for k in range(s, n):
                out.append(F[k] * F[s + n - k - 1] * fh)
        return out
    return f


def _path_vector(model, conn: ContourSpec, arc: ArcSegment, n: int, ctx) -> list:
    f = _product_integrand(model, n)
    total = None
    for seg in list(conn.segments) + [arc]:
        mode = Adaptive(tol=1e-10) if isinstance(seg, (RaySegment, ArcSegment)) else FixedGauss(30)
        part = integrate_contour(f, ContourSpec((seg,)), mode, ctx)
        total = part if total is None else [a + b for a, b in zip(total, part)]
    return total


def _loop_omega(vectors: list, n: int, u) -> tuple:
    """ω_n(u), ϖ_n(u) from per-path component integrals (componentwise maxima)."""
    au = abs(mpc(u))
    best = [max(v[i] for v in vectors) for i in range(len(vectors[0]))]
    single = best[:n]
    prods = best[n:]
    omega = 2 * single[n - 1]
    idx = 0
    for s in range(1, n):
        acc = mpf(0)
        for _k in range(s, n):
            acc += prods[idx]
            idx += 1
        omega += acc / au ** s
    varpi = 4 * sum(single[s] / au ** s for s in range(n - 1))
    return omega, varpi


def _sample_quantities(model, t, n: int):
    """Values whose extrema over Γ enter the loop bounds at one point t."""
    p = model.point(t)
    E = model.ehat_values(t, n - 1, p.w)
    table = airy_seq_table(max(n, 2))
    xi = p.xi
    out = {}
    for s in range(1, n):
        tail = (-1) ** s / (s * xi ** s)
        e = E[s - 1] + tail * mpf(table.a[s - 1].numerator) / table.a[s - 1].denominator
        et = E[s - 1] + tail * mpf(table.a_tilde[s - 1].numerator) / table.a_tilde[s - 1].denominator
        out[("M", s)] = e.real
        out[("N", s)] = ((-1) ** s * e).real
        out[("Mt", s)] = et.real
        out[("Nt", s)] = ((-1) ** s * et).real
    out["Upsilon"] = -abs(p.zeta_f_q())          # negated: all entries are maximised
    out["Upsilon_tilde"] = abs(p.zeta_over_f_q())
    out["rho"] = -abs(xi)
    return out


def _golden_max(func, a, b, ref, rel: float = 1e-6, max_iter: int = 200):
    """Maximise ``func`` on [a, b]; returns the best value seen (at least ``ref``)."""
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = func(c), func(d)
    best = max(ref, fc, fd)
    last = best
    for it in range(max_iter):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = func(d)
        best = max(best, fc, fd)
        if it > 8 and abs(best - last) <= rel * (abs(best) + mpf(10) ** -30) and b - a < mpf(10) ** -8:
            return best
        last = best
    raise LoopDataError("golden-section refinement of a supremum did not settle")


def _circle_extrema(model, center, r0, n: int, samples: int, ctx) -> dict:
    thetas = [2 * mp.pi * k / samples for k in range(samples)]
    table = [_sample_quantities(model, _circle_point(center, r0, th), n) for th in thetas]
    keys = list(table[0].keys())
    out = {}
    step = 2 * mp.pi / samples
    for key in keys:
        vals = [row[key] for row in table]
        order = sorted(range(samples), key=lambda i: vals[i], reverse=True)
        best = vals[order[0]]
        # refine around the three best local peaks
        peaks = []
        for i in order:
            if vals[i] >= vals[i - 1] and vals[i] >= vals[(i + 1) % samples]:
                peaks.append(i)
            if len(peaks) == 3:
                break
        for i in peaks:
            def func(th, key=key):
                return _sample_quantities(model, _circle_point(center, r0, th), n)[key]
            best = max(best, _golden_max(func, thetas[i] - step, thetas[i] + step, vals[i]))
        out[key] = best
    return out


def _inflate(x, safety):
    """Push a sampled supremum up by the relative safety margin."""
    return x + (safety - 1) * abs(x)


def build_loop_data(model, nu, n: int, r0=0.5, ctx: PrecisionContext | None = None,
                    samples: int = 720, safety: float = 1.01, path_integrals: dict | None = None
                    ) -> LoopData:
    """Everything the Cauchy-loop bounds need for one (ν, n, r0).

    ``path_integrals`` may carry the ν-independent per-path integrals from
    an earlier call with the same n and r0.
    """
    ctx = ctx or model.ctx
    bctx = ctx.with_digits(min(ctx.digits, BOUND_DIGITS))
    with bctx.workdps(5):
        u = mpf(nu)
        r0 = mpf(r0)
        center = mpc(model.z0)
        if not (0 < r0 < abs(center)):
            raise DomainError("Γ must stay clear of the pole at the origin")
        theta_a, theta_b = _split_angles(model, center, r0, bctx)
        gp = _gamma_paths(model, center, r0, theta_a, u)
        if path_integrals is None or path_integrals.get("n") != n or path_integrals.get("r0") != r0:
            vectors = {key: _path_vector(model, conn, arc, n, bctx) for key, (conn, arc) in gp.items()}
            path_integrals = {"n": n, "r0": r0, "vectors": vectors}
        omega, varpi = _loop_omega(list(path_integrals["vectors"].values()), n, u)
        omega, varpi = _inflate(omega, safety), _inflate(varpi, safety)

        ext = _circle_extrema(model, center, r0, n, samples, bctx)
        M = tuple(_inflate(ext[("M", s)], safety) for s in range(1, n))
        N = tuple(_inflate(ext[("N", s)], safety) for s in range(1, n))
        Mt = tuple(_inflate(ext[("Mt", s)], safety) for s in range(1, n))
        Nt = tuple(_inflate(ext[("Nt", s)], safety) for s in range(1, n))
        Upsilon = -ext["Upsilon"] / safety
        Upsilon_tilde = ext["Upsilon_tilde"] * safety
        rho = -ext["rho"] / safety
        if not (rho > 0 and Upsilon > 0):
            raise LoopDataError("ρ and Υ must be positive on Γ")

        conn = model.connection(u, n)
        delta_n = max(abs(conn.delta(1)), abs(conn.delta(-1)))
        airy = bound_inputs(u, rho, n, bctx)

        def e_of(g, b):
            return u ** n * delta_n + omega * mp.exp(varpi / u + omega / u ** n) + \
                g * mp.exp(b / u + g / u ** n)

        e_n = e_of(airy.gamma_n, airy.beta_n)
        e_tilde = e_of(airy.gamma_tilde_n, airy.beta_tilde_n)

        def d_of(Ms, Ns, e):
            grow = mp.exp(sum(Ms[s - 1] / u ** s for s in range(1, n))) + \
                mp.exp(sum(Ns[s - 1] / u ** s for s in range(1, n)))
            return grow * e * (1 + e / (2 * u ** n)) ** 2

        d = d_of(M, N, e_n)
        d_tilde = d_of(Mt, Nt, e_tilde)
        paths = {}
        for (j, idx), (cpath, arc) in gp.items():
            rev = ArcSegment(arc.center, arc.radius, arc.theta1, arc.theta0)
            paths[(j, idx, "upper")] = ContourSpec((rev,) + cpath.segments)
            mirrored = [ArcSegment(mp.conj(rev.center), rev.radius, -rev.theta0, -rev.theta1)]
            for seg in cpath.segments:
                if isinstance(seg, LineSegment):
                    mirrored.append(LineSegment(mp.conj(seg.a), mp.conj(seg.b)))
                else:
                    mirrored.append(RaySegment(mp.conj(seg.start_point), mp.conj(seg.direction)))
            paths[(-j, idx, "lower")] = ContourSpec(tuple(mirrored))
    return LoopData(u, n, r0, center, Upsilon, Upsilon_tilde, rho, M, N, Mt, Nt,
                    omega, varpi, delta_n, e_n, e_tilde, d, d_tilde, paths,
                    (theta_a, theta_b), path_integrals, safety)


# ---------------------------------------------------------------------------
# Cauchy integrals
# ---------------------------------------------------------------------------


def _node_value(model, loop: LoopData, t, m: int, kind: str, flip: bool):
    """Truncated 𝓐 (times (ζ/f)^{1/4}) or 𝓑 integrand numerator at t.

    ``flip`` selects the other branch of ξ (and of √(1-t²)); the integrands
    are even under that change, which is what makes them single-valued.
    """
    p = model.point(t)
    n = 2 * m + 2
    sgn = -1 if flip else 1
    E = model.ehat_values(t, n - 1, sgn * p.w)
    table = airy_seq_table(max(n, 2))
    seq = table.a_tilde if kind == "A_script" else table.a
    xi = sgn * p.xi
    terms = []
    for s in range(1, n):
        e = E[s - 1] + (-1) ** s * mpf(seq[s - 1].numerator) / seq[s - 1].denominator / (s * xi ** s)
        terms.append(e)
    u = loop.nu
    even = sum(terms[2 * s - 1] / u ** (2 * s) for s in range(1, m + 1))
    odd = sum(terms[2 * s] / u ** (2 * s + 1) for s in range(0, m + 1))
    if kind == "A_script":
        return mp.exp(even) * mp.cosh(odd) * p.zeta_over_f_q()
    return mp.exp(even) * mp.sinh(odd) / (p.zeta_over_f_q() * sgn * p.w / t)


def _trapezoid(model, loop: LoopData, z, m: int, kind: str, N: int, start) -> mpc:
    """(1/2πi)∮ h(t) dt/(t - z) with N nodes starting at angle ``start``."""
    acc = mpc(0)
    two_pi = 2 * mp.pi
    for k in range(N):
        phi = start + two_pi * k / N
        # the branch is continued from the start node; it flips once the walk
        # passes the crossing of Γ with (z0 + r0) on the real axis
        crossed = mp.floor(phi / two_pi) > mp.floor(start / two_pi)
        key = (kind, m, mp.nstr(phi % two_pi, 25), crossed)
        val = loop._cache.get(key)
        if val is None:
            t = loop.center + loop.r0 * mp.expj(phi)
            flip = crossed
            val = _node_value(model, loop, t, m, kind, flip)
            loop._cache[key] = val
        w = loop.r0 * mp.expj(phi)
        acc += val * w / (loop.center + w - z)
    return acc / N


def cauchy_AB(model, z, nu, m: int, kind: str, loop: LoopData, ctx: PrecisionContext | None = None,
              start=0, max_nodes: int = 8192) -> ExpansionValue:
    """𝓐 or 𝓑 near the turning point by the Cauchy loop, with the κ bound."""
    kind = _norm_kind(kind)
    ctx = ctx or model.ctx
    n = 2 * m + 2
    if loop.n != n:
        raise ValueError(f"loop data built for n = {loop.n}, need {n}")
    if mpf(nu) != loop.nu:
        raise ValueError("loop data built for a different ν")
    with ctx.workdps(10):
        z = mpc(z)
        a = abs(z - loop.center)
        if a > mpf("0.8") * loop.r0:
            raise DomainError(f"|z - z0| = {float(a):.3g} exceeds 0.8 r0")
        start = mpf(start)
        N = 64
        prev = _trapezoid(model, loop, z, m, kind, N, start)
        tol = mpf(10) ** (-ctx.digits - 2)
        while True:
            N *= 2
            val = _trapezoid(model, loop, z, m, kind, N, start)
            if abs(val - prev) <= tol * max(abs(val), mpf(10) ** -ctx.digits):
                break
            if N >= max_nodes:
                raise QuadratureError("Cauchy trapezoid did not converge", (prev, val))
            prev = val
        u = loop.nu
        l0 = l0_kernel(z, loop.center, loop.r0, ctx)
        if kind == "A_script":
            kappa = loop.Upsilon_tilde * loop.d_tilde * l0 / (2 * mp.pi * u ** n)
            bound = kappa / 2
        else:
            val = val / u ** (mpf(1) / 3)
            kappa = loop.d * l0 / (2 * mp.pi * loop.Upsilon * u ** n)
            bound = kappa / (2 * u ** (mpf(1) / 3))
    with ctx.workdps():
        return ExpansionValue(+val, +bound, m, ("loop", 0), kind)
