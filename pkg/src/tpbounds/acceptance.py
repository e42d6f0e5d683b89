"""Acceptance suites shared by the test-suite and the command line.

Each suite returns a :class:`SuiteResult` with a pass flag and a small
JSON-friendly detail dictionary.  Expensive objects (the Bessel model, the
path integrals behind the bounds, loop data) are cached on a
:class:`Workspace` so several suites can share them.
"""

from __future__ import annotations

import logging
import random
import statistics
import time
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp, mpc, mpf

from . import oracle
from .airylg import airy_lg
from .besselmap import BesselModel, ehat_coefficients
from .lgbounds import lg_solution_W, script_AB_pair
from .mpnum import PrecisionContext
from .seqcoeff import (
    airy_exp_series,
    airy_poincare_uv,
    airy_seq_table,
    bernoulli_numbers,
    lambda_exact,
    lemma_l2_holds,
    stirling_constants,
)
from .tploop import build_loop_data, cauchy_AB, l0_by_quadrature, l0_kernel

__all__ = ["SUITES", "SuiteResult", "Workspace", "default_grid", "figure_rows", "run_suite"]

log = logging.getLogger(__name__)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: dict
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return {"suite": self.name, "passed": self.passed, "seconds": round(self.seconds, 2),
                "detail": self.detail}


@dataclass
class Workspace:
    """Shared state: one model per precision plus caches keyed by (ν, n, r0)."""

    digits: int = 80
    models: dict = field(default_factory=dict)
    terms: dict = field(default_factory=dict)
    loops: dict = field(default_factory=dict)
    path_integrals: dict = field(default_factory=dict)

    def model(self, digits: int | None = None) -> BesselModel:
        d = digits or self.digits
        if d not in self.models:
            self.models[d] = BesselModel(PrecisionContext(d))
        return self.models[d]

    def loop(self, nu, n: int, r0, digits: int | None = None):
        key = (_num(nu), n, _num(r0))
        if key not in self.loops:
            model = self.model(digits)
            pi = self.path_integrals.get((n, _num(r0)))
            data = build_loop_data(model, _num(nu), n, _num(r0), model.ctx, path_integrals=pi)
            self.path_integrals[(n, _num(r0))] = data.path_integrals
            self.loops[key] = data
        return self.loops[key]


def _f(x) -> float:
    return float(x)


def _q(x) -> mpf:
    return mpf(x.numerator) / x.denominator


def _num(x):
    """mpf/mpc from int, float, complex, str or Fraction (mpmath rejects Fraction)."""
    if isinstance(x, Fraction):
        return _q(x)
    if isinstance(x, complex):
        return mpc(x.real, x.imag)
    return mpf(x)


# ---------------------------------------------------------------------------
# Figure data
# ---------------------------------------------------------------------------


def default_grid() -> list:
    return [Fraction(i, 20) for i in range(1, 16)]


def _section4_ok(z, r0) -> bool:
    return abs(mpc(z) - 1) <= mpf("0.8") * _num(r0)


def figure_point(ws: Workspace, z, nu, m: int, mode: str, r0=Fraction(1, 2)) -> dict:
    """One grid point: values, bounds, true errors and ratios for 𝓐 and 𝓑."""
    model = ws.model()
    ctx = model.ctx
    t0 = time.perf_counter()
    with ctx.workdps():
        zc = mpc(_num(z))
    if mode == "section3":
        A, B = script_AB_pair(model, zc, nu, m, ctx, cache=ws.terms)
    elif mode == "section4":
        loop = ws.loop(nu, 2 * m + 2, r0)
        A = cauchy_AB(model, zc, nu, m, "A", loop, ctx)
        B = cauchy_AB(model, zc, nu, m, "B", loop, ctx)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    eA, eB = oracle.exact_AB(nu, zc, m, ctx)
    errA, errB = abs(A.value - eA), abs(B.value - eB)
    row = {
        "z_re": zc.real, "z_im": zc.imag,
        "A_value": A.value, "A_bound": A.certified_bound, "A_true_err": errA,
        "A_ratio": A.certified_bound / errA if errA else mp.inf,
        "B_value": B.value, "B_bound": B.certified_bound, "B_true_err": errB,
        "B_ratio": B.certified_bound / errB if errB else mp.inf,
        "mode": mode,
    }
    row["seconds"] = time.perf_counter() - t0
    return row


def modes_for(z, mode: str, r0) -> list:
    """Which evaluation modes apply at z for the requested mode."""
    zc = complex(z)
    near = _section4_ok(zc, r0)
    far = not (zc.imag == 0 and zc.real >= 1)
    if mode == "section3":
        return ["section3"] if far else []
    if mode == "section4":
        return ["section4"] if near else []
    return [m for m, ok in (("section3", far), ("section4", near)) if ok]


def figure_rows(ws: Workspace, nu, m: int, grid, mode: str = "section3", r0=Fraction(1, 2)) -> list:
    rows = []
    for z in grid:
        for md in modes_for(z, mode, r0):
            rows.append(figure_point(ws, z, nu, m, md, r0))
    return rows


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def suite_rational_identities(ws: Workspace) -> SuiteResult:
    t = airy_seq_table(12)
    ok_seeds = t.a[:2] == (Fraction(5, 72),) * 2 and t.a_tilde[:2] == (Fraction(-7, 72),) * 2
    # exp-form against the classical u_k, v_k (in powers of 1/ξ)
    u, v = airy_poincare_uv(8)
    ser_a = airy_exp_series(t.a, 8)
    ser_t = airy_exp_series(t.a_tilde, 8)
    ok_uv = all(ser_a[k] == (-1) ** k * u[k] and ser_t[k] == (-1) ** k * v[k] for k in range(9))
    # Stirling constants against Bernoulli numbers
    C = stirling_constants(9).C
    B = bernoulli_numbers(10)
    ok_C = C[1] == Fraction(1, 12) and C[2] == 0 and C[3] == Fraction(-1, 360)
    ok_C = ok_C and all(C[2 * j - 1] == B[2 * j] / (2 * j * (2 * j - 1)) for j in range(1, 5))
    E = ehat_coefficients(9)
    ok_E = all(E[s - 1].value_at_zero() == C[s] for s in range(1, 10))
    detail = {"seeds": ok_seeds, "poincare_k_le_8": ok_uv, "stirling": ok_C, "ehat_at_zero": ok_E}
    return SuiteResult("rational-identities", all(detail.values()), detail)


def suite_airy_bounds(ws: Workspace) -> SuiteResult:
    ctx = PrecisionContext(40)
    violations, worst, count = [], 0.0, 0
    for uu in (5, 10, 50):
        for r in (Fraction(1, 2), 1, 2, 5):
            for ang in (0, Fraction(2, 3), Fraction(95, 100)):
                with ctx.workdps(20):
                    xi = _num(r) * mp.expj(mp.pi * _num(ang))
                    zeta = (3 * xi / 2) ** (mpf(2) / 3)
                    zarg = mp.arg(zeta)
                    x = mpf(uu) ** (mpf(2) / 3) * zeta
                for which in ("Ai", "Aip"):
                    exact = oracle.airy(x, which, ctx).value
                    for n in (3, 6, 9):
                        res = airy_lg(uu, xi, n, which, 0, ctx, zeta=zeta, zeta_arg=zarg)
                        with ctx.workdps():
                            eta = abs(exact / res.value - 1)
                        count += 1
                        q = _f(eta / res.bound) if res.bound else float("inf")
                        worst = max(worst, q)
                        if eta > res.bound:
                            violations.append([uu, float(r), f"{ang}pi", which, n])
    detail = {"points": count, "violations": violations, "max_eta_over_bound": worst}
    return SuiteResult("airy-bounds", not violations, detail)


def _figure_check(ws: Workspace, nu, m: int = 5) -> dict:
    rows = figure_rows(ws, nu, m, default_grid(), "section3")
    bad = [_f(r["z_re"]) for r in rows
           if r["A_true_err"] > r["A_bound"] or r["B_true_err"] > r["B_bound"]]
    medA = statistics.median(_f(r["A_ratio"]) for r in rows)
    medB = statistics.median(_f(r["B_ratio"]) for r in rows)
    return {"nu": nu, "violations": bad, "median_A_ratio": medA, "median_B_ratio": medB,
            "A_band_ok": medA <= 1e3, "B_band_ok": medB <= 1e2 * nu,
            "max_row_seconds": max(_f(r["seconds"]) for r in rows)}


def suite_bound_validity(ws: Workspace) -> SuiteResult:
    d100 = _figure_check(ws, 100)
    d10 = _figure_check(ws, 10)
    hard = not d100["violations"] and not d10["violations"]
    soft = all(d[k] for d in (d100, d10) for k in ("A_band_ok", "B_band_ok"))
    detail = {"nu100": d100, "nu10": d10, "hard_validity": hard, "ratio_bands": soft}
    return SuiteResult("bound-validity", hard and soft, detail)


def suite_order_checks(ws: Workspace) -> SuiteResult:
    model = ws.model()
    ctx = model.ctx
    lo, hi = 2 ** 11, 2 ** 13
    out = {}
    for z in (Fraction(3, 10), Fraction(1, 2)):
        a50, b50 = script_AB_pair(model, _num(z), 50, 5, ctx, cache=ws.terms)
        a100, b100 = script_AB_pair(model, _num(z), 100, 5, ctx, cache=ws.terms)
        out[f"A_ratio_z{float(z)}"] = _f(a50.certified_bound / a100.certified_bound)
        out[f"B_ratio_z{float(z)}"] = _f(b50.certified_bound / b100.certified_bound)
    L50, L100 = ws.loop(50, 12, Fraction(1, 2)), ws.loop(100, 12, Fraction(1, 2))
    for kind in ("A", "B"):
        k50 = cauchy_AB(model, 1, 50, 5, kind, L50, ctx).certified_bound
        k100 = cauchy_AB(model, 1, 100, 5, kind, L100, ctx).certified_bound
        out[f"kappa_{kind}_ratio"] = _f(k50 / k100)
    ok = all(lo <= v <= hi for v in out.values())
    out["band"] = [lo, hi]
    return SuiteResult("order-checks", ok, out)


def suite_l0_identity(ws: Workspace) -> SuiteResult:
    ctx = PrecisionContext(30)
    rng = random.Random(20240531)
    worst = mpf(0)
    z0, r0 = mpc(1), mpf("0.5")
    for _ in range(10):
        rad = r0 * mpf(rng.uniform(0.0, 0.9))
        th = mpf(rng.uniform(0, 6.283185307179586))
        z = z0 + rad * mp.expj(th)
        a = l0_kernel(z, z0, r0, ctx)
        b = l0_by_quadrature(z, z0, r0, ctx)
        worst = max(worst, abs(a - b) / b)
    with ctx.workdps():
        centre = abs(l0_kernel(z0, z0, r0, ctx) - 2 * mp.pi)
    ok = worst <= mpf(10) ** -12 and centre <= mpf(10) ** (-ctx.digits + 2)
    return SuiteResult("l0-identity", ok, {"max_rel_err": _f(worst), "centre_err": _f(centre)})


def suite_turning_point(ws: Workspace) -> SuiteResult:
    model = ws.model()
    ctx = model.ctx
    loop = ws.loop(100, 12, Fraction(1, 2))
    rows, bad = [], []
    for z in (1, Fraction(8, 10), Fraction(12, 10), Fraction(65, 100), Fraction(135, 100)):
        eA, eB = oracle.exact_AB(100, _num(z), 5, ctx)
        for kind, exact in (("A", eA), ("B", eB)):
            v = cauchy_AB(model, _num(z), 100, 5, kind, loop, ctx)
            err = abs(v.value - exact)
            rows.append([float(z), kind, _f(err), _f(v.certified_bound)])
            if err > v.certified_bound:
                bad.append([float(z), kind])
    A3, B3 = script_AB_pair(model, mpf("0.7"), 100, 5, ctx, cache=ws.terms)
    overlap = []
    for kind, s3 in (("A", A3), ("B", B3)):
        s4 = cauchy_AB(model, mpf("0.7"), 100, 5, kind, loop, ctx)
        diff = abs(s3.value - s4.value)
        tol = s3.certified_bound + s4.certified_bound
        overlap.append([kind, _f(diff), _f(tol)])
        if diff > tol:
            bad.append([0.7, kind, "overlap"])
    return SuiteResult("turning-point", not bad, {"loop_points": rows, "overlap": overlap,
                                                  "violations": bad})


def suite_connection(ws: Workspace) -> SuiteResult:
    model = ws.model(50)
    ctx = model.ctx
    nu, n = 50, 8
    conn = model.connection(nu, n)
    out = []
    ok = True
    for z in (mpc("0.4"), mpc("0.5", "0.3")):
        W = {j: lg_solution_W(model, z, j, n, nu, ctx) for j in (-1, 0, 1)}
        lam_m, lam_p = conn.lambda_minus, conn.lambda_plus
        resid = abs(lam_m * W[-1].value - 1j * W[0].value - lam_p * W[1].value)
        bound = lam_m * abs(W[-1].value) * W[-1].eta_bound + abs(W[0].value) * W[0].eta_bound + \
            lam_p * abs(W[1].value) * W[1].eta_bound
        out.append([str(complex(z)), _f(resid), _f(bound)])
        ok = ok and resid <= bound
    return SuiteResult("connection", ok, {"points": out})


def suite_properties(ws: Workspace) -> SuiteResult:
    rng = random.Random(7)
    lemma_ok = True
    for _ in range(10_000):
        b, c, d = (Fraction(rng.randint(0, 10 ** 6), rng.randint(1, 10 ** 4)) for _ in range(3))
        if not lemma_l2_holds(b, c, d):
            lemma_ok = False
            break
    ctx = PrecisionContext(40)
    lam_ok = True
    with ctx.workdps(10):
        for p in range(2, 65):
            q, k = lambda_exact(p)
            if not _q(q) * mp.pi ** (mpf(k) / 2) > mpf(1) / (p - 1):
                lam_ok = False
    tol = mpf(10) ** (-ctx.digits + 5)
    checks = {}
    with ctx.workdps(10):
        nu, x = mpf(10), mpf(4)
        J = lambda v: oracle.bessel_J(v, x, ctx).value
        H = lambda v: oracle.bessel_H1(v, x, ctx).value
        Jp = (J(nu - 1) - J(nu + 1)) / 2
        Hp = (H(nu - 1) - H(nu + 1)) / 2
        wr = J(nu) * Hp - Jp * H(nu)
        checks["wronskian"] = _f(abs(wr / (2j / (mp.pi * x)) - 1))
        rng2 = random.Random(11)
        rec = mpf(0)
        for _ in range(5):
            v = mpf(rng2.uniform(1.5, 20))
            xx = mpc(rng2.uniform(0.5, 30), rng2.uniform(-5, 5))
            a = oracle.bessel_J(v - 1, xx, ctx).value + oracle.bessel_J(v + 1, xx, ctx).value
            b = 2 * v / xx * oracle.bessel_J(v, xx, ctx).value
            rec = max(rec, abs(a - b) / max(abs(b), abs(a)))
        checks["recurrence"] = _f(rec)
        xa = mpc(2, 1)
        rot = 1j * oracle.airy(xa, "Ai", ctx).value + \
            mp.expj(-mp.pi / 6) * oracle.airy_rotated(xa, "Ai", 1, ctx).value - \
            mp.expj(mp.pi / 6) * oracle.airy_rotated(xa, "Ai", -1, ctx).value
        checks["airy_rotation"] = _f(abs(rot))
    oracle_ok = all(v <= tol for v in checks.values())
    detail = {"lemma_triples": lemma_ok, "lambda_p": lam_ok, "oracle": checks}
    return SuiteResult("properties", lemma_ok and lam_ok and oracle_ok, detail)


SUITES = {
    "rational-identities": suite_rational_identities,
    "airy-bounds": suite_airy_bounds,
    "bound-validity": suite_bound_validity,
    "order-checks": suite_order_checks,
    "l0-identity": suite_l0_identity,
    "turning-point": suite_turning_point,
    "connection": suite_connection,
    "properties": suite_properties,
}


def run_suite(name: str, ws: Workspace | None = None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(name)
    ws = ws or Workspace()
    t0 = time.perf_counter()
    res = SUITES[name](ws)
    res.seconds = time.perf_counter() - t0
    return res
