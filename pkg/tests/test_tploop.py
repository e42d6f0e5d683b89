from fractions import Fraction

import pytest
from mpmath import mp, mpc, mpf

from tpbounds import oracle
from tpbounds.lgbounds import lg_bound_terms, script_AB_pair
from tpbounds.mpnum import ArcSegment, ContourSpec, DomainError, PrecisionContext
from tpbounds.tploop import (LoopData, build_loop_data, cauchy_AB, l0_by_quadrature, l0_kernel,
                             _trapezoid)

HALF = Fraction(1, 2)


@pytest.fixture(scope="module")
def loop(workspace) -> LoopData:
    return workspace.loop(100, 12, HALF)


def test_l0_at_centre():
    ctx = PrecisionContext(40)
    with ctx.workdps():
        assert abs(l0_kernel(1, 1, mpf("0.5"), ctx) - 2 * mp.pi) < mpf(10) ** -38


def test_l0_matches_quadrature():
    ctx = PrecisionContext(40)
    z = 1 + mpf("0.15")
    a = l0_kernel(z, 1, mpf("0.5"), ctx)
    b = l0_by_quadrature(z, 1, mpf("0.5"), ctx)
    assert abs(a - b) <= mpf(10) ** -12 * b


def test_l0_grows_logarithmically_at_rim():
    ctx = PrecisionContext(40)
    r0 = mpf("0.5")
    vals = {}
    with ctx.workdps():
        for e in (4, 8, 16):
            vals[e] = l0_kernel(1 + r0 - mpf(10) ** -e, 1, r0, ctx)
        for lo, hi in ((4, 8), (8, 16)):
            slope = (vals[hi] - vals[lo]) / ((hi - lo) * mp.log(10))
            assert abs(slope - 2) < 1e-3
    with pytest.raises(DomainError):
        l0_kernel(1 + r0, 1, r0, ctx)


def test_loop_constants_are_sane(loop):
    assert loop.rho > 0 and loop.Upsilon > 0
    assert loop.Upsilon <= loop.Upsilon_tilde
    assert loop.d > 0 and loop.d_tilde > 0
    assert len(loop.M) == loop.n - 1 and len(loop.N_tilde) == loop.n - 1
    assert mp.isfinite(loop.omega_n_loop) and mp.isfinite(loop.varpi_n_loop)


def _sub_paths(loop, per_piece=2):
    """(z, j, path) with z on Γ inside each upper progressive piece.

    Sub-arcs reaching below the real axis are skipped: there the loop uses
    the continued branch of ξ, which a standalone path check cannot see.
    """
    out = []
    for (j, idx, side), spec in loop.paths.items():
        if side != "upper":
            continue
        arc, rest = spec.segments[0], spec.segments[1:]
        for i in range(per_piece):
            th = arc.theta0 + (arc.theta1 - arc.theta0) * mpf(i + 1) / (per_piece + 1)
            if min(th, arc.theta1) < 0:
                continue
            part = ArcSegment(arc.center, arc.radius, th, arc.theta1)
            out.append((part.start, j, ContourSpec((part,) + tuple(rest))))
    return out


def test_pointwise_omega_below_loop_maximum(model, loop):
    u = loop.nu
    subs = _sub_paths(loop)
    assert {j for _, j, _ in subs} == {0, -1}
    for z, j, path in subs:
        t = lg_bound_terms(model, z, j, loop.n, ctx=model.ctx, u=u, path=path)
        assert t.omega(u) <= loop.omega_n_loop
        assert t.varpi(u) <= loop.varpi_n_loop


def test_circle_sampling_is_stable(workspace, loop):
    model = workspace.model()
    fine = build_loop_data(model, 100, 12, mpf("0.5"), model.ctx, samples=1440,
                           path_integrals=loop.path_integrals)
    with mp.workdps(30):
        for a, b in zip(loop.M + loop.N, fine.M + fine.N):
            assert abs(a - b) <= mpf(10) ** -6 * abs(b)
        assert abs(loop.Upsilon - fine.Upsilon) <= mpf(10) ** -6 * fine.Upsilon
        assert abs(loop.rho - fine.rho) <= mpf(10) ** -6 * fine.rho


@pytest.mark.parametrize("kind", ["A", "B"])
def test_value_at_turning_point(workspace, loop, kind):
    model = workspace.model()
    eA, eB = oracle.exact_AB(100, 1, 5, model.ctx)
    v = cauchy_AB(model, 1, 100, 5, kind, loop)
    with model.ctx.workdps():
        assert mp.isfinite(v.value)
        assert abs(v.value - (eA if kind == "A" else eB)) <= v.certified_bound


def test_overlap_with_away_from_turning_point(workspace, loop):
    model = workspace.model()
    A3, B3 = script_AB_pair(model, mpf("0.7"), 100, 5, model.ctx, cache=workspace.terms)
    for kind, s3 in (("A", A3), ("B", B3)):
        s4 = cauchy_AB(model, mpf("0.7"), 100, 5, kind, loop)
        with model.ctx.workdps():
            assert abs(s3.value - s4.value) <= s3.certified_bound + s4.certified_bound


def test_loop_sum_independent_of_start(workspace, loop):
    model = workspace.model()
    z = mpc("1.1", "0.1")
    a = cauchy_AB(model, z, 100, 5, "A", loop)
    b = cauchy_AB(model, z, 100, 5, "A", loop, start=mp.pi)
    with model.ctx.workdps():
        assert abs(a.value - b.value) <= mpf(10) ** -60 * abs(a.value)


def test_trapezoid_converges_spectrally(workspace, loop):
    model = workspace.model()
    z = mpf("1.35")
    with model.ctx.workdps():
        t = {N: _trapezoid(model, loop, z, 5, "A_script", N, 0) for N in (128, 256, 512)}
        d1 = abs(t[128] - t[256])
        d2 = abs(t[256] - t[512])
        assert d2 <= d1 * mpf(10) ** -10


def test_loop_argument_checks(workspace, loop):
    model = workspace.model()
    with pytest.raises(DomainError):
        cauchy_AB(model, mpf("1.45"), 100, 5, "A", loop)
    with pytest.raises(ValueError):
        cauchy_AB(model, 1, 100, 4, "A", loop)
    with pytest.raises(ValueError):
        cauchy_AB(model, 1, 50, 5, "A", loop)
    with pytest.raises(DomainError):
        build_loop_data(model, 100, 12, 2)
