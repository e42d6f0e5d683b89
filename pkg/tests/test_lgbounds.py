from mpmath import mp, mpc, mpf
import pytest

from tpbounds import oracle
from tpbounds.besselmap import liouville_point
from tpbounds.lgbounds import (ProgressivePathError, eta_lg_bound, is_progressive, lg_bound_terms,
                               lg_solution_W, matching_constant_c, script_AB, script_AB_pair)
from tpbounds.mpnum import ContourSpec, DomainError, FixedGauss, LineSegment


def test_terms_vanish_at_reference_point(model):
    t = lg_bound_terms(model, 0, 0, 6)
    assert t.omega(10) == 0 and t.varpi(10) == 0
    assert eta_lg_bound(t, 10) == 0


def test_terms_additive_over_split_path(model):
    z = mpc("0.6", "0.2")
    mid = mpc("0.3", "0.1")
    whole = lg_bound_terms(model, z, 0, 6, FixedGauss(40), path=ContourSpec((LineSegment(z, 0),)))
    a = lg_bound_terms(model, z, 0, 6, FixedGauss(40), path=ContourSpec((LineSegment(z, mid),)))
    b = lg_bound_terms(model, mid, 0, 6, FixedGauss(40), path=ContourSpec((LineSegment(mid, 0),)))
    # bound integrals are carried at 30 digits
    with mp.workdps(30):
        for k in range(6):
            assert abs(whole.single[k] - a.single[k] - b.single[k]) <= 1e-22 * whole.single[k]
        for k in range(1, 6):
            assert abs(whole.conv[k] - a.conv[k] - b.conv[k]) <= 1e-22 * whole.conv[k]


def test_terms_stable_under_node_refinement(model):
    t30 = lg_bound_terms(model, mpf("0.5"), 0, 12, FixedGauss(30), u=100)
    t60 = lg_bound_terms(model, mpf("0.5"), 0, 12, FixedGauss(60), u=100)
    assert mp.isfinite(t30.omega(100))
    assert abs(t30.omega(100) / t60.omega(100) - 1) < 1e-8
    assert abs(t30.varpi(100) / t60.varpi(100) - 1) < 1e-8


def test_non_progressive_path_rejected(model):
    # a detour towards the turning point lowers Re ξ before it rises again
    bad = ContourSpec((LineSegment(mpc("0.5"), mpc("0.9")), LineSegment(mpc("0.9"), mpc(0))))
    good = ContourSpec((LineSegment(mpc("0.5"), mpc(0)),))
    assert is_progressive(model, good, 0, 10)
    assert not is_progressive(model, bad, 0, 10)
    with pytest.raises(ProgressivePathError):
        lg_bound_terms(model, mpf("0.5"), 0, 6, path=bad)


def test_script_AB_at_figure_point(model):
    ctx = model.ctx
    A = script_AB(model, mpf("0.5"), 100, 5, "A", ctx)
    B = script_AB(model, mpf("0.5"), 100, 5, "B", ctx)
    eA, eB = oracle.exact_AB(100, mpf("0.5"), 5, ctx)
    with ctx.workdps():
        assert abs(A.value - eA) <= A.certified_bound
        assert abs(B.value - eB) <= B.certified_bound
    assert A.kind == "A_script" and B.kind == "B_script"


def test_script_bounds_scale_like_nu_power(model):
    cache = {}
    a50, b50 = script_AB_pair(model, mpf("0.5"), 50, 5, cache=cache)
    a100, b100 = script_AB_pair(model, mpf("0.5"), 100, 5, cache=cache)
    target = mpf(2) ** -12
    # 𝓑 carries an extra ν^{-1/3}
    for ratio in (a100.certified_bound / a50.certified_bound,
                  b100.certified_bound / b50.certified_bound * mpf(2) ** (mpf(1) / 3)):
        assert target / 3 <= ratio <= 3 * target


def test_B_overestimate_grows_with_nu(model):
    ctx = model.ctx
    over = []
    for nu in (25, 50, 100):
        B = script_AB(model, mpf("0.5"), nu, 3, "B", ctx)
        _, eB = oracle.exact_AB(nu, mpf("0.5"), 3, ctx)
        with ctx.workdps():
            over.append(B.certified_bound / abs(B.value - eB))
    assert 1.4 < over[1] / over[0] < 2.8 and 1.4 < over[2] / over[1] < 2.8


def test_script_domain_errors(model):
    with pytest.raises(DomainError):
        script_AB(model, 1, 100, 5, "A")
    with pytest.raises(DomainError):
        script_AB(model, mpf("0.999"), 100, 5, "A")
    with pytest.raises(DomainError):
        script_AB(model, -0.5, 100, 5, "A")
    with pytest.raises(ValueError):
        script_AB(model, 0.5, 100, 5, "C")


def test_script_conjugation(model):
    z = mpc("0.4", "0.3")
    A = script_AB(model, z, 50, 3, "A")
    Ac = script_AB(model, mp.conj(z), 50, 3, "A")
    with model.ctx.workdps():
        assert abs(Ac.value - mp.conj(A.value)) < 1e-40
    assert Ac.certified_bound == A.certified_bound


def test_matching_constant_limit(model):
    ctx = model.ctx
    devs = []
    for nu in (50, 200, 800):
        c, half = matching_constant_c(nu, 2, ctx, model)
        with ctx.workdps():
            nu = mpf(nu)
            norm = c * mp.exp(nu) * mp.gamma(nu) * nu ** (-nu + mpf(5) / 6) / (2 * mp.sqrt(mp.pi))
            devs.append(abs(norm - 1))
    assert devs[0] > devs[1] > devs[2] and devs[2] < 1e-3


def test_matching_constant_reproduces_J(model):
    ctx = model.ctx
    nu, m, z = mpf(10), 5, mpf("0.3")
    c, half = matching_constant_c(nu, m, ctx, model)
    A, B = script_AB_pair(model, z, nu, m, ctx)
    with ctx.workdps():
        x = nu ** (mpf(2) / 3) * liouville_point(z, ctx).zeta
        ai = oracle.airy(x, "Ai", ctx).value
        aip = oracle.airy(x, "Aip", ctx).value
        body = ai * A.value + aip * B.value
        approx = c / mp.sqrt(z) * body
        J = oracle.bessel_J(nu, nu * z, ctx).value
        allowed = (c / mp.sqrt(z)) * (abs(ai) * A.certified_bound + abs(aip) * B.certified_bound) \
            + half / mp.sqrt(z) * (abs(body) + abs(ai) * A.certified_bound + abs(aip) * B.certified_bound)
        assert abs(approx - J) <= allowed


def test_matching_constant_halfwidth_order(model):
    c50, h50 = matching_constant_c(50, 5, model.ctx, model)
    c100, h100 = matching_constant_c(100, 5, model.ctx, model)
    with model.ctx.workdps():
        ratio = (h100 / c100) / (h50 / c50)
    assert mpf(2) ** -12 / 3 <= ratio <= 3 * mpf(2) ** -12


def test_W0_matches_J(model):
    ctx = model.ctx
    nu, z = mpf(50), mpf("0.4")
    W = lg_solution_W(model, z, 0, 8, nu, ctx)
    with ctx.workdps():
        p = liouville_point(z, ctx)
        norm = nu ** nu / (mp.exp(nu) * mp.gamma(nu + 1)) * p.R()
        J = oracle.bessel_J(nu, nu * z, ctx).value
        assert abs(norm * W.value - J) <= abs(norm * W.value) * W.eta_bound


def test_W0_normalised_limit(model):
    # ζ^{1/4} e^{νξ} W_0 → 1 as z → 0
    nu = mpf(20)
    vals = []
    for z in (mpf("1e-3"), mpf("1e-6")):
        W = lg_solution_W(model, z, 0, 6, nu)
        with model.ctx.workdps():
            p = liouville_point(z, model.ctx)
            vals.append(abs(W.value * p.zeta_q() * mp.exp(nu * p.xi) - 1))
    assert vals[1] < vals[0] and vals[1] < 1e-4


@pytest.mark.parametrize("z", [mpc("0.5"), mpc("0.5", "0.3")])
def test_connection_residual(model, z):
    nu, n = 50, 8
    conn = model.connection(nu, n)
    W = {j: lg_solution_W(model, z, j, n, nu) for j in (-1, 0, 1)}
    with model.ctx.workdps():
        resid = abs(conn.lambda_minus * W[-1].value - 1j * W[0].value - conn.lambda_plus * W[1].value)
        allowed = conn.lambda_minus * abs(W[-1].value) * W[-1].eta_bound + \
            abs(W[0].value) * W[0].eta_bound + conn.lambda_plus * abs(W[1].value) * W[1].eta_bound
    assert resid <= allowed
