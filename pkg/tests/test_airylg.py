from mpmath import mp, mpc, mpf
import pytest

from tpbounds import oracle
from tpbounds.airylg import (AiryBoundInputs, airy_lg, appendix_path, bound_inputs, eta_bound,
                             lambda_two_case)
from tpbounds.mpnum import Adaptive, DomainError, integrate_contour
from tpbounds.seqcoeff import lambda_cap


def _oracle(u, xi, which, j, ctx):
    with ctx.workdps(20):
        u, xi = mpc(u), mpc(xi)
        zeta = (3 * xi / 2) ** (mpf(2) / 3)
        x = u ** (mpf(2) / 3) * zeta
        if j == 0:
            return oracle.airy(x, which, ctx).value
        return oracle.airy_rotated(x, which, j, ctx).value


@pytest.mark.parametrize("which", ["Ai", "Aip"])
def test_expansion_within_bound(ctx, which):
    r = airy_lg(10, 2, 6, which, 0, ctx)
    exact = _oracle(10, 2, which, 0, ctx)
    with ctx.workdps():
        assert abs(r.value / exact - 1) <= r.bound
        assert r.bound < mpf(10) ** -6


def test_bound_decays_like_u_to_minus_n(ctx):
    n = 6
    b1 = airy_lg(10, 2, n, "Ai", 0, ctx).bound
    b2 = airy_lg(20, 2, n, "Ai", 0, ctx).bound
    assert b1 / b2 >= mpf(2) ** n / 2


def test_rotated_branches_satisfy_connection(ctx):
    u, xi, n = 10, 2, 6
    vals = {j: airy_lg(u, xi, n, "Ai", j, ctx) for j in (-1, 0, 1)}
    with ctx.workdps():
        for j, r in vals.items():
            assert abs(r.value / _oracle(u, xi, "Ai", j, ctx) - 1) <= r.bound
        resid = 1j * vals[0].value + mp.expj(-mp.pi / 6) * vals[1].value \
            - mp.expj(mp.pi / 6) * vals[-1].value
        allowed = sum(abs(r.value) * r.bound for r in vals.values())
        assert abs(resid) <= allowed


def test_bound_inputs_order_two(ctx):
    xi, u = mpf(2), mpf(10)
    b = bound_inputs(u, xi, 2, ctx)
    with ctx.workdps():
        gamma2 = mpf(5) / 36 / xi ** 2 + 25 * mp.pi / 20736 / (u * xi ** 3)
        beta2 = 5 * mp.pi / 36 / xi
        assert abs(b.gamma_n - gamma2) < mpf(10) ** -45
        assert abs(b.beta_n - beta2) < mpf(10) ** -45


def test_bound_inputs_vanish_for_large_xi(ctx):
    small = bound_inputs(10, 1000, 6, ctx)
    big = bound_inputs(10, 1, 6, ctx)
    assert small.gamma_n < big.gamma_n * mpf(10) ** -15
    assert small.beta_n < big.beta_n * mpf(10) ** -2


def test_eta_bound_examples():
    assert eta_bound(0, 3, 10, 4) == 0
    assert abs(eta_bound(10 ** 4, 0, 10, 4) - mp.e) < 1e-14
    assert eta_bound(2, 1, 10, 4) > eta_bound(1, 1, 10, 4)
    assert eta_bound(1, 2, 10, 4) > eta_bound(1, 1, 10, 4)


def test_inputs_reject_negative():
    with pytest.raises(ValueError):
        AiryBoundInputs(mpf(-1), mpf(0), mpf(0), mpf(0))


def test_out_of_sector_and_singular_point(ctx):
    with pytest.raises(DomainError):
        airy_lg(10j, 2 * mp.expj(2.5), 6, "Ai", 0, ctx)
    with pytest.raises(DomainError):
        airy_lg(10, 0, 6, "Ai", 0, ctx)
    with pytest.raises(ValueError):
        airy_lg(10, 2, 6, "Bi", 0, ctx)


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("uxi_arg", [0.3, 2.5, -2.5])
def test_ray_integral_closed_form(ctx, p, uxi_arg):
    xi = mpc(1.5) * mp.expj(0.2)
    u = 10 * mp.expj(uxi_arg - 0.2)
    path = appendix_path(u, xi)
    with ctx.workdps():
        got = integrate_contour(lambda t: 1 / t ** p, path, Adaptive(1e-40), ctx)
        want = lambda_two_case(p, u * xi, ctx) / abs(xi) ** (p - 1)
        assert abs(got - want) <= mpf(10) ** (-ctx.digits + 6) * want
        assert want <= lambda_cap(p, ctx) / abs(xi) ** (p - 1)
