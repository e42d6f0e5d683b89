from fractions import Fraction as F

import pytest
from mpmath import mp, mpc, mpf

from tpbounds.besselmap import (AlgebraicFunction, BesselModel, classify_sector,
                                connection_constants, ehat_by_integration, ehat_coefficients,
                                fhat_coefficients, liouville_point, modified_coefficients, xi_zeta)
from tpbounds.mpnum import Adaptive, ContourSpec, DomainError, RaySegment, integrate_contour
from tpbounds.seqcoeff import stirling_constants


def test_turning_point_maps_to_zero(ctx):
    xi, zeta = xi_zeta(1, ctx)
    assert xi == 0 and zeta == 0


def test_half_values(ctx):
    xi, zeta = xi_zeta(mpf("0.5"), ctx)
    with ctx.workdps():
        w = mp.sqrt(mpf(3)) / 2
        assert abs(xi - (mp.log((1 + w) / mpf("0.5")) - w)) < mpf(10) ** -45
        assert abs(xi - mpf("0.4509324931403781")) < 1e-15
        assert abs(zeta - (3 * xi / 2) ** (mpf(2) / 3)) < mpf(10) ** -45
        assert abs(zeta.imag) < mpf(10) ** -45 and zeta.real > 0


def test_small_z_asymptote(ctx):
    with ctx.workdps():
        for z in (mpf("1e-3"), mpf("1e-6")):
            xi, _ = xi_zeta(z, ctx)
            assert abs(xi - (mp.log(2 / z) - 1)) < 10 * z


def test_zeta_smooth_through_turning_point(ctx):
    with ctx.workdps():
        h = mpf("1e-8")
        left = xi_zeta(1 - h, ctx)[1]
        right = xi_zeta(mpc(1 + h, mpf("1e-40")), ctx)[1]
        assert abs(left - right) < mpf(10) ** -6


def test_cut_is_rejected(ctx):
    with pytest.raises(DomainError):
        liouville_point(mpf(-0.5), ctx)


def test_fhat_first_coefficient():
    F1 = fhat_coefficients(1)[0]
    # z²(z²+4)/(8(z²-1)³) = -z²(z²+4)/8 · (1-z²)^{-6/2}
    assert F1 == AlgebraicFunction((0, 0, F(-1, 2), 0, F(-1, 8)), 0, 6)
    assert F1.value_at_zero() == 0
    with mp.workdps(30):
        assert abs(F1.evaluate(mpf("0.5")) - mpf(-17) / 54) < mpf(10) ** -25
        z = mpc("0.3", "0.4")
        assert abs(F1.evaluate(z) - z ** 2 * (z ** 2 + 4) / (8 * (z ** 2 - 1) ** 3)) < mpf(10) ** -25


def test_fhat_recursion():
    Fs = fhat_coefficients(6)
    assert Fs[1] == Fs[0].half_z_over_surd_derivative()
    for s in range(2, 6):
        conv = Fs[0] * 0
        for j in range(1, s):
            conv = conv + Fs[j - 1] * Fs[s - j - 1]
        assert Fs[s] == Fs[s - 1].half_z_over_surd_derivative() - conv * F(1, 2)


def test_ehat_at_zero_equals_stirling():
    E = ehat_coefficients(9)
    C = stirling_constants(9).C
    assert [e.value_at_zero() for e in E] == [C[s] for s in range(1, 10)]


def test_ehat_shape_and_decay():
    E = ehat_coefficients(9)
    C = stirling_constants(9).C
    for s, e in enumerate(E, start=1):
        P = e.shape(3 * s)
        assert len(P) - 1 <= s
        assert P[0] == (C[s] if s % 2 else 0)
    with mp.workdps(30):
        big = mpc(0, 10 ** 6)
        assert all(abs(e.evaluate(big)) < 1e-5 for e in E)


def test_odd_ehat_derivative():
    # dÊ_1/dz = F̂_1 f^{1/2} with f^{1/2} = -√(1-z²)/z
    E1, F1 = ehat_coefficients(1)[0], fhat_coefficients(1)[0]
    assert E1.derivative() == F1 * AlgebraicFunction((-1,), 1, -1)
    assert ehat_by_integration(3)[2] == ehat_coefficients(3)[2]


@pytest.mark.parametrize("s", [1, 3])
@pytest.mark.parametrize("z", ["0.3", "0.6"])
def test_odd_ehat_by_quadrature(ctx, s, z):
    # Ê_s(z) = -∫_z^{i∞} F̂_s f^{1/2} dt along the vertical ray
    Fs = fhat_coefficients(s)[s - 1]
    E = ehat_coefficients(s)[s - 1]
    with ctx.workdps(10):
        z = mpc(z)
        f = lambda y: Fs.evaluate(z + 1j * y) * mp.sqrt(1 - (z + 1j * y) ** 2) / (z + 1j * y) * 1j
        got = mp.quad(f, [0, 1, 10, mp.inf])
        assert abs(got - E.evaluate(z)) < mpf(10) ** (-ctx.digits + 8)


def test_modified_coefficient_difference(ctx):
    z = mpf("0.5")
    a = modified_coefficients(1, z, "script_E", ctx)
    b = modified_coefficients(1, z, "script_E_tilde", ctx)
    xi, _ = xi_zeta(z, ctx)
    with ctx.workdps():
        assert abs((a - b) + mpf(1) / 6 / xi) < mpf(10) ** -45


def test_modified_coefficient_cancellation(ctx):
    # 𝓔_1 stays bounded at the turning point while Ê_1 and a_1/ξ blow up;
    # for odd s > 1 the leading singularity cancels, for even s nothing cancels
    hs = ("1e-2", "1e-3")
    def growth(vals):
        return mp.log10(vals[1] / vals[0])
    for s in (1, 3, 5):
        sE = [abs(modified_coefficients(s, 1 - mpf(h), "script_E", ctx)) for h in hs]
        raw = [abs(ehat_coefficients(s)[s - 1].evaluate(1 - mpf(h))) for h in hs]
        assert growth(raw) > 1.4
        assert growth(sE) < growth(raw) - 1.9
    sE1 = [abs(modified_coefficients(1, 1 - mpf(h), "script_E", ctx)) for h in hs]
    assert sE1[1] < sE1[0]
    with pytest.raises(DomainError):
        modified_coefficients(1, 1, "script_E", ctx)


def test_connection_constants(ctx):
    c = connection_constants(1, 2, ctx)
    with ctx.workdps():
        assert abs(c.lambda_plus - mp.e / mp.sqrt(2 * mp.pi)) < mpf(10) ** -45
        assert c.lambda_plus == c.lambda_minus
    assert c.delta(0) == 0
    scaled = [abs(connection_constants(nu, 5, ctx).delta(1)) * nu ** 12 for nu in (10, 20, 40)]
    assert max(scaled) / min(scaled) < 4


def test_lambda_asymptote(ctx):
    C = stirling_constants(7).C
    errs = []
    for nu in (20, 40, 80):
        c = connection_constants(nu, 5, ctx)
        with ctx.workdps():
            s = sum(mpf(C[2 * j + 1].numerator) / C[2 * j + 1].denominator / mpf(nu) ** (2 * j + 1)
                    for j in range(4))
            errs.append(abs(c.lambda_plus / mp.exp(s) - 1))
    assert errs[0] / errs[1] > 2 ** 8 and errs[1] / errs[2] > 2 ** 8


def test_sector_labels(ctx):
    assert classify_sector(mpf("0.5"), 10, ctx).pair == (-1, 0)
    lab = classify_sector(mpc("0.5", "0.5"), 10, ctx)
    assert lab.j in (0, -1)
    assert classify_sector(mpf("1.5"), 10, ctx).j in (-1, 1)


def test_model_interface(model):
    with mp.workdps(30):
        z = mpc("0.4", "0.2")
        assert abs(model.f(z) - (1 - z * z) / z ** 2) < 1e-25
        assert abs(model.f_half(z) ** 2 - model.f(z)) < 1e-25
        assert model.ehat_reference(3, 0) == mpf(-1) / 360
        assert next(model.candidate_paths(z, 0)).segments[0].b == 0
