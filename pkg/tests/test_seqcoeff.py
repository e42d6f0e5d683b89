import random
from fractions import Fraction as F

import pytest
from mpmath import mp, mpf

from tpbounds.mpnum import DomainError
from tpbounds.seqcoeff import (A_START, A_TILDE_START, FormalSeries, airy_exp_series,
                               airy_poincare_uv, airy_seq_table, bernoulli_numbers, exp_series,
                               extend_sequence, lambda_cap, lambda_cap_gamma, lambda_table,
                               lemma_l2_holds, log_series, mul_series, neg_alternate,
                               stirling_constants)


def test_sequence_seeds_and_third_term():
    assert extend_sequence(F(5, 72), F(5, 72), 2) == [F(5, 72), F(5, 72)]
    assert extend_sequence(*A_START, 3)[2] == F(1105, 10368)
    assert extend_sequence(*A_TILDE_START, 3)[2] == F(-1463, 10368)


def test_recursion_holds_exactly():
    table = airy_seq_table(12)
    for b in (table.a, table.a_tilde):
        for s in range(2, 12):
            conv = sum(b[j - 1] * b[s - j - 1] for j in range(1, s))
            assert b[s] == F(s + 1, 2) * b[s - 1] + conv / 2


def test_exp_of_zero_is_one():
    assert exp_series(FormalSeries([F(0)] * 5)) == FormalSeries([F(1)] + [F(0)] * 4)


def test_exp_form_matches_poincare_second_order():
    s = airy_exp_series(airy_seq_table(2).a, 2)
    assert list(s.coeffs) == [1, F(-5, 72), F(385, 10368)]


def test_exp_form_matches_poincare_up_to_eight():
    u, v = airy_poincare_uv(8)
    table = airy_seq_table(8)
    ea, eb = airy_exp_series(table.a, 8), airy_exp_series(table.a_tilde, 8)
    for k in range(9):
        assert ea[k] == (-1) ** k * u[k]
        assert eb[k] == (-1) ** k * v[k]


def test_log_exp_round_trip():
    rng = random.Random(7)
    for _ in range(20):
        N = rng.randint(1, 8)
        p = FormalSeries([F(0)] + [F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(N)])
        assert log_series(exp_series(p)) == p


def test_log_needs_unit_constant():
    with pytest.raises(DomainError):
        log_series(FormalSeries([F(2), F(1)]))


def test_series_algebra():
    p = FormalSeries([F(1), F(2), F(3)])
    q = FormalSeries([F(1), F(-1)])
    assert mul_series(p, q) == FormalSeries([F(1), F(1)])       # order drops to 1
    assert neg_alternate(p) == FormalSeries([F(1), F(-2), F(3)])
    with pytest.raises(ValueError):
        p.truncate(5)


def test_stirling_constants():
    C = stirling_constants(9).C
    assert C[1] == F(1, 12) and C[2] == 0 and C[3] == F(-1, 360)
    assert all(C[s] == 0 for s in range(2, 10, 2))
    B = bernoulli_numbers(10)
    for j in range(4):
        assert C[2 * j + 1] == B[2 * j + 2] / ((2 * j + 2) * (2 * j + 1))


def test_lambda_cap_values(ctx):
    with ctx.workdps():
        assert abs(lambda_cap(2, ctx) - mp.pi / 2) < mpf(10) ** -45
        assert abs(lambda_cap(3, ctx) - 1) < mpf(10) ** -45
        assert abs(lambda_cap(4, ctx) - mp.pi / 4) < mpf(10) ** -45
        for p in range(2, 20):
            assert abs(lambda_cap(p, ctx) - lambda_cap_gamma(p, ctx)) < mpf(10) ** -45
    with pytest.raises(DomainError):
        lambda_cap(1, ctx)


def test_lambda_inequality_and_monotonicity(ctx):
    table = lambda_table(64, ctx)
    vals = list(table.values)          # entries for p = 2..64
    for p, v in zip(range(2, 65), vals):
        assert v > mpf(1) / (p - 1)
    assert all(a > b for a, b in zip(vals[1:], vals[2:]))


def test_lemma_l2_on_random_triples():
    rng = random.Random(11)
    for _ in range(2000):
        b, c, d = (F(rng.randint(0, 400), rng.randint(1, 40)) for _ in range(3))
        assert lemma_l2_holds(b, c, d)
