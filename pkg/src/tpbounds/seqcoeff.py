"""Exact coefficient sequences and truncated formal power series.

The Airy-type sequences a_s, ã_s, the Stirling constants C_s and the
capacities Λ_p all live here, together with a small truncated power series
type used both for the even-coefficient log identity and for cross-checking
a_s, ã_s against the classical Airy Poincaré coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

from .mpnum import DomainError

__all__ = [
    "A_TILDE_START",
    "A_START",
    "AirySeqTable",
    "FormalSeries",
    "LambdaTable",
    "StirlingTable",
    "airy_exp_series",
    "airy_poincare_uv",
    "airy_seq_table",
    "bernoulli_numbers",
    "exp_series",
    "extend_sequence",
    "lambda_cap",
    "lambda_cap_gamma",
    "lambda_exact",
    "lambda_table",
    "lemma_l2_holds",
    "log_series",
    "mul_series",
    "neg_alternate",
    "stirling_constants",
]

A_START = (Fraction(5, 72), Fraction(5, 72))
A_TILDE_START = (Fraction(-7, 72), Fraction(-7, 72))


def extend_sequence(b1, b2, S: int) -> list[Fraction]:
    """b_1..b_S with b_{s+1} = (s+1) b_s / 2 + (1/2) Σ_{j=1}^{s-1} b_j b_{s-j}."""
    if S < 2:
        raise ValueError(f"S must be >= 2, got {S}")
    b = [None, Fraction(b1), Fraction(b2)]
    for s in range(2, S):
        conv = sum((b[j] * b[s - j] for j in range(1, s)), Fraction(0))
        b.append(Fraction(s + 1, 2) * b[s] + conv / 2)
    return b[1:]


@dataclass(frozen=True)
class AirySeqTable:
    """a_s and ã_s for s = 1..S (index 0 of each list is s = 1)."""

    a: tuple
    a_tilde: tuple

    def __post_init__(self):
        if self.a[:2] != A_START or self.a_tilde[:2] != A_TILDE_START:
            raise ValueError("sequence seeds do not match a_1=a_2=5/72, ã_1=ã_2=-7/72")

    @property
    def S(self) -> int:
        return len(self.a)


@lru_cache(maxsize=16)
def airy_seq_table(S: int) -> AirySeqTable:
    return AirySeqTable(tuple(extend_sequence(*A_START, S)),
                        tuple(extend_sequence(*A_TILDE_START, S)))


# ---------------------------------------------------------------------------
# Formal power series
# ---------------------------------------------------------------------------


class FormalSeries:
    """Truncated series c_0 + c_1 y + ... + c_N y^N.

    Coefficients may come from any ring supporting +, -, * and
    multiplication by Fraction; ``one``/``zero`` are taken from the
    caller when the ring is not the rationals.  The order N is explicit and
    binary operations use the smaller of the two orders.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Any]):
        if not coeffs:
            raise ValueError("a formal series needs at least one coefficient")
        self.coeffs = tuple(coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k]

    def __eq__(self, other):
        return isinstance(other, FormalSeries) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"FormalSeries({list(self.coeffs)!r})"

    def truncate(self, N: int) -> "FormalSeries":
        if N > self.order:
            raise ValueError("cannot extend a truncated series")
        return FormalSeries(self.coeffs[: N + 1])

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        N = min(self.order, other.order)
        return FormalSeries([self.coeffs[k] + other.coeffs[k] for k in range(N + 1)])

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        N = min(self.order, other.order)
        return FormalSeries([self.coeffs[k] - other.coeffs[k] for k in range(N + 1)])

    def __neg__(self):
        return FormalSeries([-c for c in self.coeffs])

    def scale(self, factor) -> "FormalSeries":
        return FormalSeries([c * factor for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, FormalSeries):
            return mul_series(self, other)
        return self.scale(other)


def mul_series(p: FormalSeries, q: FormalSeries) -> FormalSeries:
    N = min(p.order, q.order)
    out = []
    for n in range(N + 1):
        acc = p.coeffs[0] * q.coeffs[n]
        for k in range(1, n + 1):
            acc = acc + p.coeffs[k] * q.coeffs[n - k]
        out.append(acc)
    return FormalSeries(out)


def neg_alternate(p: FormalSeries) -> FormalSeries:
    """Flip the sign of odd-index coefficients (y -> -y)."""
    return FormalSeries([-c if k % 2 else c for k, c in enumerate(p.coeffs)])


def _is_zero(c) -> bool:
    return c == 0 if not hasattr(c, "is_zero") else c.is_zero()


def exp_series(p: FormalSeries, one=Fraction(1)) -> FormalSeries:
    """exp of a series whose constant term is zero."""
    if not _is_zero(p.coeffs[0]):
        raise DomainError("exp_series needs a zero constant term")
    N = p.order
    g = [one]
    for n in range(1, N + 1):
        acc = None
        for k in range(1, n + 1):
            term = p.coeffs[k] * g[n - k] * Fraction(k)
            acc = term if acc is None else acc + term
        g.append(acc * Fraction(1, n))
    return FormalSeries(g)


def log_series(p: FormalSeries, zero=Fraction(0)) -> FormalSeries:
    """log of a series with constant term 1."""
    if p.coeffs[0] != 1:
        raise DomainError("log_series needs constant term 1")
    N = p.order
    f = [zero]
    for n in range(1, N + 1):
        acc = p.coeffs[n] * Fraction(n)
        for k in range(1, n):
            acc = acc - f[k] * p.coeffs[n - k] * Fraction(k)
        f.append(acc * Fraction(1, n))
    return FormalSeries(f)


# ---------------------------------------------------------------------------
# Classical Airy Poincaré coefficients (independent check on a_s, ã_s)
# ---------------------------------------------------------------------------


def airy_poincare_uv(K: int) -> tuple[list[Fraction], list[Fraction]]:
    """u_k, v_k for k = 0..K from the standard three-factor recurrences."""
    u = [Fraction(1)]
    v = [Fraction(1)]
    for k in range(1, K + 1):
        uk = u[-1] * Fraction((6 * k - 5) * (6 * k - 3) * (6 * k - 1), (2 * k - 1) * 216 * k)
        u.append(uk)
        v.append(-Fraction(6 * k + 1, 6 * k - 1) * uk)
    return u, v


def airy_exp_series(b: Sequence[Fraction], K: int) -> FormalSeries:
    """exp(Σ_s (-1)^s b_s / (s x^s)) as a series in 1/x, truncated at order K."""
    coeffs = [Fraction(0)] + [Fraction((-1) ** s) * b[s - 1] / s for s in range(1, K + 1)]
    return exp_series(FormalSeries(coeffs))


# ---------------------------------------------------------------------------
# Stirling constants
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _bernoulli_upto(n: int) -> tuple[Fraction, ...]:
    # Akiyama-Tanigawa; yields B_1 = +1/2, only even indices are used
    out = []
    row = []
    for m in range(n + 1):
        row.append(Fraction(1, m + 1))
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        out.append(row[0])
    return tuple(out)


def bernoulli_numbers(n: int) -> list[Fraction]:
    """B_0..B_n (with the convention B_1 = +1/2)."""
    # grow the cache in coarse steps so repeated calls reuse work
    size = max(16, 1 << (n.bit_length()))
    return list(_bernoulli_upto(size)[: n + 1])


@dataclass(frozen=True)
class StirlingTable:
    """C[s] for s = 0..2J+1; C[0] is unused and set to zero."""

    C: tuple

    def __post_init__(self):
        if any(c != 0 for c in self.C[2::2]):
            raise ValueError("even Stirling constants must vanish")


@lru_cache(maxsize=32)
def stirling_constants(J: int) -> StirlingTable:
    """C_1..C_J with C_{2j+1} = B_{2j+2}/((2j+2)(2j+1)) and C_{2j} = 0."""
    if J < 1:
        raise ValueError(f"J must be >= 1, got {J}")
    B = bernoulli_numbers(J + 1)
    C = [Fraction(0)] * (J + 1)
    for s in range(1, J + 1, 2):
        C[s] = B[s + 1] / ((s + 1) * s)
    return StirlingTable(tuple(C))


# ---------------------------------------------------------------------------
# Λ_p
# ---------------------------------------------------------------------------


def lambda_exact(p: int) -> tuple[Fraction, int]:
    """Λ_p as (rational q, power k) meaning q * π^(k/2).

    Half-integer Gamma values reduce Λ_p to a rational times π (p even) or
    a pure rational (p odd).
    """
    if p < 2:
        raise DomainError(f"lambda_cap needs p >= 2, got {p}")

    def gamma_half(n2: int) -> tuple[Fraction, int]:
        # Γ(n2/2) = q * sqrt(pi)^k
        if n2 % 2 == 0:
            q = Fraction(1)
            for i in range(1, n2 // 2):
                q *= i
            return q, 0
        q = Fraction(1)
        x = Fraction(1, 2)
        while x < Fraction(n2, 2):
            q *= x
            x += 1
        return q, 1

    qa, ka = gamma_half(p - 1)
    qb, kb = gamma_half(p)
    return qa / (2 * qb), 1 + ka - kb


@dataclass(frozen=True)
class LambdaTable:
    values: tuple
    exact: tuple


def lambda_cap(p: int, ctx) -> Any:
    """Λ_p = √π Γ(p/2 - 1/2) / (2 Γ(p/2)) at the precision of ``ctx``."""
    from mpmath import mp, mpf

    q, k = lambda_exact(p)
    with ctx.workdps(5):
        val = mpf(q.numerator) / q.denominator * mp.pi ** (mpf(k) / 2)
    with ctx.workdps():
        return +val


def lambda_cap_gamma(p: int, ctx) -> Any:
    """Same as :func:`lambda_cap` but through the Gamma kernel."""
    from mpmath import mp, mpf

    from .mpnum import gamma

    if p < 2:
        raise DomainError(f"lambda_cap needs p >= 2, got {p}")
    with ctx.workdps(5):
        val = mp.sqrt(mp.pi) * gamma(mpf(p) / 2 - mpf(1) / 2, ctx) / (2 * gamma(mpf(p) / 2, ctx))
    with ctx.workdps():
        return +val


def lambda_table(P: int, ctx) -> LambdaTable:
    return LambdaTable(tuple(lambda_cap(p, ctx) for p in range(2, P + 1)),
                       tuple(lambda_exact(p) for p in range(2, P + 1)))


def lemma_l2_holds(b: Fraction, c: Fraction, d: Fraction) -> bool:
    """a + b + ab <= (b+c+d)(1 + (b+c+d)/2)^2 with a = c + d + cd, exactly."""
    a = c + d + c * d
    S = b + c + d
    return a + b + a * b <= S * (1 + S / 2) ** 2
