"""Exact q-analog combinatorics for the rank metric.

Counts of fixed-rank matrices, rank-metric ball volumes, Gaussian binomial
coefficients, a rigorous enclosure of K_q = prod_{j>=1} (1 - q^-j), the
finite-size two-sided ball estimates, and the rank-metric Singleton bound.
Everything is arbitrary-precision integer or Fraction arithmetic; no floats
enter any count.  Products are evaluated by interleaving multiplication with
exact division, so every intermediate value is an integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def gaussian_binomial(q: int, n: int, k: int) -> int:
    """Number of k-dimensional subspaces of F_q^n.

    Computed as prod_{i=1..k} (q^(n-k+i) - 1) / (q^i - 1); every prefix of
    the product is itself a Gaussian binomial, hence an integer.
    """
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    if not (0 <= k <= n):
        raise ValueError(f"k={k} outside [0, {n}]")
    out = 1
    for i in range(1, k + 1):
        out, rem = divmod(out * (q ** (n - k + i) - 1), q**i - 1)
        assert rem == 0
    return out


def rank_count(q: int, m: int, n: int, r: int) -> int:
    """Number of m x n matrices over F_q of rank exactly r (1 when r = 0)."""
    if q < 2 or m < 1 or n < 1:
        raise ValueError(f"bad parameters q={q}, m={m}, n={n}")
    if not (0 <= r <= min(m, n)):
        raise ValueError(f"rank {r} outside [0, {min(m, n)}]")
    ordered_bases = 1
    for j in range(r):
        ordered_bases *= q**m - q**j
    return gaussian_binomial(q, n, r) * ordered_bases


@dataclass(frozen=True)
class BallSpec:
    """A rank-metric ball: shape (m >= n), field order q, exact radius rho.

    Membership of Y in the ball around X means rank(X - Y) <= r_max where
    r_max = floor(rho * n).  rho = 1 (whole space) and rho = 0 (single
    matrix) are admitted as degenerate endpoints for desk-scale checks.
    """

    q: int
    m: int
    n: int
    rho: Fraction

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")
        if self.n < 1 or self.m < self.n:
            raise ValueError(f"need m >= n >= 1, got m={self.m}, n={self.n}")
        rho = Fraction(self.rho)
        object.__setattr__(self, "rho", rho)
        if not (0 <= rho <= 1):
            raise ValueError(f"rho must lie in [0, 1], got {rho}")

    @property
    def r_max(self) -> int:
        return (self.rho.numerator * self.n) // self.rho.denominator

    @property
    def is_degenerate(self) -> bool:
        """True when the ball is the whole space."""
        return self.r_max == self.n


def ball_volume(spec: BallSpec) -> int:
    """Number of matrices within distance rho of any fixed center."""
    return sum(rank_count(spec.q, spec.m, spec.n, r) for r in range(spec.r_max + 1))


def kq_bounds(q: int, terms: int) -> tuple[Fraction, Fraction]:
    """Rigorous enclosure of K_q = prod_{j>=1} (1 - q^-j).

    The partial product P_t over-estimates K_q (every remaining factor is
    below 1), and the tail is at least 1 - q^-t, so

        P_t * (1 - q^-t)  <=  K_q  <=  P_t.

    The returned (lower, upper) satisfy upper = lower / (1 - q^-terms) and
    the width shrinks geometrically in `terms`.
    """
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    partial = Fraction(1)
    for j in range(1, terms + 1):
        partial *= 1 - Fraction(1, q**j)
    tail_floor = 1 - Fraction(1, q**terms)
    return partial * tail_floor, partial


def ball_volume_bounds(spec: BallSpec) -> tuple[int, int, bool]:
    """Two-sided estimate of the ball volume at effective radius r_max/n.

    With r = r_max the exponent mn(r/n + (r/n)(n/m) - (r/n)^2 (n/m))
    collapses to the integer r(m + n - r), giving

        q^(r(m+n-r))  <=  |ball|  <=  4 * q^(r(m+n-r)).

    Returns (lower, upper, holds) with `holds` the exact integer check.
    """
    r = spec.r_max
    lower = spec.q ** (r * (spec.m + spec.n - r))
    upper = 4 * lower
    vol = ball_volume(spec)
    return lower, upper, lower <= vol <= upper


def singleton_check(q: int, m: int, n: int, code_size: int, d: int) -> bool:
    """Does a code of the given size satisfy log_q|C| <= m(n - d + 1)?

    d is the unnormalized minimum rank distance, d >= 1.
    """
    if d < 1:
        raise ValueError(f"minimum distance must be >= 1, got {d}")
    if code_size < 1:
        raise ValueError(f"code size must be >= 1, got {code_size}")
    expo = m * (n - d + 1)
    if expo >= 0:
        return code_size <= q**expo
    return code_size * q ** (-expo) <= 1
