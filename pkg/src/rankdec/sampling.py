"""Seeded, bit-reproducible samplers for the distributions the experiments
draw from: uniform matrices, uniform fixed-rank matrices, uniform elements
of a rank-metric ball, uniform Grassmannian subspaces, uniform linear codes,
and Bernoulli random codes.

Stream derivation (documented contract, bit-exact on every platform):

    trial_seed = mix64(master_seed XOR trial_index)

where mix64 is the SplitMix64 finalizer

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

(all mod 2^64).  The trial seed then keys a SplitMix64 sequence (increment
0x9E3779B97F4A7C15) whose first four outputs initialize a xoshiro256**
state.  Distinct trial indices give independent streams, so trials can run
concurrently and still reduce to identical results.

Every sampler here is exactly uniform over its stated support, not merely
approximately: rank strata are chosen by big-integer inverse CDF, rejection
steps discard nothing but off-support draws, and Bernoulli inclusion with an
irrational probability q^-x compares lazily-extended random bits against
integer-root thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .counting import BallSpec, rank_count
from .errors import GuardError
from .gf import Field, field_from_order
from .matgf import MatrixF, Subspace, mat_mul, mat_rank

MASK64 = (1 << 64) - 1
SPLITMIX64_INCREMENT = 0x9E3779B97F4A7C15
RANDOM_CODE_LIMIT = 1 << 22


def mix64(z: int) -> int:
    """SplitMix64 finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class Xoshiro256StarStar:
    """xoshiro256** with buffered bit extraction."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3", "_buf", "_bufbits")

    def __init__(self, s0: int, s1: int, s2: int, s3: int):
        if not (s0 | s1 | s2 | s3):
            s3 = 1  # the all-zero state is the one forbidden fixed point
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        self._buf = 0
        self._bufbits = 0

    @classmethod
    def from_seed(cls, seed: int) -> "Xoshiro256StarStar":
        state = seed & MASK64
        words = []
        for _ in range(4):
            state = (state + SPLITMIX64_INCREMENT) & MASK64
            words.append(mix64(state))
        return cls(*words)

    def next64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        r = (s1 * 5) & MASK64
        r = (((r << 7) | (r >> 57)) & MASK64) * 9 & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return r

    def randbits(self, k: int) -> int:
        if k < 0:
            raise ValueError("bit count must be non-negative")
        buf, bits = self._buf, self._bufbits
        while bits < k:
            buf |= self.next64() << bits
            bits += 64
        out = buf & ((1 << k) - 1)
        self._buf = buf >> k
        self._bufbits = bits - k
        return out

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n); n may be arbitrarily large."""
        if n <= 0:
            raise ValueError("bound must be positive")
        if n == 1:
            return 0
        k = (n - 1).bit_length()
        while True:
            r = self.randbits(k)
            if r < n:
                return r


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus the per-trial stream derivation."""

    master_seed: int

    def __post_init__(self):
        object.__setattr__(self, "master_seed", self.master_seed & MASK64)

    def rng_for_trial(self, trial_index: int) -> Xoshiro256StarStar:
        if trial_index < 0:
            raise ValueError("trial index must be non-negative")
        return Xoshiro256StarStar.from_seed(mix64(self.master_seed ^ trial_index))


# --- matrix samplers ---


def sample_uniform_matrix(field: Field, m: int, n: int, rng: Xoshiro256StarStar) -> MatrixF:
    """Uniform over all q^(mn) matrices."""
    if field.q == 2:
        bits = rng.randbits(m * n)
        return MatrixF(field, m, n, tuple((bits >> i) & 1 for i in range(m * n)))
    q = field.q
    return MatrixF(field, m, n, tuple(rng.randbelow(q) for _ in range(m * n)))


def sample_uniform_rank_matrix(
    field: Field, m: int, n: int, r: int, rng: Xoshiro256StarStar
) -> MatrixF:
    """Uniform over the matrices of rank exactly r.

    Drawn as A @ B with A uniform among full-column-rank m x r matrices and
    B uniform among full-row-rank r x n matrices, each by rejection; every
    rank-r matrix has exactly |GL_r| such factorizations, so the product is
    uniform on the stratum.
    """
    if not (0 <= r <= min(m, n)):
        raise ValueError(f"rank {r} outside [0, {min(m, n)}]")
    if r == 0:
        return MatrixF.zeros(field, m, n)
    while True:
        a = sample_uniform_matrix(field, m, r, rng)
        if mat_rank(a) == r:
            break
    while True:
        b = sample_uniform_matrix(field, r, n, rng)
        if mat_rank(b) == r:
            break
    return mat_mul(a, b)


@lru_cache(maxsize=None)
def _rank_cdf(q: int, m: int, n: int, r_max: int) -> tuple[int, ...]:
    acc = 0
    out = []
    for r in range(r_max + 1):
        acc += rank_count(q, m, n, r)
        out.append(acc)
    return tuple(out)


def sample_ball_uniform(spec: BallSpec, rng: Xoshiro256StarStar) -> MatrixF:
    """Uniform over the rank-metric ball of radius rho around 0.

    The rank stratum is selected by exact inverse CDF over the big-integer
    rank counts, then the stratum is sampled uniformly; rejection from the
    whole space would be exponentially wasteful at small radii.
    """
    field = field_from_order(spec.q)
    cdf = _rank_cdf(spec.q, spec.m, spec.n, spec.r_max)
    t = rng.randbelow(cdf[-1])
    r = next(i for i, c in enumerate(cdf) if t < c)
    return sample_uniform_rank_matrix(field, spec.m, spec.n, r, rng)


# --- subspace and code samplers ---


def sample_uniform_subspace(
    field: Field, ambient_dim: int, s: int, rng: Xoshiro256StarStar
) -> Subspace:
    """Uniform over the s-dimensional subspaces of F_q^ambient.

    An ambient x s matrix is drawn uniformly and redrawn until its columns
    are independent; every subspace has the same number of ordered bases, so
    the canonicalized column span is uniform on the Grassmannian.
    """
    if not (0 <= s <= ambient_dim):
        raise ValueError(f"dimension {s} outside [0, {ambient_dim}]")
    if s == 0:
        return Subspace(field, ambient_dim, ())
    while True:
        x = sample_uniform_matrix(field, ambient_dim, s, rng)
        if mat_rank(x) == s:
            return Subspace.span(field, ambient_dim, x.transpose().rows())


def _column_from_coeffs(field: Field, space: Subspace, coeffs: list[int]) -> list[int]:
    col = [0] * space.ambient_dim
    add, mul = field.add, field.mul
    for c, row in zip(coeffs, space.rows):
        if c:
            for i, v in enumerate(row):
                if v:
                    col[i] = add(col[i], mul(c, v))
    return col


def sample_d2_pair(
    field: Field, m: int, n: int, s1: int, s2: int, rng: Xoshiro256StarStar
) -> tuple[MatrixF, MatrixF]:
    """Column-subspace pair sampler: for j = 1, 2 pick a uniform s_j-dim
    subspace U_j of F_q^m, then fill the n columns of X_j with iid uniform
    vectors of U_j.  rank(X_j) <= s_j always; conditioned on rank(X_j) = s_j
    the matrix is uniform on that rank stratum."""
    out = []
    for s in (s1, s2):
        if not (0 <= s <= min(m, n)):
            raise ValueError(f"subspace dimension {s} outside [0, {min(m, n)}]")
        space = sample_uniform_subspace(field, m, s, rng)
        cols = []
        for _ in range(n):
            coeffs = [rng.randbelow(field.q) for _ in range(s)]
            cols.append(_column_from_coeffs(field, space, coeffs))
        entries = tuple(cols[j][i] for i in range(m) for j in range(n))
        out.append(MatrixF(field, m, n, entries))
    return out[0], out[1]


def sample_random_linear_code(
    field: Field, m: int, n: int, k: int, rng: Xoshiro256StarStar
) -> Subspace:
    """Uniform k-dimensional subspace of the mn-dimensional matrix space.

    Basis vectors are read back as m x n matrices row-major when used as a
    rank-metric code.
    """
    mn = m * n
    if not (0 <= k <= mn):
        raise ValueError(f"dimension {k} outside [0, {mn}]")
    if k == 0:
        return Subspace(field, mn, ())
    while True:
        x = sample_uniform_matrix(field, k, mn, rng)
        if mat_rank(x) == k:
            return Subspace.span(field, mn, x.rows())


# --- exact Bernoulli(q^-x) and Bernoulli random codes ---


def _iroot(n: int, k: int) -> int:
    """floor(n^(1/k)) for n >= 0, k >= 1."""
    if n < 0 or k < 1:
        raise ValueError("bad root arguments")
    if n == 0 or k == 1:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


class BernoulliQPower:
    """Draws True with probability exactly q^-x for a non-negative rational
    x = a/b.

    For integer x this is one uniform draw below q^a.  Otherwise the target
    probability is irrational: the sampler compares a lazily extended
    uniform bit stream u against thresholds T_k = floor(q^-x * 2^(64k)),
    computed exactly via integer b-th roots, widening only on the
    probability-2^-64k boundary hits.
    """

    CHUNK = 64

    def __init__(self, q: int, exponent: Fraction):
        exponent = Fraction(exponent)
        if q < 2 or exponent < 0:
            raise ValueError("need q >= 2 and a non-negative exponent")
        self.q = q
        self.a = exponent.numerator
        self.b = exponent.denominator
        self._thresholds: list[int] = []

    def _threshold(self, k: int) -> int:
        while len(self._thresholds) < k:
            kk = len(self._thresholds) + 1
            nbits = self.CHUNK * kk
            num = 1 << (nbits * self.b)
            den = self.q**self.a
            t = _iroot(num // den, self.b)
            while (t + 1) ** self.b * den <= num:
                t += 1
            while t**self.b * den > num:
                t -= 1
            self._thresholds.append(t)
        return self._thresholds[k - 1]

    def sample(self, rng: Xoshiro256StarStar) -> bool:
        if self.a == 0:
            return True
        if self.b == 1:
            return rng.randbelow(self.q**self.a) == 0
        u = rng.randbits(self.CHUNK)
        k = 1
        while True:
            t = self._threshold(k)
            if u < t:
                return True
            if u > t:
                return False
            u = (u << self.CHUNK) | rng.randbits(self.CHUNK)
            k += 1


def bernoulli_q_power(rng: Xoshiro256StarStar, q: int, exponent: Fraction) -> bool:
    """One draw that is True with probability exactly q^-exponent."""
    return BernoulliQPower(q, exponent).sample(rng)


def sample_random_code(
    field: Field, m: int, n: int, rate: Fraction, rng: Xoshiro256StarStar
) -> list[MatrixF]:
    """Bernoulli random code: each of the q^(mn) matrices is included
    independently with probability q^((rate - 1) mn), so the expected size
    is q^(rate * mn).  Returns the included words in encoding order."""
    rate = Fraction(rate)
    if not (0 < rate < 1):
        raise ValueError(f"rate must lie in (0, 1), got {rate}")
    universe = field.q ** (m * n)
    if universe > RANDOM_CODE_LIMIT:
        raise GuardError(f"universe size {universe} exceeds {RANDOM_CODE_LIMIT}")
    sampler = BernoulliQPower(field.q, (1 - rate) * m * n)
    return [
        MatrixF.decode(field, m, n, code)
        for code in range(universe)
        if sampler.sample(rng)
    ]
