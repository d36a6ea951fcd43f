"""Rank-metric codes over GF(q)^{m x n}: rate, minimum distance, exact and
Monte Carlo list-decoding checks.

A linear code is a subspace of the mn-dimensional ambient space whose basis
vectors are read as m x n matrices row-major; a general code is an explicit
duplicate-free set of matrices.  The shape convention m >= n is enforced
here (transpose first if needed).  All radius tests are exact integer
comparisons rank(X - Y) <= floor(rho * n).

Enumeration is guarded: codeword scans beyond 2^22 words and center scans
beyond 2^20 raise GuardError instead of silently truncating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .counting import BallSpec, ball_volume
from .errors import GuardError
from .gf import Field, field_from_order
from .matgf import (
    MatrixF,
    Subspace,
    enumerate_low_rank,
    mat_rank,
    matrix_from_text,
    matrix_to_text,
)

ENUMERATION_LIMIT = 1 << 22
CENTER_LIMIT = 1 << 20


def mat_from_vector(field: Field, m: int, n: int, vec: Sequence[int]) -> MatrixF:
    """Read a length-mn vector as an m x n matrix, row-major."""
    if len(vec) != m * n:
        raise ValueError(f"vector length {len(vec)} != {m * n}")
    return MatrixF(field, m, n, tuple(vec))


def vector_from_mat(x: MatrixF) -> tuple[int, ...]:
    return x.entries


@dataclass(frozen=True)
class RankCode:
    """Either a linear code (basis subspace set, words None) or a general
    code (explicit word tuple, basis None)."""

    field: Field
    m: int
    n: int
    basis: Subspace | None
    words: tuple[MatrixF, ...] | None

    def __post_init__(self):
        if self.n < 1 or self.m < self.n:
            raise ValueError(f"need m >= n >= 1, got m={self.m}, n={self.n}")
        if (self.basis is None) == (self.words is None):
            raise ValueError("exactly one of basis/words must be set")

    @property
    def is_linear(self) -> bool:
        return self.basis is not None

    @property
    def dimension(self) -> int:
        if self.basis is None:
            raise ValueError("general codes have no dimension")
        return self.basis.dim

    @property
    def size(self) -> int:
        if self.basis is not None:
            return self.field.q**self.basis.dim
        return len(self.words)

    def contains(self, x: MatrixF) -> bool:
        if x.field != self.field or x.m != self.m or x.n != self.n:
            raise ValueError("shape or field mismatch")
        if self.basis is not None:
            return self.basis.contains(x.entries)
        return x in self.words


def linear_code(field: Field, m: int, n: int, generators: Sequence[MatrixF]) -> RankCode:
    """Linear code spanned by the given matrices (dependent generators collapse)."""
    vectors = []
    for g in generators:
        if g.field != field or g.m != m or g.n != n:
            raise ValueError("generator shape or field mismatch")
        vectors.append(g.entries)
    return RankCode(field, m, n, Subspace.span(field, m * n, vectors), None)


def linear_code_from_subspace(field: Field, m: int, n: int, space: Subspace) -> RankCode:
    if space.field != field or space.ambient_dim != m * n:
        raise ValueError("subspace ambient dimension must be m*n")
    return RankCode(field, m, n, space, None)


def general_code(field: Field, m: int, n: int, words: Sequence[MatrixF]) -> RankCode:
    seen = set()
    for w in words:
        if w.field != field or w.m != m or w.n != n:
            raise ValueError("word shape or field mismatch")
        code = w.encode()
        if code in seen:
            raise ValueError("duplicate codeword in a general code")
        seen.add(code)
    ordered = tuple(sorted(words, key=lambda w: w.encode()))
    return RankCode(field, m, n, None, ordered)


def codewords(code: RankCode, limit: int = ENUMERATION_LIMIT) -> Iterator[MatrixF]:
    """All codewords.  Linear codes are enumerated by an incremental odometer
    over basis coefficients, so each step costs O(mn)."""
    if code.size > limit:
        raise GuardError(f"code size {code.size} exceeds the enumeration limit {limit}")
    if code.words is not None:
        yield from code.words
        return
    field = code.field
    basis = code.basis.rows
    k = len(basis)
    mn = code.m * code.n
    cur = [0] * mn
    digits = [0] * k
    add = field.add
    while True:
        yield MatrixF(code.field, code.m, code.n, tuple(cur))
        i = 0
        while i < k:
            digits[i] += 1
            row = basis[i]
            for j in range(mn):
                if row[j]:
                    cur[j] = add(cur[j], row[j])
            if digits[i] < field.q:
                break
            digits[i] = 0
            i += 1
        else:
            return


@dataclass(frozen=True)
class CodeRate:
    """log_q |C| / mn.  `exact` is set whenever |C| is a power of q (always,
    for linear codes); `approx` is a float good to ~1e-12 relative."""

    size: int
    mn: int
    q: int
    exact: Fraction | None
    approx: float


def code_rate(code: RankCode) -> CodeRate:
    size = code.size
    if size < 1:
        raise ValueError("empty code has no rate")
    mn = code.m * code.n
    if code.basis is not None:
        exact = Fraction(code.basis.dim, mn)
        return CodeRate(size, mn, code.field.q, exact, float(exact))
    # general: exact only when the size is a power of q
    j, r = 0, size
    while r % code.field.q == 0:
        r //= code.field.q
        j += 1
    exact = Fraction(j, mn) if r == 1 else None
    approx = math.log(size, code.field.q) / mn if size > 1 else 0.0
    return CodeRate(size, mn, code.field.q, exact, approx)


def min_rank_distance(code: RankCode, limit: int = ENUMERATION_LIMIT) -> int:
    """Unnormalized minimum rank min{rank(X - Y)}; for linear codes the
    minimum rank over nonzero codewords."""
    if code.size < 2:
        raise ValueError("minimum distance needs at least two codewords")
    if code.is_linear:
        best = None
        for w in codewords(code, limit):
            if w.is_zero():
                continue
            r = mat_rank(w)
            best = r if best is None else min(best, r)
            if best == 1:
                break
        return best
    words = code.words
    if len(words) * (len(words) - 1) // 2 > limit:
        raise GuardError("too many codeword pairs to enumerate")
    best = None
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            r = mat_rank(words[i] - words[j])
            best = r if best is None else min(best, r)
            if best == 1:
                return 1
    return best


def normalized_min_distance(code: RankCode, limit: int = ENUMERATION_LIMIT) -> Fraction:
    """min_rank_distance divided by n, exact."""
    return Fraction(min_rank_distance(code, limit), code.n)


def _radius(code: RankCode, rho) -> tuple[Fraction, int, int]:
    rho = Fraction(rho)
    spec = BallSpec(code.field.q, code.m, code.n, rho)
    return rho, spec.r_max, ball_volume(spec)


def list_decode(code: RankCode, center: MatrixF, rho, limit: int = ENUMERATION_LIMIT) -> list[MatrixF]:
    """All codewords within normalized rank distance rho of the center,
    sorted by encoding.  Enumerates whichever of (codewords, ball) is
    smaller; both beyond `limit` is an error."""
    if center.field != code.field or center.m != code.m or center.n != code.n:
        raise ValueError("center shape or field mismatch")
    _, r_max, vol = _radius(code, rho)
    if min(code.size, vol) > limit:
        raise GuardError(
            f"both the code ({code.size}) and the ball ({vol}) exceed the limit {limit}"
        )
    if code.size <= vol:
        hits = [w for w in codewords(code, limit) if mat_rank(w - center) <= r_max]
    else:
        hits = []
        for z in enumerate_low_rank(code.field, code.m, code.n, r_max, limit):
            x = center + z
            if code.contains(x):
                hits.append(x)
    hits.sort(key=lambda w: w.encode())
    return hits


def is_list_decodable_exact(
    code: RankCode, rho, list_bound: int, center_limit: int = CENTER_LIMIT
) -> tuple[bool, MatrixF | None]:
    """Scan every center: True iff no ball of radius rho holds more than
    list_bound codewords; otherwise also return the first offending center
    in encoding order."""
    if list_bound < 0:
        raise ValueError("the list bound must be non-negative")
    field = code.field
    universe = field.q ** (code.m * code.n)
    if universe > center_limit:
        raise GuardError(f"{universe} centers exceed the limit {center_limit}")
    _, r_max, _ = _radius(code, rho)
    ball0 = enumerate_low_rank(field, code.m, code.n, r_max)
    counts = [0] * universe
    for w in codewords(code):
        for z in ball0:
            counts[(w + z).encode()] += 1
    for enc, c in enumerate(counts):
        if c > list_bound:
            return False, MatrixF.decode(field, code.m, code.n, enc)
    return True, None


def ball_codeword_count(code: RankCode, center: MatrixF, rho, limit: int = ENUMERATION_LIMIT) -> int:
    """|B(center, rho) ∩ C| without materializing the list."""
    _, r_max, vol = _radius(code, rho)
    if min(code.size, vol) > limit:
        raise GuardError("counting guard exceeded")
    if code.size <= vol:
        return sum(1 for w in codewords(code, limit) if mat_rank(w - center) <= r_max)
    ball0 = enumerate_low_rank(code.field, code.m, code.n, r_max, limit)
    return sum(1 for z in ball0 if code.contains(center + z))


def max_list_size_monte_carlo(code: RankCode, rho, centers: int, rng) -> int:
    """Max of |B(Y, rho) ∩ C| over `centers` uniform centers Y: a lower
    bound for the exact maximum, monotone in `centers` under a fixed
    stream.  When `centers` >= q^(mn) (and the center guard allows), all
    centers are scanned instead and the result is exact."""
    if centers < 0:
        raise ValueError("the number of centers must be non-negative")
    if centers == 0:
        return 0
    field = code.field
    mn = code.m * code.n
    universe = field.q**mn
    _, r_max, vol = _radius(code, rho)
    # precompute the cheaper side once
    if code.size <= vol:
        words = list(codewords(code))
        ball0 = None
    else:
        words = None
        ball0 = enumerate_low_rank(field, code.m, code.n, r_max, ENUMERATION_LIMIT)

    def count_at(y: MatrixF) -> int:
        if words is not None:
            return sum(1 for w in words if mat_rank(w - y) <= r_max)
        return sum(1 for z in ball0 if code.contains(y + z))

    best = 0
    if centers >= universe:
        if universe > CENTER_LIMIT:
            raise GuardError(f"{universe} centers exceed the limit {CENTER_LIMIT}")
        for enc in range(universe):
            best = max(best, count_at(MatrixF.decode(field, code.m, code.n, enc)))
        return best
    from .sampling import sample_uniform_matrix

    for _ in range(centers):
        y = sample_uniform_matrix(field, code.m, code.n, rng)
        best = max(best, count_at(y))
    return best


@dataclass(frozen=True)
class DecodingParams:
    """Scalar parameters of a decoding regime: radius rho, capacity slack
    epsilon, aspect ratio b = n/m, target rate (1 - rho)(1 - b rho) - epsilon,
    and an optional list-size bound."""

    m: int
    n: int
    rho: Fraction
    epsilon: Fraction
    list_bound: int | None = None

    def __post_init__(self):
        if self.n < 1 or self.m < self.n:
            raise ValueError(f"need m >= n >= 1, got m={self.m}, n={self.n}")
        rho = Fraction(self.rho)
        eps = Fraction(self.epsilon)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "epsilon", eps)
        if not (0 < rho < 1):
            raise ValueError(f"rho must lie in (0, 1), got {rho}")
        if eps <= 0:
            raise ValueError(f"epsilon must be positive, got {eps}")
        if self.rate <= 0:
            raise ValueError(f"target rate {self.rate} is not positive")
        if self.list_bound is not None and self.list_bound < 1:
            raise ValueError("the list bound must be >= 1")

    @property
    def b(self) -> Fraction:
        return Fraction(self.n, self.m)

    @property
    def capacity(self) -> Fraction:
        return (1 - self.rho) * (1 - self.b * self.rho)

    @property
    def rate(self) -> Fraction:
        return self.capacity - self.epsilon

    def dimension(self) -> int:
        """floor(rate * mn): the code dimension realizing the target rate."""
        r = self.rate * self.m * self.n
        return r.numerator // r.denominator


# --- code text format ---


def code_to_text(code: RankCode) -> str:
    """Header "q m n k linear|general" followed by k basis matrices (linear)
    or all words (general), each in the matrix text format."""
    field = code.field
    if code.is_linear:
        mats = [
            mat_from_vector(field, code.m, code.n, row) for row in code.basis.rows
        ]
        head = f"{field.q} {code.m} {code.n} {len(mats)} linear"
    else:
        mats = list(code.words)
        head = f"{field.q} {code.m} {code.n} {len(mats)} general"
    return "\n".join([head] + [matrix_to_text(x).rstrip("\n") for x in mats]) + "\n"


def code_from_text(text: str) -> RankCode:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty code text")
    head = lines[0].split()
    if len(head) != 5 or head[4] not in ("linear", "general"):
        raise ValueError(f'expected header "q m n k linear|general", got {lines[0]!r}')
    q, m, n, k = (int(t) for t in head[:4])
    field = field_from_order(q)
    per = 1 + m  # each matrix block: its own header plus m rows
    if len(lines) != 1 + k * per:
        raise ValueError(f"expected {k} matrix blocks of {per} lines each")
    mats = []
    for i in range(k):
        block = lines[1 + i * per : 1 + (i + 1) * per]
        x = matrix_from_text("\n".join(block))
        if x.field != field or x.m != m or x.n != n:
            raise ValueError(f"matrix block {i} disagrees with the code header")
        mats.append(x)
    if head[4] == "linear":
        return linear_code(field, m, n, mats)
    return general_code(field, m, n, mats)
