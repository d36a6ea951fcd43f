"""Matrices over GF(q): rank, normalized rank distance, canonical subspaces.

Matrices are immutable with entries stored row-major as field encodings.
Rank-distance work stays exact end to end: membership of Y in the radius-rho
ball around X is the integer comparison rank(X - Y) <= floor(rho * n), and
the normalized distance itself is a Fraction, never a float.

GF(2) elimination runs on bit-packed rows; every other field takes the
generic elementwise path.  The two paths compute identical results.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .errors import GuardError
from .gf import Field, FieldElement, field_from_order


@dataclass(frozen=True)
class MatrixF:
    field: Field
    m: int
    n: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"matrix dimensions must be positive, got {self.m}x{self.n}")
        if len(self.entries) != self.m * self.n:
            raise ValueError(f"expected {self.m * self.n} entries, got {len(self.entries)}")
        if min(self.entries) < 0 or max(self.entries) >= self.field.q:
            raise ValueError("entry outside field encoding range")

    @classmethod
    def zeros(cls, field: Field, m: int, n: int) -> "MatrixF":
        return cls(field, m, n, (0,) * (m * n))

    @classmethod
    def identity(cls, field: Field, n: int) -> "MatrixF":
        ent = [0] * (n * n)
        for i in range(n):
            ent[i * n + i] = 1
        return cls(field, n, n, tuple(ent))

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence[int]]) -> "MatrixF":
        m = len(rows)
        if m == 0:
            raise ValueError("no rows given")
        n = len(rows[0])
        flat = []
        for r in rows:
            if len(r) != n:
                raise ValueError("ragged rows")
            flat.extend(r)
        return cls(field, m, n, tuple(flat))

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.n : (i + 1) * self.n]

    def rows(self) -> list[tuple[int, ...]]:
        return [self.row(i) for i in range(self.m)]

    def transpose(self) -> "MatrixF":
        m, n, e = self.m, self.n, self.entries
        return MatrixF(self.field, n, m, tuple(e[i * n + j] for j in range(n) for i in range(m)))

    def _check_shape(self, other: "MatrixF") -> None:
        if self.field != other.field:
            raise ValueError("field mismatch")
        if self.m != other.m or self.n != other.n:
            raise ValueError(f"shape mismatch: {self.m}x{self.n} vs {other.m}x{other.n}")

    def __add__(self, other: "MatrixF") -> "MatrixF":
        self._check_shape(other)
        f = self.field
        if f.p == 2:
            ent = tuple(a ^ b for a, b in zip(self.entries, other.entries))
        else:
            add = f.add
            ent = tuple(add(a, b) for a, b in zip(self.entries, other.entries))
        return MatrixF(f, self.m, self.n, ent)

    def __sub__(self, other: "MatrixF") -> "MatrixF":
        self._check_shape(other)
        f = self.field
        if f.p == 2:
            ent = tuple(a ^ b for a, b in zip(self.entries, other.entries))
        else:
            sub = f.sub
            ent = tuple(sub(a, b) for a, b in zip(self.entries, other.entries))
        return MatrixF(f, self.m, self.n, ent)

    def __neg__(self) -> "MatrixF":
        f = self.field
        return MatrixF(f, self.m, self.n, tuple(f.neg(a) for a in self.entries))

    def scale(self, c) -> "MatrixF":
        c = _coeff_encoding(c, self.field)
        mul = self.field.mul
        return MatrixF(self.field, self.m, self.n, tuple(mul(c, a) for a in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def encode(self) -> int:
        """Row-major base-q integer; entries[0] is the least significant digit."""
        q = self.field.q
        out = 0
        for v in reversed(self.entries):
            out = out * q + v
        return out

    @classmethod
    def decode(cls, field: Field, m: int, n: int, code: int) -> "MatrixF":
        q = field.q
        ent = []
        for _ in range(m * n):
            ent.append(code % q)
            code //= q
        if code:
            raise ValueError("encoding out of range for the given shape")
        return cls(field, m, n, tuple(ent))


def _coeff_encoding(c, field: Field) -> int:
    if isinstance(c, FieldElement):
        if c.field != field:
            raise ValueError("field mismatch")
        return c.value
    c = int(c)
    if not (0 <= c < field.q):
        raise ValueError(f"coefficient {c} outside [0, {field.q})")
    return c


# --- rank / elimination ---


def _pack_gf2(rows: Iterable[Sequence[int]]) -> list[int]:
    return [sum(1 << j for j, v in enumerate(r) if v) for r in rows]


def _unpack_gf2(packed: int, ncols: int) -> tuple[int, ...]:
    return tuple((packed >> j) & 1 for j in range(ncols))


def _rank_gf2(prows: list[int]) -> int:
    work = [r for r in prows if r]
    rank = 0
    while work:
        row = work.pop()
        low = row & -row
        rank += 1
        work = [(r ^ row) if (r & low) else r for r in work]
        work = [r for r in work if r]
    return rank


def _rank_generic(rows: list[list[int]], field: Field) -> int:
    work = [list(r) for r in rows]
    nrows = len(work)
    if nrows == 0:
        return 0
    ncols = len(work[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, nrows):
            if work[i][col]:
                piv = i
                break
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        prow = work[rank]
        inv = field.inv(prow[col])
        mul, sub = field.mul, field.sub
        for i in range(rank + 1, nrows):
            f = work[i][col]
            if f:
                factor = mul(f, inv)
                ri = work[i]
                for j in range(col, ncols):
                    ri[j] = sub(ri[j], mul(factor, prow[j]))
        rank += 1
        if rank == nrows:
            break
    return rank


def rank_of_rows(field: Field, rows: Sequence[Sequence[int]]) -> int:
    if not rows:
        return 0
    if field.q == 2:
        return _rank_gf2(_pack_gf2(rows))
    return _rank_generic([list(r) for r in rows], field)


def mat_rank(x: MatrixF) -> int:
    """Rank over the matrix's field, via Gaussian elimination."""
    if x.field.q == 2:
        n, e = x.n, x.entries
        packed = []
        for i in range(x.m):
            acc = 0
            for j in range(n):
                if e[i * n + j]:
                    acc |= 1 << j
            packed.append(acc)
        return _rank_gf2(packed)
    return _rank_generic([list(x.row(i)) for i in range(x.m)], x.field)


def rank_distance(x: MatrixF, y: MatrixF) -> Fraction:
    """rank(x - y) / n as an exact rational."""
    x._check_shape(y)
    return Fraction(mat_rank(x - y), x.n)


def mat_linear_combine(coeffs: Sequence, mats: Sequence[MatrixF]) -> MatrixF:
    if len(coeffs) != len(mats):
        raise ValueError(f"{len(coeffs)} coefficients for {len(mats)} matrices")
    if not mats:
        raise ValueError("empty combination")
    first = mats[0]
    field = first.field
    for x in mats[1:]:
        first._check_shape(x)
    enc = [_coeff_encoding(c, field) for c in coeffs]
    acc = [0] * (first.m * first.n)
    add, mul = field.add, field.mul
    for c, x in zip(enc, mats):
        if c == 0:
            continue
        if c == 1:
            for i, v in enumerate(x.entries):
                if v:
                    acc[i] = add(acc[i], v)
        else:
            for i, v in enumerate(x.entries):
                if v:
                    acc[i] = add(acc[i], mul(c, v))
    return MatrixF(field, first.m, first.n, tuple(acc))


def mat_mul(a: MatrixF, b: MatrixF) -> MatrixF:
    if a.field != b.field:
        raise ValueError("field mismatch")
    if a.n != b.m:
        raise ValueError(f"inner dimensions differ: {a.n} vs {b.m}")
    field = a.field
    if field.q == 2:
        brows = _pack_gf2(b.rows())
        out_rows = []
        for i in range(a.m):
            acc = 0
            arow = a.row(i)
            for j in range(a.n):
                if arow[j]:
                    acc ^= brows[j]
            out_rows.append(_unpack_gf2(acc, b.n))
        return MatrixF.from_rows(field, out_rows)
    add, mul = field.add, field.mul
    out = []
    brows = b.rows()
    for i in range(a.m):
        arow = a.row(i)
        row = [0] * b.n
        for j in range(a.n):
            c = arow[j]
            if c:
                br = brows[j]
                for k in range(b.n):
                    if br[k]:
                        row[k] = add(row[k], mul(c, br[k]))
        out.append(row)
    return MatrixF.from_rows(field, out)


# --- reduced row echelon form and subspaces ---


def _rref_gf2(prows: list[int], ncols: int) -> list[tuple[int, ...]]:
    work = [r for r in prows if r]
    basis: list[int] = []  # kept in construction order, pivots tracked separately
    pivots: list[int] = []
    for col in range(ncols):
        piv_row = None
        for idx, r in enumerate(work):
            if (r >> col) & 1:
                piv_row = idx
                break
        if piv_row is None:
            continue
        row = work.pop(piv_row)
        work = [(r ^ row) if ((r >> col) & 1) else r for r in work]
        work = [r for r in work if r]
        basis = [(b ^ row) if ((b >> col) & 1) else b for b in basis]
        basis.append(row)
        pivots.append(col)
        if not work:
            break
    order = sorted(range(len(basis)), key=lambda i: pivots[i])
    return [_unpack_gf2(basis[i], ncols) for i in order]


def _rref_generic(rows: list[list[int]], ncols: int, field: Field) -> list[tuple[int, ...]]:
    work = [list(r) for r in rows]
    mul, sub, inv = field.mul, field.sub, field.inv
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(work)):
            if work[i][col]:
                piv = i
                break
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        prow = work[rank]
        s = inv(prow[col])
        if s != 1:
            for j in range(ncols):
                prow[j] = mul(s, prow[j])
        for i in range(len(work)):
            if i != rank and work[i][col]:
                f = work[i][col]
                ri = work[i]
                for j in range(ncols):
                    if prow[j]:
                        ri[j] = sub(ri[j], mul(f, prow[j]))
        rank += 1
        if rank == len(work):
            break
    return [tuple(r) for r in work[:rank]]


def rref_rows(field: Field, rows: Sequence[Sequence[int]], ncols: int) -> tuple[tuple[int, ...], ...]:
    """Canonical RREF basis (no zero rows, pivots ascending) of the row span."""
    for r in rows:
        if len(r) != ncols:
            raise ValueError("row length does not match the ambient dimension")
    if not rows:
        return ()
    if field.q == 2:
        return tuple(_rref_gf2(_pack_gf2(rows), ncols))
    return tuple(_rref_generic([list(r) for r in rows], ncols, field))


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_q^ambient in canonical reduced-row-echelon form.

    Two Subspace values are equal iff their basis rows match entrywise,
    which makes equality on subspaces exact set equality.
    """

    field: Field
    ambient_dim: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise ValueError("ambient dimension must be positive")
        if len(self.rows) > self.ambient_dim:
            raise ValueError("more basis rows than the ambient dimension")
        q = self.field.q
        last_piv = -1
        pivots = []
        for r in self.rows:
            if len(r) != self.ambient_dim:
                raise ValueError("basis row length differs from the ambient dimension")
            if min(r, default=0) < 0 or max(r, default=0) >= q:
                raise ValueError("entry outside field encoding range")
            piv = next((j for j, v in enumerate(r) if v), None)
            if piv is None:
                raise ValueError("zero basis row")
            if piv <= last_piv or r[piv] != 1:
                raise ValueError("basis is not in reduced row echelon form")
            last_piv = piv
            pivots.append(piv)
        for i, r in enumerate(self.rows):
            for j, p in enumerate(pivots):
                if i != j and r[p] != 0:
                    raise ValueError("basis is not in reduced row echelon form")

    @property
    def dim(self) -> int:
        return len(self.rows)

    @classmethod
    def span(cls, field: Field, ambient_dim: int, vectors: Sequence[Sequence[int]]) -> "Subspace":
        return cls(field, ambient_dim, rref_rows(field, vectors, ambient_dim))

    def contains(self, vec: Sequence[int]) -> bool:
        if len(vec) != self.ambient_dim:
            raise ValueError("vector length differs from the ambient dimension")
        v = list(vec)
        sub, mul = self.field.sub, self.field.mul
        for r in self.rows:
            piv = next(j for j, x in enumerate(r) if x)
            c = v[piv]
            if c:
                for j in range(piv, self.ambient_dim):
                    if r[j]:
                        v[j] = sub(v[j], mul(c, r[j]))
        return not any(v)

    def basis_matrix(self) -> MatrixF | None:
        if not self.rows:
            return None
        return MatrixF.from_rows(self.field, self.rows)


def subspace_from_rows(x: MatrixF) -> Subspace:
    """Canonical subspace spanned by the rows of x; dependent rows collapse."""
    return Subspace.span(x.field, x.n, x.rows())


def _check_same_ambient(u: Subspace, v: Subspace) -> None:
    if u.field != v.field:
        raise ValueError("field mismatch")
    if u.ambient_dim != v.ambient_dim:
        raise ValueError(f"ambient mismatch: {u.ambient_dim} vs {v.ambient_dim}")


def subspace_sum_dim(u: Subspace, v: Subspace) -> int:
    _check_same_ambient(u, v)
    return rank_of_rows(u.field, list(u.rows) + list(v.rows))


def subspace_intersect_dim(u: Subspace, v: Subspace) -> int:
    """dim(U) + dim(V) - dim(U + V), by the modular law."""
    return u.dim + v.dim - subspace_sum_dim(u, v)


# --- enumeration ---


def enumerate_matrices(field: Field, m: int, n: int) -> Iterator[MatrixF]:
    """All q^(mn) matrices, in encoding order.  Caller guards the size."""
    for ent in product(range(field.q), repeat=m * n):
        # product varies the last position fastest; encoding order wants the
        # first position fastest, so reverse.
        yield MatrixF(field, m, n, tuple(reversed(ent)))


def enumerate_subspaces(field: Field, ambient_dim: int, k: int) -> Iterator[Subspace]:
    """All k-dimensional subspaces of F_q^ambient, one canonical RREF each."""
    if not (0 <= k <= ambient_dim):
        raise ValueError(f"dimension {k} outside [0, {ambient_dim}]")
    if k == 0:
        yield Subspace(field, ambient_dim, ())
        return
    q = field.q
    for pivots in combinations(range(ambient_dim), k):
        pivset = set(pivots)
        free = [
            (i, j)
            for i in range(k)
            for j in range(pivots[i] + 1, ambient_dim)
            if j not in pivset
        ]
        for values in product(range(q), repeat=len(free)):
            rows = [[0] * ambient_dim for _ in range(k)]
            for i in range(k):
                rows[i][pivots[i]] = 1
            for (i, j), v in zip(free, values):
                rows[i][j] = v
            yield Subspace(field, ambient_dim, tuple(tuple(r) for r in rows))


def enumerate_low_rank(
    field: Field, m: int, n: int, r_max: int, limit: int | None = None
) -> list[MatrixF]:
    """All m x n matrices of rank <= r_max, sorted by encoding.

    Generated by sweeping column spaces of dimension r_max and all
    coefficient matrices, deduplicating; this touches each matrix a small
    constant number of times instead of scanning all q^(mn).
    """
    if not (0 <= r_max <= min(m, n)):
        raise ValueError(f"rank bound {r_max} outside [0, {min(m, n)}]")
    if r_max == 0:
        return [MatrixF.zeros(field, m, n)]
    seen: set[int] = set()
    out: list[MatrixF] = []
    for space in enumerate_subspaces(field, m, r_max):
        basis_t = MatrixF.from_rows(field, space.rows).transpose()  # m x r
        for coeffs in product(range(field.q), repeat=r_max * n):
            coeff_mat = MatrixF(field, r_max, n, tuple(coeffs))
            x = mat_mul(basis_t, coeff_mat)
            code = x.encode()
            if code not in seen:
                seen.add(code)
                out.append(x)
                if limit is not None and len(out) > limit:
                    raise GuardError(f"ball enumeration exceeded the limit of {limit}")
    out.sort(key=lambda x: x.encode())
    return out


# --- text format ---


def matrix_to_text(x: MatrixF) -> str:
    """First line "q m n", then m lines of n space-separated encodings."""
    lines = [f"{x.field.q} {x.m} {x.n}"]
    for i in range(x.m):
        lines.append(" ".join(str(v) for v in x.row(i)))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> MatrixF:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f'expected header "q m n", got {lines[0]!r}')
    q, m, n = (int(t) for t in head)
    field = field_from_order(q)
    if len(lines) != 1 + m:
        raise ValueError(f"expected {m} entry rows, got {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        row = [int(t) for t in ln.split()]
        if len(row) != n:
            raise ValueError(f"expected {n} entries per row, got {len(row)}")
        rows.append(row)
    return MatrixF.from_rows(field, rows)
