"""Support-growth chains in F_q^ell and a constructive translate search.

A sequence of vectors is c-increasing when each vector contributes at least
c support coordinates not covered earlier in the sequence.  Every non-empty
set S of size L has a translate S + w containing a c-increasing chain of
length at least

    floor( (1/c) log_q(L/2) - (1 - 1/c) log_q((q-1) ell) )

`find_translate_chain` makes that existence constructive: it scans translates
(exhaustively up to 2^20 of them, by seeded random search above that) and
extracts a chain greedily from each, returning a verifiable certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .errors import ChainSearchError
from .gf import Field
from .sampling import Xoshiro256StarStar

EXHAUSTIVE_TRANSLATE_LIMIT = 1 << 20


@dataclass(frozen=True)
class VectorQ:
    field: Field
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) == 0:
            raise ValueError("vectors must have positive length")
        if min(self.entries) < 0 or max(self.entries) >= self.field.q:
            raise ValueError("entry outside field encoding range")

    @property
    def ell(self) -> int:
        return len(self.entries)

    def support(self) -> frozenset[int]:
        return frozenset(i for i, v in enumerate(self.entries) if v)

    def support_mask(self) -> int:
        return sum(1 << i for i, v in enumerate(self.entries) if v)

    def __add__(self, other: "VectorQ") -> "VectorQ":
        self._check(other)
        add = self.field.add
        return VectorQ(self.field, tuple(add(a, b) for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "VectorQ") -> "VectorQ":
        self._check(other)
        sub = self.field.sub
        return VectorQ(self.field, tuple(sub(a, b) for a, b in zip(self.entries, other.entries)))

    def _check(self, other: "VectorQ") -> None:
        if self.field != other.field:
            raise ValueError("field mismatch")
        if len(self.entries) != len(other.entries):
            raise ValueError("length mismatch")


def _check_uniform(vectors: Sequence[VectorQ]) -> tuple[Field, int]:
    first = vectors[0]
    for v in vectors[1:]:
        first._check(v)
    return first.field, first.ell


def is_c_increasing(seq: Sequence[VectorQ], c: int) -> bool:
    """Does every vector add at least c new support coordinates?"""
    if c < 1:
        raise ValueError(f"c must be >= 1, got {c}")
    if not seq:
        return True
    _check_uniform(list(seq))
    union = 0
    for v in seq:
        mask = v.support_mask()
        if bin(mask & ~union).count("1") < c:
            return False
        union |= mask
    return True


def _greedy_masked(items: Sequence[tuple[tuple[int, ...], int, object]], c: int) -> list:
    """items: (sort_key, support_mask, payload), scanned in sorted key order."""
    union = 0
    kept = []
    for _, mask, payload in sorted(items, key=lambda t: t[0]):
        if bin(mask & ~union).count("1") >= c:
            kept.append(payload)
            union |= mask
    return kept


def greedy_chain(vectors: Iterable[VectorQ], c: int) -> list[VectorQ]:
    """Greedy c-increasing subsequence: scan the set in lexicographic entry
    order and keep every vector contributing at least c new coordinates.
    The result always satisfies `is_c_increasing`."""
    if c < 1:
        raise ValueError(f"c must be >= 1, got {c}")
    vs = list(vectors)
    if not vs:
        return []
    _check_uniform(vs)
    return _greedy_masked([(v.entries, v.support_mask(), v) for v in vs], c)


def chain_guarantee(q: int, ell: int, size: int, c: int) -> int:
    """Guaranteed chain length for a size-`size` subset of F_q^ell.

    floor((1/c) log_q(size/2) - (1 - 1/c) log_q((q-1) ell)), clamped at 0,
    evaluated purely in integer arithmetic: the floor equals the largest
    k >= 0 with 2 * q^(ck) * ((q-1) ell)^(c-1) <= size.
    """
    if q < 2 or ell < 1 or c < 1:
        raise ValueError("need q >= 2, ell >= 1, c >= 1")
    if size < 1:
        raise ValueError(f"set size must be >= 1, got {size}")
    base = 2 * ((q - 1) * ell) ** (c - 1)
    if base > size:
        return 0
    k = 0
    while base * q ** (c * (k + 1)) <= size:
        k += 1
    return k


@dataclass(frozen=True)
class ChainCertificate:
    """Witness translate w plus a chain drawn from the input set such that
    the translated sequence (v_1 + w, ..., v_d + w) is c-increasing."""

    translate: VectorQ
    chain: tuple[VectorQ, ...]
    c: int

    @property
    def length(self) -> int:
        return len(self.chain)

    def verify(self, vectors: Iterable[VectorQ]) -> bool:
        members = set(vectors)
        if any(v not in members for v in self.chain):
            return False
        return is_c_increasing([v + self.translate for v in self.chain], self.c)


def _all_translates(field: Field, ell: int):
    for ent in product(range(field.q), repeat=ell):
        yield VectorQ(field, ent)


def find_translate_chain(
    vectors: Iterable[VectorQ],
    c: int,
    mode: str = "auto",
    budget: int = 4096,
    rng: Xoshiro256StarStar | None = None,
) -> ChainCertificate:
    """Search translates of the input set for a long c-increasing chain.

    Exhaustive mode scans all q^ell translates in lexicographic order and is
    fully deterministic: on ties the lexicographically least witness wins.
    Randomized mode (required above 2^20 translates) tries `budget` random
    translates and fails loudly if the guaranteed length is not reached.
    """
    vs = sorted(set(vectors), key=lambda v: v.entries)
    if not vs:
        raise ValueError("the input set must be non-empty")
    if c < 1:
        raise ValueError(f"c must be >= 1, got {c}")
    field, ell = _check_uniform(vs)
    if mode not in ("auto", "exhaustive", "randomized"):
        raise ValueError(f"unknown mode {mode!r}")
    n_translates = field.q**ell
    exhaustive = mode == "exhaustive" or (mode == "auto" and n_translates <= EXHAUSTIVE_TRANSLATE_LIMIT)
    if mode == "exhaustive" and n_translates > EXHAUSTIVE_TRANSLATE_LIMIT:
        raise ChainSearchError(
            f"{n_translates} translates exceed the exhaustive limit of {EXHAUSTIVE_TRANSLATE_LIMIT}"
        )

    guarantee = chain_guarantee(field.q, ell, len(vs), c)
    max_possible = ell // c
    best_len = -1
    best: ChainCertificate | None = None

    def consider(w: VectorQ) -> None:
        nonlocal best_len, best
        items = []
        for v in vs:
            t = v + w
            items.append((t.entries, t.support_mask(), v))
        chain = _greedy_masked(items, c)
        if len(chain) > best_len:
            best_len = len(chain)
            best = ChainCertificate(w, tuple(chain), c)

    if exhaustive:
        for w in _all_translates(field, ell):
            consider(w)
            if best_len >= max_possible:
                break
    else:
        rng = rng if rng is not None else Xoshiro256StarStar.from_seed(0)
        for _ in range(budget):
            consider(VectorQ(field, tuple(rng.randbelow(field.q) for _ in range(ell))))
            if best_len >= max_possible:
                break

    if best is None:
        raise ChainSearchError("no translates were tried (budget 0)")
    if best_len < guarantee:
        raise ChainSearchError(
            f"best chain length {best_len} below the guaranteed {guarantee} "
            f"after {'exhaustive scan' if exhaustive else f'{budget} random translates'}"
        )
    return best
