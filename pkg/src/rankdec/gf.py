"""Exact arithmetic in GF(q) for prime powers q = p^e.

Elements are encoded as integers in [0, q): the element with polynomial
coefficients (c_0, ..., c_{e-1}) over F_p is encoded as sum_i c_i * p^i.
The canonical modulus for GF(p^e) is the monic irreducible polynomial of
degree e whose coefficient encoding is smallest under that same integer
order, so encodings are reproducible across runs and platforms.

Multiplication backends, selected automatically and invisible to callers:

* prime fields use plain modular arithmetic;
* extension fields with q <= 2^16 precompute log/antilog tables over a
  multiplicative generator;
* larger extension fields (up to 2^31) reduce polynomials on the fly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

MAX_TABLE_ORDER = 1 << 16
MAX_FIELD_ORDER = 1 << 31


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test."""
    if n < 2:
        return False
    for f in (2, 3):
        if n % f == 0:
            return n == f
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# --- polynomials over F_p as little-endian coefficient lists ---


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo a *monic* polynomial m."""
    a = list(a)
    dm = len(m) - 1
    while len(a) > dm:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    return _poly_trim(a)


def _poly_sub(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, ai in enumerate(a):
        out[i] = ai
    for i, bi in enumerate(b):
        out[i] = (out[i] - bi) % p
    return _poly_trim(out)


def _poly_eval(f: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def _poly_powmod(base: list[int], exp: int, m: list[int], p: int) -> list[int]:
    result = [1]
    b = _poly_mod(base, m, p)
    while exp:
        if exp & 1:
            result = _poly_mod(_poly_mul(result, b, p), m, p)
        b = _poly_mod(_poly_mul(b, b, p), m, p)
        exp >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        inv = pow(b[-1], p - 2, p)
        monic = [(c * inv) % p for c in b]
        a, b = b, _poly_mod(a, monic, p)
    return a


def _is_irreducible(coeffs: tuple[int, ...], e: int, p: int) -> bool:
    """Is x^e + sum coeffs[i] x^i irreducible over F_p?

    Degrees 2 and 3 reduce to a root check; higher degrees use the
    Frobenius/gcd criterion: x^{p^e} = x mod f and, for each prime r | e,
    gcd(x^{p^{e/r}} - x, f) = 1.
    """
    if e == 1:
        return True
    f = list(coeffs) + [1]
    if coeffs[0] == 0:
        return False
    if e <= 3:
        return all(_poly_eval(f, a, p) != 0 for a in range(p))
    x = [0, 1]
    if _poly_powmod(x, p**e, f, p) != x:
        return False
    for r in _prime_factors(e):
        g = _poly_sub(_poly_powmod(x, p ** (e // r), f, p), x, p)
        if len(_poly_gcd(f, g, p)) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def _least_irreducible(p: int, e: int) -> tuple[int, ...]:
    for enc in range(1, p**e):
        coeffs = tuple((enc // p**i) % p for i in range(e))
        if _is_irreducible(coeffs, e, p):
            return coeffs
    raise AssertionError(f"no monic irreducible of degree {e} over F_{p}")


class Field:
    """GF(p^e) with arithmetic on integer-encoded elements.

    Two Field instances are equal iff they have the same (p, e, modulus),
    so fields built through `build_field` interoperate freely.  Instances
    are immutable after construction and safe to share across tasks.
    """

    __slots__ = ("p", "e", "q", "modulus", "_exp", "_log", "_mod_int")

    def __init__(self, p: int, e: int = 1, modulus=None):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if e < 1:
            raise ValueError(f"extension degree must be >= 1, got {e}")
        q = p**e
        if q > MAX_FIELD_ORDER:
            raise ValueError(f"field order {q} exceeds the 2^31 limit")
        self.p = p
        self.e = e
        self.q = q
        if e == 1:
            if modulus:
                raise ValueError("prime fields take an empty modulus")
            self.modulus: tuple[int, ...] = ()
        else:
            coeffs = tuple(modulus) if modulus is not None else _least_irreducible(p, e)
            if len(coeffs) != e or any(not (0 <= c < p) for c in coeffs):
                raise ValueError("modulus must list e coefficients in [0, p)")
            if not _is_irreducible(coeffs, e, p):
                raise ValueError(f"modulus {coeffs} is reducible over F_{p}")
            self.modulus = coeffs
        # packed modulus (including the leading term) for the GF(2^e) bit path
        if p == 2 and e > 1:
            self._mod_int = (1 << e) | sum(c << i for i, c in enumerate(self.modulus))
        else:
            self._mod_int = 0
        if e > 1 and q <= MAX_TABLE_ORDER:
            self._build_tables()
        else:
            self._exp = None
            self._log = None

    # --- representation / identity ---

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.e})" if self.e > 1 else f"GF({self.p})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Field)
            and self.p == other.p
            and self.e == other.e
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    # --- raw polynomial backend (no tables) ---

    def _raw_mul(self, a: int, b: int) -> int:
        if self.p == 2:
            acc = 0
            x = a
            while b:
                if b & 1:
                    acc ^= x
                x <<= 1
                b >>= 1
            mod = self._mod_int
            top = acc.bit_length()
            while top > self.e:
                acc ^= mod << (top - 1 - self.e)
                top = acc.bit_length()
            return acc
        p = self.p
        da = [(a // p**i) % p for i in range(self.e)]
        db = [(b // p**i) % p for i in range(self.e)]
        prod = _poly_mul(da, db, p)
        rem = _poly_mod(prod, list(self.modulus) + [1], p)
        return sum(c * p**i for i, c in enumerate(rem))

    def _raw_pow(self, a: int, k: int) -> int:
        result = 1
        base = a
        while k:
            if k & 1:
                result = self._raw_mul(result, base)
            base = self._raw_mul(base, base)
            k >>= 1
        return result

    def _build_tables(self) -> None:
        q = self.q
        g = None
        factors = _prime_factors(q - 1)
        for cand in range(2, q):
            if all(self._raw_pow(cand, (q - 1) // r) != 1 for r in factors):
                g = cand
                break
        if g is None:
            raise AssertionError("no multiplicative generator found")
        exp = [1] * (q - 1)
        log = [0] * q
        cur = 1
        for i in range(1, q - 1):
            cur = self._raw_mul(cur, g)
            exp[i] = cur
            log[cur] = i
        self._exp = exp
        self._log = log

    # --- public arithmetic on encodings ---

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.e):
            out += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.e):
            out += ((-a) % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        if self.p == 2:
            return self.add(a, b)
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        if self._exp is not None:
            if a == 0 or b == 0:
                return 0
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return self._raw_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        if self._exp is not None:
            return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]
        return self._raw_pow(a, self.q - 2)

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            return self.pow(self.inv(a), -k)
        if a == 0:
            return 0 if k else 1
        if self._exp is not None:
            return self._exp[(self._log[a] * k) % (self.q - 1)]
        if self.e == 1:
            return pow(a, k, self.p)
        return self._raw_pow(a, k)

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def elements(self):
        """All encodings, ascending."""
        return range(self.q)


@dataclass(frozen=True)
class FieldElement:
    """An integer encoding tagged with its field; cross-field arithmetic is
    rejected rather than coerced."""

    value: int
    field: Field

    def __post_init__(self):
        if not (0 <= self.value < self.field.q):
            raise ValueError(f"encoding {self.value} outside [0, {self.field.q})")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return fe_add(self, other)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return fe_sub(self, other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return fe_mul(self, other)

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field.neg(self.value), self.field)


def _require_same_field(a: FieldElement, b: FieldElement) -> None:
    if a.field != b.field:
        raise ValueError(f"field mismatch: {a.field} vs {b.field}")


def fe_add(a: FieldElement, b: FieldElement) -> FieldElement:
    _require_same_field(a, b)
    return FieldElement(a.field.add(a.value, b.value), a.field)


def fe_sub(a: FieldElement, b: FieldElement) -> FieldElement:
    _require_same_field(a, b)
    return FieldElement(a.field.sub(a.value, b.value), a.field)


def fe_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _require_same_field(a, b)
    return FieldElement(a.field.mul(a.value, b.value), a.field)


def fe_inv(a: FieldElement) -> FieldElement:
    return FieldElement(a.field.inv(a.value), a.field)


@lru_cache(maxsize=None)
def build_field(p: int, e: int = 1) -> Field:
    """GF(p^e) with the canonical (lexicographically least) modulus."""
    return Field(p, e)


@lru_cache(maxsize=None)
def field_from_order(q: int) -> Field:
    """GF(q) for a prime power q, factoring q automatically."""
    if q < 2:
        raise ValueError(f"field order must be >= 2, got {q}")
    p = None
    for f in range(2, q + 1):
        if f * f > q:
            p = q
            break
        if q % f == 0:
            p = f
            break
    e = 0
    r = q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return build_field(p, e)
