"""Finite fields GF(p^e) with a canonical, reproducible construction.

Elements are plain ints in ``[0, q)``.  The code of an element with
power-basis coordinates ``(c_0, ..., c_{e-1})`` is ``sum(c_i * p**i)``, so
0 and 1 are the additive and multiplicative identities and elements are
totally ordered.

The defining polynomial is the lexicographically smallest monic irreducible
of degree ``e`` over GF(p), comparing coefficient tuples from the constant
term upward.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

MAX_ORDER = 1 << 16
TABLE_LIMIT = 256


class NotPrimePower(ValueError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``, or raise NotPrimePower."""
    if not isinstance(q, int) or q < 2:
        raise NotPrimePower(f"{q!r} is not a prime power")
    p = next(d for d in itertools.count(2) if d * d > q or q % d == 0)
    if p * p > q:
        return q, 1
    e, rest = 0, q
    while rest % p == 0:
        rest //= p
        e += 1
    if rest != 1:
        raise NotPrimePower(f"{q} has at least two distinct prime factors")
    return p, e


# -- polynomials over GF(p): coefficient tuples, constant term first ---------

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    """Remainder of a modulo the monic polynomial m."""
    a = _poly_trim(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = a[-1]
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        a = _poly_trim(a)
    return a


def _monic(coeffs):
    return tuple(coeffs) + (1,)


def is_irreducible(modulus, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(modulus) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(modulus, _monic(low), p):
                return False
    return True


def canonical_modulus(p: int, e: int) -> tuple[int, ...]:
    for low in itertools.product(range(p), repeat=e):
        cand = _monic(low)
        if is_irreducible(cand, p):
            return cand
    raise AssertionError(f"no irreducible polynomial of degree {e} over GF({p})")


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """GF(q) with ``q = p**e``.  Immutable; operations act on int codes."""

    p: int
    e: int
    modulus: tuple[int, ...]
    _mul: list | None = field(default=None, repr=False)
    _inv: list | None = field(default=None, repr=False)

    @property
    def q(self) -> int:
        return self.p ** self.e

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.e, self.modulus) == (
            other.p, other.e, other.modulus)

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    @property
    def elements(self) -> range:
        return range(self.q)

    # coordinates in the power basis
    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.e):
            a, c = divmod(a, self.p)
            out.append(c)
        return out

    def encode(self, digits) -> int:
        code = 0
        for c in reversed(list(digits)):
            code = code * self.p + c % self.p
        return code

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.encode(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def neg(self, a: int) -> int:
        if self.e == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return self.encode(-x for x in self.digits(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _poly_mul(self, a: int, b: int) -> int:
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        rem = _poly_mod(prod, self.modulus, self.p)
        return self.encode(rem)

    def mul(self, a: int, b: int) -> int:
        if self._mul is not None:
            return self._mul[a][b]
        if self.e == 1:
            return a * b % self.p
        return self._poly_mul(a, b)

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        result = 1
        while k:
            if k & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            k >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self._inv is not None:
            return self._inv[a]
        if self.e == 1:
            return pow(a, -1, self.p)
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def add_table(self) -> list[list[int]]:
        return [[self.add(a, b) for b in self.elements] for a in self.elements]

    def mul_table(self) -> list[list[int]]:
        if self._mul is not None:
            return [row[:] for row in self._mul]
        return [[self.mul(a, b) for b in self.elements] for a in self.elements]


@lru_cache(maxsize=None)
def make_field(q: int) -> FieldSpec:
    """Canonical GF(q).  Raises NotPrimePower for anything else."""
    p, e = factor_prime_power(q)
    if q > MAX_ORDER:
        raise NotPrimePower(f"fields larger than {MAX_ORDER} are not supported")
    modulus = (0, 1) if e == 1 else canonical_modulus(p, e)
    F = FieldSpec(p, e, modulus)
    if q <= TABLE_LIMIT:
        mul = [[F.mul(a, b) for b in range(q)] for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            inv[a] = next(b for b in range(1, q) if mul[a][b] == 1)
        object.__setattr__(F, "_mul", mul)
        object.__setattr__(F, "_inv", inv)
    return F


# thin functional aliases

def f_add(F: FieldSpec, a: int, b: int) -> int:
    return F.add(a, b)


def f_mul(F: FieldSpec, a: int, b: int) -> int:
    return F.mul(a, b)


def f_neg(F: FieldSpec, a: int) -> int:
    return F.neg(a)


def f_inv(F: FieldSpec, a: int) -> int:
    return F.inv(a)
