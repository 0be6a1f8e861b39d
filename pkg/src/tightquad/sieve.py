"""Modular sieve on tight-set parameters.

For an x-tight set of a rank-r quadric, the number w of its points on any
generator satisfies

    odd rank:   C(x, 2) + w (w - x) == 0  (mod q + 1)
    even rank:            w (w - x) == 0  (mod q + 1)

Both depend on w only modulo q + 1, so x is excluded exactly when no
residue w in {0, ..., q} works.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .galois import factor_prime_power


class RangeEmpty(ValueError):
    pass


@dataclass(frozen=True)
class SieveResult:
    q: int
    r: int
    x: int
    residues: tuple[int, ...]

    @property
    def parity(self) -> int:
        return (self.r - 1) % 2

    @property
    def excluded(self) -> bool:
        return not self.residues

    def as_dict(self) -> dict:
        return {"x": self.x, "residues": list(self.residues), "excluded": self.excluded}


def _check(q: int, r: int):
    factor_prime_power(q)
    if r < 2:
        raise ValueError("rank must be >= 2")


def admissible_residues(x: int, q: int, r: int) -> tuple[int, ...]:
    _check(q, r)
    if x < 0:
        raise ValueError("x must be nonnegative")
    base = x * (x - 1) // 2 if r % 2 else 0
    return tuple(w for w in range(q + 1) if (base + w * (w - x)) % (q + 1) == 0)


def sieve(x: int, q: int, r: int) -> SieveResult:
    return SieveResult(q, r, x, admissible_residues(x, q, r))


def default_xmax(q: int, r: int) -> int:
    """Up to complementation, x <= (q^(r-1) + 1) / 2."""
    return (q ** (r - 1) + 1) // 2


def excluded_parameters(q: int, r: int, x_max: int | None = None) -> list[int]:
    x_max = default_xmax(q, r) if x_max is None else x_max
    if x_max < 1:
        raise ValueError("x_max must be >= 1")
    return [x for x in range(1, x_max + 1) if not admissible_residues(x, q, r)]


def exclusion_fraction(q: int, r: int) -> Fraction:
    """Share of x in {3, ..., floor((q^(r-1)+1)/2)} that the sieve excludes."""
    if r % 2 == 0:
        raise ValueError("the binomial congruence only arises for odd rank")
    hi = default_xmax(q, r)
    if hi < 3:
        raise RangeEmpty(f"no parameters in 3..{hi} for q={q}, rank={r}")
    excluded = [x for x in excluded_parameters(q, r, hi) if x >= 3]
    return Fraction(len(excluded), hi - 2)


def complement_asymmetries(q: int, r: int) -> list[int]:
    """x in [0, q^(r-1)+1] whose excluded status differs from that of its complement.

    An empirical probe; nothing guarantees this list is empty.
    """
    top = q ** (r - 1) + 1
    return [x for x in range(top + 1)
            if bool(admissible_residues(x, q, r)) != bool(admissible_residues(top - x, q, r))]
