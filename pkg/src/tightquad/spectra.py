"""Collinearity graph of the quadric and exact checks of its spectrum.

Nothing here uses floating point.  Eigenvalue claims are checked as
integer identities: the strongly regular quadratic, A W == sigma W for
explicit integer vectors W, and orthogonality after clearing denominators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .census import k_points, theta
from .polar import HyperbolicQuadric, bits
from .report import CheckReport
from .tight import StarNotSatisfied, WeightedSet


class NotStronglyRegular(ValueError):
    pass


class CollinearPair(ValueError):
    pass


@dataclass(frozen=True)
class CollinearityGraph:
    """Distinct collinear points are adjacent."""

    n_vertices: int
    adjacency: tuple[int, ...]      # neighbor bitmask per vertex

    def degree(self, i: int) -> int:
        return self.adjacency[i].bit_count()

    def neighbors(self, i: int) -> list[int]:
        return list(bits(self.adjacency[i]))

    @cached_property
    def matrix(self) -> np.ndarray:
        A = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        for i, m in enumerate(self.adjacency):
            A[i, list(bits(m))] = 1
        return A

    def apply(self, vec) -> list[int]:
        """A @ vec in exact integers."""
        v = np.array(vec, dtype=np.int64)
        if v.size and int(np.abs(v).max()) * self.n_vertices >= 1 << 62:
            return [sum(vec[j] for j in bits(m)) for m in self.adjacency]
        return [int(t) for t in self.matrix @ v]


@lru_cache(maxsize=32)
def build_graph(Q: HyperbolicQuadric) -> CollinearityGraph:
    adj = tuple(m & ~(1 << i) for i, m in enumerate(Q.perp_mask))
    return CollinearityGraph(len(Q), adj)


@dataclass
class SRGReport:
    v: int
    k: int
    lam: int
    mu: int
    eigenvalues: tuple[int, int, int]
    multiplicities: tuple[int, int, int]

    def as_dict(self) -> dict:
        return {
            "v": self.v,
            "k": self.k,
            "lambda": self.lam,
            "mu": self.mu,
            "eigenvalues": list(self.eigenvalues),
            "multiplicities": list(self.multiplicities),
        }


def srg_verify(G: CollinearityGraph, r: int, q: int) -> SRGReport:
    """Count (v, k, lambda, mu) and check the eigenvalues against the closed forms."""
    if r < 2:
        raise ValueError("needs rank >= 2")
    v = G.n_vertices
    degrees = {G.degree(i) for i in range(v)}
    if len(degrees) != 1:
        raise NotStronglyRegular(f"degrees {sorted(degrees)}")
    (k,) = degrees
    lams, mus = set(), set()
    for i in range(v):
        ai = G.adjacency[i]
        for j in range(i + 1, v):
            common = (ai & G.adjacency[j]).bit_count()
            (lams if (ai >> j) & 1 else mus).add(common)
    if len(lams) > 1 or len(mus) > 1:
        raise NotStronglyRegular(f"lambda values {sorted(lams)}, mu values {sorted(mus)}")
    lam = lams.pop() if lams else 0
    mu = mus.pop() if mus else 0

    sigma0 = q * k_points(r - 2, q)
    sigma1 = q ** (r - 1) - 1
    sigma2 = -(q ** (r - 2) + 1)
    if k != sigma0:
        raise NotStronglyRegular(f"degree {k} != q k_(r-2) = {sigma0}")
    for z in (sigma1, sigma2):
        if z * z - (lam - mu) * z - (k - mu) != 0:
            raise NotStronglyRegular(f"{z} is not a root of the SRG quadratic")
    # traces of I and A: 1 + m1 + m2 = v and k + m1 s1 + m2 s2 = 0
    m1 = Fraction(-k - (v - 1) * sigma2, sigma1 - sigma2)
    m2 = (v - 1) - m1
    if m1.denominator != 1 or m1 < 0 or m2 < 0:
        raise NotStronglyRegular(f"multiplicities {m1}, {m2} are not nonnegative integers")
    return SRGReport(v, k, lam, mu, (sigma0, sigma1, sigma2), (1, int(m1), int(m2)))


def srg_identity_holds(G: CollinearityGraph, k: int, lam: int, mu: int) -> bool:
    """A^2 == k I + lam A + mu (J - I - A), as integer matrices."""
    n = G.n_vertices
    A = G.matrix
    I = np.eye(n, dtype=np.int64)
    J = np.ones((n, n), dtype=np.int64)
    return bool(np.array_equal(A @ A, k * I + lam * A + mu * (J - I - A)))


def star_eigenvector_check(mu: WeightedSet) -> CheckReport:
    """(A mu)(P) == (q^(r-1) - 1) mu(P) + x theta(r-2) for every P.

    Also checks that D mu + x theta(r-2) 1, with D = sigma1 - sigma0, is an
    exact sigma1-eigenvector (this is the shifted vector with its
    denominator cleared).
    """
    Q = mu.quadric
    x = mu.x
    if x is None:
        raise StarNotSatisfied("weight function fails the star property")
    r, q = Q.rank, Q.q
    G = build_graph(Q)
    s0, s1 = q * k_points(r - 2, q), q ** (r - 1) - 1
    c = x * theta(r - 2, q)
    A_mu = G.apply(mu.weights)
    rep = CheckReport("star_eigenvector")
    for i, (lhs, w) in enumerate(zip(A_mu, mu.weights)):
        rep.checked += 1
        if lhs != s1 * w + c:
            rep.fail({"point": i, "lhs": lhs, "rhs": s1 * w + c})
    v = scaled_star_vector(mu)
    Av = G.apply(v)
    rep.checked += 1
    if Av != [s1 * t for t in v]:
        rep.fail({"eigenvector": "scaled v is not a sigma1-eigenvector"})
    rep.details = {"x": x, "sigma0": s0, "sigma1": s1}
    return rep


def scaled_star_vector(mu: WeightedSet) -> list[int]:
    """(sigma1 - sigma0) mu + x theta(r-2) 1."""
    Q = mu.quadric
    r, q = Q.rank, Q.q
    D = (q ** (r - 1) - 1) - q * k_points(r - 2, q)
    c = mu.x * theta(r - 2, q)
    return [D * w + c for w in mu.weights]


def pair_vector(Q: HyperbolicQuadric, p1: int, p2: int) -> list[int]:
    """theta(r-1) e_{P1,P2 perp} - theta(r-3) e_Q - q^(r-2) theta(r-1) (e_P1 + e_P2)."""
    if Q.collinear(p1, p2):
        raise CollinearPair(f"points {p1} and {p2} are collinear")
    r, q = Q.rank, Q.q
    t1, t3 = theta(r - 1, q), theta(r - 3, q)
    both = Q.perp_mask[p1] & Q.perp_mask[p2]
    W = [t1 * ((both >> i) & 1) - t3 for i in range(len(Q))]
    W[p1] -= q ** (r - 2) * t1
    W[p2] -= q ** (r - 2) * t1
    return W


def pair_eigenvector_check(Q: HyperbolicQuadric, p1: int, p2: int) -> CheckReport:
    if Q.rank < 2:
        raise ValueError("needs rank >= 2")
    W = pair_vector(Q, p1, p2)
    sigma2 = -(Q.q ** (Q.rank - 2) + 1)
    AW = build_graph(Q).apply(W)
    rep = CheckReport("pair_eigenvector", checked=len(W), details={"pair": [p1, p2]})
    for i, (a, w) in enumerate(zip(AW, W)):
        if a != sigma2 * w:
            rep.fail({"pair": [p1, p2], "point": i, "lhs": a, "rhs": sigma2 * w})
            break
    return rep


def orthogonality_check(mu: WeightedSet, p1: int, p2: int) -> bool:
    """<scaled v, W_{P1,P2}> == 0 in integers."""
    v = scaled_star_vector(mu)
    W = pair_vector(mu.quadric, p1, p2)
    return sum(a * b for a, b in zip(v, W)) == 0
