"""Closed-form counts for Q+(2r-1, q) and exhaustive checks of them.

All formulas are stated for the rank r.  Translation from the usual
notation: a quadric Q+(2n+1, q) has rank r = n + 1, and the point count of
a rank-(m+1) quadric is k_m = (q^m + 1) * theta_m.
"""

from __future__ import annotations

from dataclasses import dataclass

from .polar import HyperbolicQuadric, PointNotOnQuadric, bits
from .report import CheckReport


class BadIndex(ValueError):
    pass


def theta(k: int, q: int) -> int:
    """Number of points of PG(k, q); theta(-1) = 0."""
    if k < -1:
        raise BadIndex(f"theta is defined for k >= -1, got {k}")
    return (q ** (k + 1) - 1) // (q - 1)


def k_points(m: int, q: int) -> int:
    """Points of a rank-(m+1) hyperbolic quadric, with k_{-1} = 0 by convention."""
    if m < 0:
        return 0
    return (q ** m + 1) * theta(m, q)


@dataclass(frozen=True)
class CountTable:
    q: int
    r: int
    theta: dict
    points: int
    noncollinear: int
    one_perp: int | None
    lam: int | None
    sigma0: int
    sigma1: int
    sigma2: int | None

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "rank": self.r,
            "theta": {str(k): v for k, v in self.theta.items()},
            "points": self.points,
            "noncollinear": self.noncollinear,
            "one_perp": self.one_perp,
            "lambda": self.lam,
            "sigma0": self.sigma0,
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
        }


def count_table(r: int, q: int) -> CountTable:
    if r < 1:
        raise ValueError("rank must be >= 1")
    return CountTable(
        q=q,
        r=r,
        theta={k: theta(k, q) for k in range(-1, 2 * r + 1)},
        points=k_points(r - 1, q),
        noncollinear=q ** (2 * (r - 1)),
        one_perp=q ** (2 * r - 3) if r >= 2 else None,
        lam=q ** (2 * r - 4) if r >= 2 else None,
        sigma0=q * k_points(r - 2, q),
        sigma1=q ** (r - 1) - 1,
        sigma2=-(q ** (r - 2) + 1) if r >= 2 else None,
    )


def lemma_lm_proof_count(r: int, q: int) -> int:
    """theta_1 + k_{r-3}(theta_2 - theta_1) - theta_2 - k_{r-4}(theta_3 - theta_2).

    The number of points in P^perp cap P'^perp outside P0^perp, assembled
    from the planes on the line <P, P'>; it should equal q^(2r-4).
    """
    t1, t2, t3 = theta(1, q), theta(2, q), theta(3, q)
    return t1 + k_points(r - 3, q) * (t2 - t1) - t2 - k_points(r - 4, q) * (t3 - t2)


def verify_counts(Q: HyperbolicQuadric) -> list[CheckReport]:
    """Exhaustively check the point total and the pair counts on Q."""
    q, r = Q.q, Q.rank
    N = len(Q)
    perp = Q.perp_mask

    total = CheckReport("points")
    total.checked = 1
    total.details = {"observed": N, "expected": k_points(r - 1, q)}
    if N != k_points(r - 1, q):
        total.fail({"observed": N})

    noncol = CheckReport("noncollinear_per_point")
    for i in range(N):
        noncol.checked += 1
        c = N - perp[i].bit_count()
        if c != q ** (2 * (r - 1)):
            noncol.fail({"point": i, "observed": c})

    pair_perp = CheckReport("noncollinear_pair_perp")
    one_side = CheckReport("collinear_pair_exclusive")
    sub_points = k_points(r - 2, q)
    exclusive = q ** (2 * r - 3) if r >= 2 else None
    for i in range(N):
        pi = perp[i]
        for j in range(i + 1, N):
            pj = perp[j]
            if (pi >> j) & 1:
                # collinear with P_i but not with P_j, and the reverse
                one_side.checked += 1
                c, d = (pi & ~pj).bit_count(), (pj & ~pi).bit_count()
                if c != exclusive or d != exclusive:
                    one_side.fail({"pair": [i, j], "observed": [c, d]})
            else:
                pair_perp.checked += 1
                c = (pi & pj).bit_count()
                if c != sub_points:
                    pair_perp.fail({"pair": [i, j], "observed": c})
    pair_perp.details = {"expected": sub_points}
    one_side.details = {"expected": exclusive}
    return [total, noncol, pair_perp, one_side]


def verify_lemma_lm(Q: HyperbolicQuadric, p0: int) -> CheckReport:
    """Scan all pairs P, P' in P0^perp minus P0 and classify them.

    (a) <P,P'> on Q through P0: P^perp cap P'^perp lies inside P0^perp.
    (b) <P,P'> on Q missing P0, and (c) <P,P'> not on Q: exactly
        q^(2r-4) points of P^perp cap P'^perp lie outside P0^perp.
    """
    if not 0 <= p0 < len(Q):
        raise PointNotOnQuadric(f"no quadric point with index {p0}")
    r, q = Q.rank, Q.q
    if r < 2:
        raise ValueError("needs rank >= 2")
    lam = q ** (2 * r - 4)
    perp = Q.perp_mask
    outside = Q.full_mask & ~perp[p0]
    project = Q.point_quotient(p0).project.tolist()
    nbrs = list(bits(perp[p0] & ~(1 << p0)))
    rep = CheckReport("lemma_lm")
    counts = {"a": 0, "b": 0, "c": 0}
    for a, i in enumerate(nbrs):
        pi = perp[i]
        for j in nbrs[a + 1:]:
            common = pi & perp[j]
            rep.checked += 1
            if (pi >> j) & 1:
                if project[i] == project[j]:
                    counts["a"] += 1
                    if common & outside:
                        rep.fail({"case": "a", "pair": [i, j]})
                    continue
                case = "b"
            else:
                case = "c"
            counts[case] += 1
            c = (common & outside).bit_count()
            if c != lam:
                rep.fail({"case": case, "pair": [i, j], "observed": c})
    rep.details = {"p0": p0, "lambda": lam, "cases": counts}
    return rep
