"""Tight sets and integer weight functions on a hyperbolic quadric.

A weight function mu on the points of a rank-r quadric satisfies the
*star property* with parameter x when, for every point P,

    sum(mu over P^perp) == x * theta(r-2) + q^(r-1) * mu(P)

(P^perp contains P).  A 0/1 weight function with the star property and
total weight x * theta(r-1) is an x-tight set.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb

import numpy as np

from .census import theta
from .polar import HyperbolicQuadric, PointNotOnQuadric, Subspace, bits, mask_from_bool
from .report import CheckReport


class NotTight(ValueError):
    pass


class StarNotSatisfied(ValueError):
    pass


class PointInT(ValueError):
    pass


class EmptySet(ValueError):
    pass


class Infeasible(RuntimeError):
    pass


class BudgetExhausted(RuntimeError):
    def __init__(self, msg, partial):
        super().__init__(msg)
        self.partial = partial


@dataclass(frozen=True, eq=False)
class WeightedSet:
    quadric: HyperbolicQuadric
    weights: tuple[int, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.quadric):
            raise ValueError(f"{len(self.weights)} weights for {len(self.quadric)} points")

    @classmethod
    def from_mask(cls, Q: HyperbolicQuadric, mask: int) -> "WeightedSet":
        return cls(Q, tuple((mask >> i) & 1 for i in range(len(Q))))

    @classmethod
    def from_indices(cls, Q: HyperbolicQuadric, indices) -> "WeightedSet":
        m = 0
        for i in indices:
            if not 0 <= i < len(Q):
                raise PointNotOnQuadric(f"no quadric point with index {i}")
            m |= 1 << i
        return cls.from_mask(Q, m)

    @classmethod
    def constant(cls, Q: HyperbolicQuadric, value: int) -> "WeightedSet":
        return cls(Q, (value,) * len(Q))

    def __eq__(self, other):
        return (isinstance(other, WeightedSet) and self.quadric is other.quadric
                and self.weights == other.weights)

    def __hash__(self):
        return hash((id(self.quadric), self.weights))

    def _combine(self, other, a, b):
        if other.quadric is not self.quadric:
            raise ValueError("weight functions live on different quadrics")
        return WeightedSet(self.quadric, tuple(a * u + b * v
                                               for u, v in zip(self.weights, other.weights)))

    def __add__(self, other):
        return self._combine(other, 1, 1)

    def __sub__(self, other):
        return self._combine(other, 1, -1)

    def __rmul__(self, k: int):
        return WeightedSet(self.quadric, tuple(k * w for w in self.weights))

    def __getitem__(self, i: int) -> int:
        return self.weights[i]

    @property
    def is_binary(self) -> bool:
        return all(w in (0, 1) for w in self.weights)

    @cached_property
    def mask(self) -> int:
        if not self.is_binary:
            raise ValueError("not a 0/1 weight function")
        m = 0
        for i, w in enumerate(self.weights):
            if w:
                m |= 1 << i
        return m

    @property
    def total(self) -> int:
        return sum(self.weights)

    @cached_property
    def perp_sums(self) -> list[int]:
        """sum(mu over P^perp) for every point P."""
        w = np.array(self.weights, dtype=np.int64)
        if w.size and int(np.abs(w).max()) * len(w) >= 1 << 62:
            return [sum(self.weights[j] for j in bits(m)) for m in self.quadric.perp_mask]
        return [int(v) for v in self.quadric.perp.astype(np.int64) @ w]

    @cached_property
    def x(self) -> int | None:
        return property_star(self)


def _require_rank(Q: HyperbolicQuadric, r: int):
    if Q.rank < r:
        raise ValueError(f"needs rank >= {r}, got {Q.rank}")


# -- the star properties -------------------------------------------------

def property_star(mu: WeightedSet) -> int | None:
    """The parameter x of mu, or None when the star property fails.

    On a rank-1 quadric P^perp = {P} and the property is empty; there the
    total weight is returned, matching sum(mu) == x * theta(r-1).
    """
    Q = mu.quadric
    r, q = Q.rank, Q.q
    if r == 0:
        return 0
    if r == 1:
        return mu.total
    t = theta(r - 2, q)
    qr = q ** (r - 1)
    resid = {s - qr * w for s, w in zip(mu.perp_sums, mu.weights)}
    if len(resid) != 1:
        return None
    (R,) = resid
    if R % t:
        return None
    return R // t


def property_star_star(mu: WeightedSet, x: int) -> CheckReport:
    """Check sum(mu over {P1,P2}^perp) == x theta(r-3) + q^(r-2)(mu(P1)+mu(P2))."""
    Q = mu.quadric
    _require_rank(Q, 2)
    r, q = Q.rank, Q.q
    t = theta(r - 3, q)
    qr = q ** (r - 2)
    w = np.array(mu.weights, dtype=np.int64)
    rep = CheckReport("property_star_star")
    for i in range(len(Q)):
        row = Q.perp[i]
        pair_sums = (row & Q.perp).astype(np.int64) @ w
        for j in np.flatnonzero(~row[i + 1:]) + i + 1:
            rep.checked += 1
            lhs = int(pair_sums[j])
            rhs = x * t + qr * (mu.weights[i] + mu.weights[j])
            if lhs != rhs:
                rep.fail({"pair": [i, int(j)], "lhs": lhs, "rhs": rhs})
    return rep


def _star_x(mu: WeightedSet) -> int:
    x = mu.x
    if x is None:
        raise StarNotSatisfied("weight function fails the star property")
    return x


def quotient_weight(mu: WeightedSet, p0: int) -> tuple[WeightedSet, int]:
    """Push mu down to the quadric P0^perp/P0 of rank r-1.

    A line l through P0 gets the sum of mu over l minus P0.  The result has
    the star property with parameter (q-1) mu(P0) + x, which is checked.
    """
    Q = mu.quadric
    _require_rank(Q, 2)
    x = _star_x(mu)
    Qt = Q.point_quotient(p0)
    tilde = WeightedSet(Qt.quadric, tuple(Qt.push(mu.weights)))
    x_tilde = (Q.q - 1) * mu[p0] + x
    if property_star(tilde) != x_tilde:
        raise AssertionError(f"quotient weight at {p0} has parameter {tilde.x}, "
                             f"expected {x_tilde}")
    return tilde, x_tilde


def sum_squares_identity(mu: WeightedSet, p0: int) -> CheckReport:
    """sum mu^2 == mu0^2 + (x-mu0)^2 + (q+1) sum_{P0^perp - P0} mu^2 - sum_l mu~(l)^2."""
    Q = mu.quadric
    _require_rank(Q, 2)
    x = _star_x(mu)
    q = Q.q
    m0 = mu[p0]
    lhs = sum(w * w for w in mu.weights)
    near = sum(mu[i] ** 2 for i in bits(Q.perp_mask[p0] & ~(1 << p0)))
    pencil = Q.point_quotient(p0).push(mu.weights)
    rhs = m0 * m0 + (x - m0) ** 2 + (q + 1) * near - sum(v * v for v in pencil)
    rep = CheckReport("sum_squares", checked=1, details={"p0": p0, "lhs": lhs, "rhs": rhs})
    if lhs != rhs:
        rep.fail({"p0": p0, "lhs": lhs, "rhs": rhs})
    return rep


# -- 0/1 tight sets ------------------------------------------------------

@dataclass
class TightnessReport:
    kappa: Fraction
    bound: Fraction
    equality: bool
    x: int | None
    per_point_failures: list[int] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "kappa": str(self.kappa),
            "bound": str(self.bound),
            "equality": self.equality,
            "x": self.x,
            "per_point_failures": self.per_point_failures,
        }


def tightness_bound(T: WeightedSet) -> TightnessReport:
    """Average collinearity inside T against the upper bound.

    kappa averages |P^perp cap T| over P in T, counting P itself.
    """
    Q = T.quadric
    r, q = Q.rank, Q.q
    mask = T.mask
    size = mask.bit_count()
    if not size:
        raise EmptySet("tightness of the empty set")
    local = {i: (Q.perp_mask[i] & mask).bit_count() for i in bits(mask)}
    kappa = Fraction(sum(local.values()), size)
    bound = Fraction(size * (q ** (r - 1) - 1), q ** r - 1) + q ** (r - 1)
    if kappa > bound:
        raise AssertionError(f"kappa {kappa} exceeds the bound {bound}")
    equality = kappa == bound
    x = size // theta(r - 1, q) if equality else None
    failures = [i for i, c in local.items() if c != bound]
    return TightnessReport(kappa, bound, equality, x, failures)


def tight_parameter(T: WeightedSet) -> int | None:
    """x if T is an x-tight set, else None."""
    if not T.is_binary:
        return None
    x = T.x
    if x is None or T.total != x * theta(T.quadric.rank - 1, T.quadric.q):
        return None
    return x


def non_tight_witness(T: WeightedSet) -> dict | None:
    """Why T is not tight: a point breaking the point identity, or the size."""
    if tight_parameter(T) is not None:
        return None
    Q = T.quadric
    r, q = Q.rank, Q.q
    if not T.is_binary:
        return {"reason": "weights are not 0/1"}
    size, t = T.total, theta(r - 1, q)
    # with x = |T| / theta(r-1) forced, each P needs q^(r-1)[P in T] + x theta(r-2)
    if r >= 2:
        share = Fraction(size * theta(r - 2, q), t)
        for i, (s, w) in enumerate(zip(T.perp_sums, T.weights)):
            expected = q ** (r - 1) * w + share
            if s != expected:
                return {"reason": "point", "point": i, "in_set": bool(w),
                        "perp_count": s, "expected": str(expected)}
    return {"reason": "size", "size": size, "theta": t}


def _tight_x(T: WeightedSet) -> int:
    x = tight_parameter(T)
    if x is None:
        raise NotTight("point set is not tight")
    return x


def check_subspace_identity(T: WeightedSet, S: Subspace) -> bool:
    """|S^perp cap T| == q^(r-1-s) |S cap T| + x theta(r-s-2) for dim S = s."""
    Q = T.quadric
    x = _tight_x(T)
    s = S.dim
    if s > Q.rank - 1:
        raise ValueError(f"subspace dimension {s} exceeds rank - 1")
    mask = T.mask
    lhs = (Q.subspace_perp_mask(S) & mask).bit_count()
    rhs = Q.q ** (Q.rank - 1 - s) * (Q.meet_mask(S) & mask).bit_count() \
        + x * theta(Q.rank - s - 2, Q.q)
    return lhs == rhs


def pencil_counts(T: WeightedSet, p0: int) -> list[int]:
    """m_l = weight of l minus P0, for each line l on Q through P0."""
    return T.quadric.point_quotient(p0).push(T.weights)


def line_pencil_check(T: WeightedSet, p0: int) -> CheckReport:
    """Line-pencil identities at a point P0 outside T.

    sum m_l = x theta(r-2) and sum m_l^2 = x (theta(r-2) - 1 + x), plus the
    count E of collinear pairs (P1 in P0^perp cap T, P2 in T outside P0^perp)
    computed directly and by the two closed forms.
    """
    Q = T.quadric
    _require_rank(Q, 2)
    x = _tight_x(T)
    if T[p0]:
        raise PointInT(f"point {p0} lies in T")
    r, q = Q.rank, Q.q
    mask = T.mask
    m = pencil_counts(T, p0)
    rep = CheckReport("line_pencil", details={"p0": p0})

    def check(name, lhs, rhs):
        rep.checked += 1
        if lhs != rhs:
            rep.fail({"p0": p0, "check": name, "lhs": lhs, "rhs": rhs})

    check("sum", sum(m), x * theta(r - 2, q))
    check("sum_squares", sum(v * v for v in m), x * (theta(r - 2, q) - 1 + x))

    near = Q.perp_mask[p0] & mask
    far = mask & ~Q.perp_mask[p0]
    E = sum((Q.perp_mask[i] & far).bit_count() for i in bits(near))
    per_far = q ** (r - 2) + x * theta(r - 3, q)
    for j in bits(far):
        check("far_point", (Q.perp_mask[j] & near).bit_count(), per_far)
    check("E_far", E, x * q ** (r - 1) * per_far)
    check("E_pencil", E, sum(v * (q ** (r - 1) + q ** (r - 2) * (x - v)) for v in m))
    rep.details["sum_squares"] = sum(v * v for v in m)
    return rep


def lemma_congruence_rhs(x: int, w: int, r: int, q: int) -> int:
    """x(theta(r-2) - c) + (-1)^c 2w(x-w) + c x^2 with c = (r-1) mod 2, reduced mod 2(q+1)."""
    c = (r - 1) % 2
    val = x * (theta(r - 2, q) - c) + (-1) ** c * 2 * w * (x - w) + c * x * x
    return val % (2 * (q + 1))


def generator_congruence(x: int, w: int, r: int, q: int) -> int:
    """Left side of the generator congruence, reduced mod q+1.

    Odd rank: C(x,2) + w(w-x).  Even rank: w(w-x).
    """
    val = w * (w - x)
    if r % 2:
        val += comb(x, 2)
    return val % (q + 1)


@dataclass
class AuditReport:
    x: int
    passed: bool
    generators: int
    observed_w: list[int]
    residues: list[int]
    lemma_checks: int
    counterexample: object = None

    def as_dict(self) -> dict:
        return {
            "x": self.x,
            "passed": self.passed,
            "generators": self.generators,
            "observed_w": self.observed_w,
            "residues": self.residues,
            "lemma_checks": self.lemma_checks,
            "counterexample": self.counterexample,
        }


def congruence_audit(T: WeightedSet) -> AuditReport:
    """Check the generator congruences on every generator of the quadric.

    Also checks, for each P0 outside T and each generator G on P0, the
    mod 2(q+1) congruence for the pencil sum of squares at P0.
    """
    Q = T.quadric
    x = _tight_x(T)
    r, q = Q.rank, Q.q
    mask = T.mask
    gens = Q.generator_masks
    ws = [(g & mask).bit_count() for g in gens]
    bad = None
    for g, w in zip(gens, ws):
        if generator_congruence(x, w, r, q):
            bad = bad or {"generator": Q.mask_to_subspace(g).basis, "w": w}
    checks = 0
    if r >= 2:
        for p0 in bits(Q.full_mask & ~mask):
            sq = sum(v * v for v in pencil_counts(T, p0)) % (2 * (q + 1))
            for g, w in zip(gens, ws):
                if (g >> p0) & 1:
                    checks += 1
                    if sq != lemma_congruence_rhs(x, w, r, q):
                        bad = bad or {"p0": p0, "w": w, "sum_squares_mod": sq}
    observed = sorted(set(ws))
    return AuditReport(
        x=x,
        passed=bad is None,
        generators=len(gens),
        observed_w=observed,
        residues=sorted({w % (q + 1) for w in observed}),
        lemma_checks=checks,
        counterexample=bad,
    )


# -- constructions -------------------------------------------------------

@lru_cache(maxsize=8)
def _disjoint_table(Q: HyperbolicQuadric) -> tuple[int, ...]:
    """Bitset over generator indices of the generators disjoint from each one."""
    gens = Q.generator_masks
    M = np.zeros((len(gens), len(Q)), dtype=np.float32)
    for k, g in enumerate(gens):
        M[k, list(bits(g))] = 1
    out = []
    for lo in range(0, len(gens), 512):
        meet = M[lo:lo + 512] @ M.T          # exact: counts stay far below 2^24
        out += [mask_from_bool(row == 0) for row in meet]
    return tuple(out)


def build_disjoint_generators(Q: HyperbolicQuadric, x: int) -> WeightedSet:
    """Union of x pairwise disjoint generators, found by first-fit backtracking."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    gens = Q.generator_masks
    chosen: list[int] = []
    D = _disjoint_table(Q) if x > 1 else ()

    def extend(cands: int) -> bool:
        if len(chosen) == x:
            return True
        while cands.bit_count() >= x - len(chosen):
            k = (cands & -cands).bit_length() - 1
            cands &= cands - 1
            chosen.append(k)
            if extend(cands & D[k] if D else cands):
                return True
            chosen.pop()
        return False

    if not extend((1 << len(gens)) - 1):
        raise Infeasible(f"no {x} pairwise disjoint generators on {Q!r}")
    T = WeightedSet.from_mask(Q, sum(gens[k] for k in chosen))
    if tight_parameter(T) != x:
        raise AssertionError("disjoint generators failed the tight-set check")
    return T


def complement(T: WeightedSet) -> WeightedSet:
    _tight_x(T)
    Q = T.quadric
    return WeightedSet.from_mask(Q, Q.full_mask & ~T.mask)


def max_disjoint_generators(Q: HyperbolicQuadric) -> int:
    x = 0
    while True:
        try:
            build_disjoint_generators(Q, x + 1)
        except Infeasible:
            return x
        x += 1


def standard_corpus(Q: HyperbolicQuadric) -> dict[str, tuple[WeightedSet, int]]:
    """Known tight sets on Q keyed by name, with their parameters."""
    r, q = Q.rank, Q.q
    full = q ** (r - 1) + 1
    out = {
        "empty": (WeightedSet.from_mask(Q, 0), 0),
        "full": (WeightedSet.from_mask(Q, Q.full_mask), full),
    }
    for x in range(1, max_disjoint_generators(Q) + 1):
        T = build_disjoint_generators(Q, x)
        out[f"generators_{x}"] = (T, x)
        out[f"complement_generators_{x}"] = (complement(T), full - x)
    return out


# -- exhaustive search ---------------------------------------------------

def exhaustive_search(Q: HyperbolicQuadric, x: int, budget: int = 10**6,
                      time_limit: float | None = None) -> list[WeightedSet]:
    """All x-tight sets of Q, by backtracking over points.

    A partial assignment is pruned when some point P can no longer reach
    its required |P^perp cap T| (q^(r-1)[P in T] + x theta(r-2)), and forced
    choices are propagated.  ``budget`` bounds the number of search nodes;
    on overrun BudgetExhausted carries the sets found so far.
    """
    r, q = Q.rank, Q.q
    N = len(Q)
    perp = Q.perp_mask
    full = Q.full_mask
    size = x * theta(r - 1, q)
    t_out = x * theta(r - 2, q) if r >= 2 else 0
    t_in = t_out + q ** (r - 1)
    found: list[int] = []
    nodes = 0
    deadline = None if time_limit is None else time.monotonic() + time_limit

    def propagate(I, O):
        while True:
            U = full & ~(I | O)
            n_in = I.bit_count()
            if n_in > size or n_in + U.bit_count() < size:
                return None
            if n_in == size and U:
                O |= U
                continue
            if n_in + U.bit_count() == size and U:
                I |= U
                continue
            force_in = force_out = 0
            for p in range(N):
                pm = perp[p]
                c = (pm & I).bit_count()
                u = (pm & U).bit_count()
                bit = 1 << p
                if I & bit:
                    if not c <= t_in <= c + u:
                        return None
                    if u and c == t_in:
                        force_out |= pm & U
                    elif u and c + u == t_in:
                        force_in |= pm & U
                elif O & bit:
                    if not c <= t_out <= c + u:
                        return None
                    if u and c == t_out:
                        force_out |= pm & U
                    elif u and c + u == t_out:
                        force_in |= pm & U
                else:
                    can_in = c + 1 <= t_in <= c + u
                    can_out = c <= t_out <= c + u - 1
                    if not (can_in or can_out):
                        return None
                    if not can_out:
                        force_in |= bit
                    elif not can_in:
                        force_out |= bit
            if force_in & force_out:
                return None
            if not (force_in | force_out):
                return I, O
            I |= force_in
            O |= force_out

    def search(I, O):
        nonlocal nodes
        nodes += 1
        if nodes > budget or (deadline is not None and time.monotonic() > deadline):
            raise _Stop
        state = propagate(I, O)
        if state is None:
            return
        I, O = state
        U = full & ~(I | O)
        if not U:
            found.append(I)
            return
        p = (U & -U).bit_length() - 1
        search(I | (1 << p), O)
        search(I, O | (1 << p))

    try:
        search(0, 0)
    except _Stop:
        partial = [WeightedSet.from_mask(Q, m) for m in sorted(set(found))]
        raise BudgetExhausted(f"search budget exhausted after {nodes} nodes", partial) from None
    result = [WeightedSet.from_mask(Q, m) for m in sorted(set(found))]
    for T in result:
        if tight_parameter(T) != x:
            raise AssertionError("search produced a set that is not tight")
    return result


class _Stop(Exception):
    pass
