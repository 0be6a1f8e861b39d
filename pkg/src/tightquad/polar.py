"""The hyperbolic quadric Q+(2r-1, q) of rank r and its subspaces.

Everything is indexed by the rank ``r`` (the Witt index): the ambient space
is PG(2r-1, q) and the quadratic form is

    f(x) = x0*x1 + x2*x3 + ... + x_{2r-2}*x_{2r-1}.

Points are tuples of field codes normalized so the first nonzero coordinate
is 1.  Quadric points are stored in lexicographic order, and point sets are
handled as Python ints used as bitsets (bit ``i`` is quadric point ``i``).
Perp sets always contain their center: P is in P^perp.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import linalg
from .galois import TABLE_LIMIT, FieldSpec

DEFAULT_MAX_POINTS = 10**6
DEFAULT_MAX_GENERATORS = 10**5


class OddDimension(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class ResourceLimit(RuntimeError):
    pass


class EmptyInput(ValueError):
    pass


class PointNotOnQuadric(ValueError):
    pass


class NotTotallySingular(ValueError):
    pass


def max_points() -> int:
    return int(os.environ.get("TIGHTQUAD_MAX_POINTS", DEFAULT_MAX_POINTS))


def max_generators() -> int:
    return int(os.environ.get("TIGHTQUAD_MAX_GENERATORS", DEFAULT_MAX_GENERATORS))


# -- bitset helpers ----------------------------------------------------------

def bits(mask: int):
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_from_bool(arr) -> int:
    packed = np.packbits(np.asarray(arr, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def mask_from_indices(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


# -- the forms ---------------------------------------------------------------

def form_eval(F: FieldSpec, x) -> int:
    """f(x) = sum of x_{2i} x_{2i+1}."""
    if len(x) % 2:
        raise OddDimension(f"coordinate vector of odd length {len(x)}")
    acc = 0
    for i in range(0, len(x), 2):
        acc = F.add(acc, F.mul(x[i], x[i + 1]))
    return acc


def bilinear_eval(F: FieldSpec, x, y) -> int:
    """b(x, y) = f(x+y) - f(x) - f(y), expanded."""
    if len(x) != len(y):
        raise DimensionMismatch(f"{len(x)} != {len(y)}")
    if len(x) % 2:
        raise OddDimension(f"coordinate vector of odd length {len(x)}")
    acc = 0
    for i in range(0, len(x), 2):
        acc = F.add(acc, F.mul(x[i], y[i + 1]))
        acc = F.add(acc, F.mul(x[i + 1], y[i]))
    return acc


def _swap_pairs(v):
    out = list(v)
    out[0::2], out[1::2] = v[1::2], v[0::2]
    return tuple(out)


@lru_cache(maxsize=None)
def _np_tables(F: FieldSpec):
    if F.q > TABLE_LIMIT:
        raise ResourceLimit(f"vectorized arithmetic needs q <= {TABLE_LIMIT}")
    q = F.q
    mul = np.array([[F.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
    add = np.array([[F.add(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
    inv = np.array([0] + [F.inv(a) for a in range(1, q)], dtype=np.int64)
    return mul, add, inv


def bilinear_matrix(F: FieldSpec, X, Y) -> np.ndarray:
    """Matrix of b(X[i], Y[j]) for coordinate arrays X (n x d), Y (m x d)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    Y = np.atleast_2d(np.asarray(Y, dtype=np.int64))
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatch(f"{X.shape[1]} != {Y.shape[1]}")
    if F.e == 1:
        p = F.p
        return (X[:, 0::2] @ Y[:, 1::2].T + X[:, 1::2] @ Y[:, 0::2].T) % p
    mul, add, _ = _np_tables(F)
    acc = np.zeros((X.shape[0], Y.shape[0]), dtype=np.int64)
    for i in range(0, X.shape[1], 2):
        t1 = mul[X[:, i][:, None], Y[:, i + 1][None, :]]
        t2 = mul[X[:, i + 1][:, None], Y[:, i][None, :]]
        acc = add[add[acc, t1], t2]
    return acc


def normalize_rows(F: FieldSpec, R: np.ndarray) -> np.ndarray:
    """Projective normalization of each nonzero row; zero rows stay zero."""
    R = np.asarray(R, dtype=np.int64)
    if R.size == 0:
        return R
    nz = R != 0
    lead_pos = np.argmax(nz, axis=1)
    lead = R[np.arange(R.shape[0]), lead_pos]
    if F.e == 1:
        p = F.p
        inv = np.array([0] + [pow(a, -1, p) for a in range(1, p)], dtype=np.int64)
        return (inv[lead][:, None] * R) % p
    mul, _, inv = _np_tables(F)
    return mul[inv[lead][:, None], R]


# -- subspaces ---------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Subspace:
    """Projective subspace given by its reduced row-echelon basis."""

    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    def points(self, F: FieldSpec):
        return list(linalg.projective_points(F, self.basis))

    def contains(self, F: FieldSpec, v) -> bool:
        return linalg.rank(F, list(self.basis) + [tuple(v)]) == len(self.basis)


def span(F: FieldSpec, vectors) -> Subspace:
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        raise EmptyInput("span of nothing")
    R, _ = linalg.rref(F, vectors)
    if not R:
        raise EmptyInput("span of zero vectors")
    return Subspace(tuple(R))


def is_totally_singular(F: FieldSpec, S: Subspace) -> bool:
    B = S.basis
    if any(form_eval(F, v) for v in B):
        return False
    return all(bilinear_eval(F, u, v) == 0 for u, v in itertools.combinations(B, 2))


def ambient_points(F: FieldSpec, dim: int):
    """Normalized points of PG(dim-1, q) in lexicographic order."""
    for lead in range(dim - 1, -1, -1):
        for tail in itertools.product(range(F.q), repeat=dim - lead - 1):
            yield (0,) * lead + (1,) + tail


# -- the quadric -------------------------------------------------------------

class HyperbolicQuadric:
    """Point set of Q+(2r-1, q) with cached collinearity.

    Immutable after construction.  ``perp[i, j]`` is True iff points i and j
    are collinear (b = 0), including i == j.
    """

    def __init__(self, rank: int, field: FieldSpec, points):
        self.rank = rank
        self.field = field
        self.points = [tuple(p) for p in points]
        self.index = {p: i for i, p in enumerate(self.points)}
        dim = 2 * rank
        self.coords = np.array(self.points, dtype=np.int64).reshape(len(self.points), dim)
        self.perp = bilinear_matrix(field, self.coords, self.coords) == 0
        self.perp_mask = [mask_from_bool(row) for row in self.perp]
        self.full_mask = (1 << len(self.points)) - 1

    def __repr__(self):
        return f"Q+({2 * self.rank - 1},{self.q})"

    def __len__(self):
        return len(self.points)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def dim(self) -> int:
        return 2 * self.rank

    @cached_property
    def codes(self) -> np.ndarray:
        """Big-endian base-q integer code of each point, ascending."""
        return _row_codes(self.coords, self.q)

    def index_of(self, v) -> int:
        v = linalg.normalize(self.field, v)
        try:
            return self.index[v]
        except KeyError:
            raise PointNotOnQuadric(f"{v} is not on {self!r}") from None

    def collinear(self, i: int, j: int) -> bool:
        return bool(self.perp[i, j])

    # perps of arbitrary ambient vectors, restricted to the quadric
    def perp_mask_of(self, vectors) -> int:
        vectors = [tuple(v) for v in vectors]
        if not vectors:
            raise EmptyInput("perp of an empty set")
        for v in vectors:
            if len(v) != self.dim:
                raise DimensionMismatch(f"{len(v)} != {self.dim}")
        B = bilinear_matrix(self.field, vectors, self.coords)
        return mask_from_bool(np.all(B == 0, axis=0))

    def perp_of_set(self, points) -> frozenset[int]:
        """Indices of quadric points in the intersection of the P^perp, P in S."""
        return frozenset(bits(self.perp_mask_of(points)))

    def meet_mask(self, S: Subspace) -> int:
        """Quadric points lying in the subspace S."""
        return _meet_mask(self, S)

    def subspace_perp_mask(self, S: Subspace) -> int:
        return _subspace_perp_mask(self, S)

    def mask_points(self, mask: int):
        return [self.points[i] for i in bits(mask)]

    # -- structure through a point / totally singular subspace -------------
    def quotient(self, S: Subspace) -> "Quotient":
        return _quotient(self, S)

    def point_quotient(self, i: int) -> "Quotient":
        return _quotient(self, Subspace((self.points[i],)))

    def lines_through(self, i: int) -> list[Subspace]:
        if not 0 <= i < len(self.points):
            raise PointNotOnQuadric(f"no quadric point with index {i}")
        Qt = self.point_quotient(i)
        return sorted(Qt.lift(j) for j in range(len(Qt.quadric)))

    @cached_property
    def generator_masks(self) -> tuple[int, ...]:
        return tuple(_generator_masks(self))

    def generators(self) -> list[Subspace]:
        return [self.mask_to_subspace(m) for m in self.generator_masks]

    def mask_to_subspace(self, mask: int) -> Subspace:
        return span(self.field, self.mask_points(mask))


def _row_codes(R: np.ndarray, q: int) -> np.ndarray:
    codes = np.zeros(R.shape[0], dtype=np.int64)
    for c in range(R.shape[1]):
        codes = codes * q + R[:, c]
    return codes


def _expected_points(r: int, q: int) -> int:
    if r == 0:
        return 0
    return (q ** (r - 1) + 1) * (q ** r - 1) // (q - 1)


def build_quadric(r: int, field: FieldSpec, cap: int | None = None) -> HyperbolicQuadric:
    """Enumerate the singular points of PG(2r-1, q) under f.

    ``r == 0`` gives the empty quadric (the quotient at a generator).
    """
    if r < 0:
        raise ValueError("rank must be nonnegative")
    cap = max_points() if cap is None else cap
    if _expected_points(r, field.q) > cap:
        raise ResourceLimit(f"Q+({2 * r - 1},{field.q}) exceeds the point cap {cap}")
    return _build_quadric(r, field)


@lru_cache(maxsize=64)
def _build_quadric(r: int, field: FieldSpec) -> HyperbolicQuadric:
    if r == 0:
        return HyperbolicQuadric(0, field, [])
    pts = [v for v in ambient_points(field, 2 * r) if form_eval(field, v) == 0]
    return HyperbolicQuadric(r, field, pts)


# -- quotients ---------------------------------------------------------------

def hyperbolic_basis(F: FieldSpec, W):
    """Pairs (e_i, f_i) spanning W with f(e_i)=f(f_i)=0, b(e_i,f_j)=delta_ij.

    W must span a nondegenerate hyperbolic space.
    """
    W = [tuple(w) for w in W]
    pairs = []
    while W:
        e = next(v for v in linalg.span_vectors(F, W) if any(v) and form_eval(F, v) == 0)
        fp = next(w for w in W if bilinear_eval(F, e, w))
        fp = tuple(F.mul(F.inv(bilinear_eval(F, e, fp)), c) for c in fp)
        t = form_eval(F, fp)
        f = tuple(F.sub(a, F.mul(t, c)) for a, c in zip(fp, e))
        rest = []
        for w in W:
            be, bf = bilinear_eval(F, w, e), bilinear_eval(F, w, f)
            rest.append(tuple(F.sub(F.sub(a, F.mul(bf, c)), F.mul(be, d))
                              for a, c, d in zip(w, e, f)))
        W, _ = linalg.rref(F, rest)
        pairs.append((e, f))
    return pairs


@dataclass(eq=False)
class Quotient:
    """S^perp / S for a totally singular S, realized as a smaller quadric.

    ``project[i]`` is the quotient point index of base point ``i`` when it
    lies in S^perp but not in S, and -1 otherwise.  ``frame`` lists the
    ambient vectors e_1, f_1, e_2, f_2, ... so that quotient coordinates
    (c0, c1, ...) correspond to sum(c_k * frame[k]).
    """

    base: HyperbolicQuadric
    S: Subspace
    quadric: HyperbolicQuadric
    frame: tuple[tuple[int, ...], ...]
    project: np.ndarray

    def lift(self, j: int) -> Subspace:
        """The (dim S + 1)-space on S corresponding to quotient point j."""
        F = self.base.field
        v = linalg.combine(F, self.quadric.points[j], self.frame)
        return span(F, list(self.S.basis) + [v])

    @cached_property
    def fibers(self) -> list[int]:
        """Base point masks over each quotient point (lift minus S)."""
        out = [0] * len(self.quadric)
        for i, j in enumerate(self.project.tolist()):
            if j >= 0:
                out[j] |= 1 << i
        return out

    def push(self, weights) -> list[int]:
        """Sum base weights over each fiber."""
        out = [0] * len(self.quadric)
        for w, j in zip(weights, self.project.tolist()):
            if j >= 0:
                out[j] += int(w)
        return out


@lru_cache(maxsize=4096)
def _quotient(Q: HyperbolicQuadric, S: Subspace) -> Quotient:
    F = Q.field
    if not is_totally_singular(F, S):
        raise NotTotallySingular(f"{S} is not totally singular")
    s1 = len(S.basis)
    # S^perp as a vector space, then a complement W of S inside it
    perp = linalg.nullspace(F, [_swap_pairs(v) for v in S.basis], Q.dim)
    rows = list(S.basis)
    W = []
    for v in perp:
        if linalg.rank(F, rows + [v]) > len(rows):
            rows.append(v)
            W.append(v)
    pairs = hyperbolic_basis(F, W)
    frame = tuple(v for pair in pairs for v in pair)
    sub = build_quadric(Q.rank - s1, F)
    project = np.full(len(Q), -1, dtype=np.int64)
    in_perp = np.all(bilinear_matrix(F, S.basis, Q.coords) == 0, axis=0)
    if frame and in_perp.any():
        # coordinate along e_k is b(v, f_k), along f_k is b(v, e_k)
        dual = []
        for e, f in pairs:
            dual += [f, e]
        C = bilinear_matrix(F, Q.coords[in_perp], dual)
        nz = C.any(axis=1)
        Cn = normalize_rows(F, C[nz])
        codes = _row_codes(Cn, F.q)
        idx = np.minimum(np.searchsorted(sub.codes, codes), len(sub) - 1)
        if not np.array_equal(sub.codes[idx], codes):
            raise AssertionError("quotient coordinates left the quotient quadric")
        sel = np.flatnonzero(in_perp)[nz]
        project[sel] = idx
    return Quotient(Q, S, sub, frame, project)


@lru_cache(maxsize=1 << 16)
def _subspace_perp_mask(Q: HyperbolicQuadric, S: Subspace) -> int:
    return Q.perp_mask_of(S.basis)


@lru_cache(maxsize=1 << 16)
def _meet_mask(Q: HyperbolicQuadric, S: Subspace) -> int:
    m = 0
    for v in linalg.projective_points(Q.field, S.basis):
        i = Q.index.get(v)
        if i is not None:
            m |= 1 << i
    return m


# -- generators --------------------------------------------------------------

def generator_count(r: int, q: int) -> int:
    n = 1
    for i in range(r):
        n *= q ** i + 1
    return n


def _generator_masks(Q: HyperbolicQuadric) -> list[int]:
    """All generators as point masks, sorted by their echelon bases.

    A generator through point p is p together with the fibers of a
    generator of the quotient p^perp/p; keeping only those whose lowest
    point is p lists each generator once.
    """
    if generator_count(Q.rank, Q.q) > max_generators():
        raise ResourceLimit(f"{Q!r} exceeds the generator cap {max_generators()}")
    if Q.rank == 0:
        return []
    if Q.rank == 1:
        return [1 << i for i in range(len(Q))]
    found = []
    for p in range(len(Q)):
        Qt = Q.point_quotient(p)
        fib = Qt.fibers
        for g in Qt.quadric.generator_masks:
            m = 1 << p
            for j in bits(g):
                m |= fib[j]
            if m & -m == 1 << p:
                found.append(m)
    keyed = sorted((Q.mask_to_subspace(m).basis, m) for m in found)
    return [m for _, m in keyed]
