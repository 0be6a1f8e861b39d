"""Row reduction over a FieldSpec.  Vectors are tuples of element codes."""

from __future__ import annotations

import itertools

from .galois import FieldSpec


def normalize(F: FieldSpec, v) -> tuple[int, ...]:
    """Scale v so its first nonzero entry is 1."""
    for c in v:
        if c:
            if c == 1:
                return tuple(v)
            s = F.inv(c)
            return tuple(F.mul(s, x) for x in v)
    raise ValueError("zero vector has no projective representative")


def rref(F: FieldSpec, rows) -> tuple[list[tuple[int, ...]], list[int]]:
    """Reduced row-echelon form (leading entries 1) and pivot columns.

    Zero rows are dropped, so ``len(result)`` is the rank.
    """
    M = [list(r) for r in rows]
    if not M:
        return [], []
    ncols = len(M[0])
    pivots = []
    row = 0
    for col in range(ncols):
        pr = next((i for i in range(row, len(M)) if M[i][col]), None)
        if pr is None:
            continue
        M[row], M[pr] = M[pr], M[row]
        s = F.inv(M[row][col])
        M[row] = [F.mul(s, x) for x in M[row]]
        for i in range(len(M)):
            c = M[i][col]
            if i != row and c:
                M[i] = [F.sub(a, F.mul(c, b)) for a, b in zip(M[i], M[row])]
        pivots.append(col)
        row += 1
        if row == len(M):
            break
    return [tuple(r) for r in M[:row]], pivots


def rank(F: FieldSpec, rows) -> int:
    return len(rref(F, rows)[0])


def nullspace(F: FieldSpec, rows, ncols: int) -> list[tuple[int, ...]]:
    """Basis of {v : M v = 0} for the matrix with the given rows."""
    R, pivots = rref(F, rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for r, pc in zip(R, pivots):
            v[pc] = F.neg(r[fc])
        basis.append(tuple(v))
    return basis


def combine(F: FieldSpec, coeffs, vectors) -> tuple[int, ...]:
    out = [0] * len(vectors[0])
    for c, v in zip(coeffs, vectors):
        if c:
            for i, x in enumerate(v):
                if x:
                    out[i] = F.add(out[i], F.mul(c, x))
    return tuple(out)


def span_vectors(F: FieldSpec, basis):
    """All q**k vectors in the span of a k-element basis (zero first)."""
    for coeffs in itertools.product(range(F.q), repeat=len(basis)):
        yield combine(F, coeffs, basis) if basis else ()


def projective_points(F: FieldSpec, basis):
    """Normalized projective points of the span of an independent basis.

    Taking coefficient vectors whose first nonzero entry is 1 gives each
    point exactly once.
    """
    k = len(basis)
    for lead in range(k):
        for tail in itertools.product(range(F.q), repeat=k - lead - 1):
            coeffs = (0,) * lead + (1,) + tail
            yield normalize(F, combine(F, coeffs, basis))
