import itertools

import pytest
from hypothesis import given, settings, strategies as st

from tightquad import linalg
from tightquad.census import theta
from tightquad.galois import make_field


@pytest.mark.parametrize("q,n", [(2, 3), (3, 3), (4, 2), (2, 5)])
def test_projective_points_count(q, n):
    F = make_field(q)
    basis = [tuple(int(i == j) for j in range(n + 1)) for i in range(n + 1)]
    pts = list(linalg.projective_points(F, basis))
    assert len(pts) == len(set(pts)) == theta(n, q)
    assert all(linalg.normalize(F, p) == p for p in pts)


def test_normalize_first_nonzero_one():
    F = make_field(5)
    assert linalg.normalize(F, (0, 3, 1)) == (0, 1, 2)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 7]), st.data())
def test_rank_nullity(q, data):
    F = make_field(q)
    ncols = data.draw(st.integers(1, 6))
    nrows = data.draw(st.integers(1, 5))
    rows = [tuple(data.draw(st.integers(0, q - 1)) for _ in range(ncols)) for _ in range(nrows)]
    red, piv = linalg.rref(F, rows)
    k = linalg.rank(F, rows)
    assert k == len(red) == len(piv)
    ns = linalg.nullspace(F, rows, ncols)
    assert k + len(ns) == ncols
    for v in ns:
        for row in rows:
            acc = 0
            for a, b in zip(row, v):
                acc = F.add(acc, F.mul(a, b))
            assert acc == 0
    # row space unchanged
    assert linalg.rank(F, rows + red) == k


def test_span_vectors_size():
    F = make_field(3)
    basis = [(1, 0, 2), (0, 1, 1)]
    vecs = set(linalg.span_vectors(F, basis))
    assert len(vecs) == 9
    brute = {tuple(F.add(F.mul(a, x), F.mul(b, y)) for x, y in zip(*basis))
             for a, b in itertools.product(range(3), repeat=2)}
    assert vecs == brute
