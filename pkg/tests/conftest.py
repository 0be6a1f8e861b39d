import itertools

import pytest

from tightquad.galois import make_field
from tightquad.polar import build_quadric


def quad(r, q):
    return build_quadric(r, make_field(q))


def brute_points(F, dim):
    """Normalized representatives of PG(dim-1, q) by plain enumeration."""
    out = []
    for v in itertools.product(range(F.q), repeat=dim):
        nz = [c for c in v if c]
        if nz and nz[0] == 1:
            out.append(v)
    return out


def brute_form(F, v):
    acc = 0
    for i in range(0, len(v), 2):
        acc = F.add(acc, F.mul(v[i], v[i + 1]))
    return acc


@pytest.fixture(scope="session")
def Q52():
    return quad(3, 2)


@pytest.fixture(scope="session")
def Q32():
    return quad(2, 2)
