import numpy as np
import pytest

from conftest import quad
from tightquad.census import theta
from tightquad.polar import bits
from tightquad.spectra import (CollinearPair, build_graph, orthogonality_check,
                               pair_eigenvector_check, pair_vector, scaled_star_vector,
                               srg_identity_holds, srg_verify, star_eigenvector_check)
from tightquad.tight import WeightedSet, property_star, standard_corpus


def test_graph_examples():
    G = build_graph(quad(3, 2))
    assert G.n_vertices == 35 and {G.degree(i) for i in range(35)} == {18}
    G = build_graph(quad(2, 2))
    assert G.n_vertices == 9 and {G.degree(i) for i in range(9)} == {4}
    G = build_graph(quad(1, 4))
    assert G.n_vertices == 2 and G.adjacency == (0, 0)


def test_rook_graph():
    # Q+(3,2) is the 3x3 grid: each vertex with its 4 neighbors splits into two triangles
    G = build_graph(quad(2, 2))
    for i in range(9):
        nb = G.neighbors(i)
        edges = sum(1 for a in nb for b in nb if a < b and (G.adjacency[a] >> b) & 1)
        assert edges == 2


@pytest.mark.parametrize("r,q,params", [
    (2, 2, (9, 4, 1, 2)), (2, 3, (16, 6, 2, 2)), (3, 2, (35, 18, 9, 9)),
    (3, 3, (130, 48, 20, 16)), (4, 2, (135, 70, 37, 35)),
])
def test_srg(r, q, params):
    Q = quad(r, q)
    G = build_graph(Q)
    rep = srg_verify(G, r, q)
    assert (rep.v, rep.k, rep.lam, rep.mu) == params
    assert rep.eigenvalues == (q * (q ** (r - 2) + 1) * theta(r - 2, q), q ** (r - 1) - 1,
                               -(q ** (r - 2) + 1))
    assert srg_identity_holds(G, rep.k, rep.lam, rep.mu)
    assert 1 + rep.multiplicities[1] + rep.multiplicities[2] == rep.v
    assert rep.k + rep.multiplicities[1] * rep.eigenvalues[1] \
        + rep.multiplicities[2] * rep.eigenvalues[2] == 0


@pytest.mark.parametrize("r,q", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_spectrum_numeric_oracle(r, q):
    G = build_graph(quad(r, q))
    rep = srg_verify(G, r, q)
    ev = np.rint(np.linalg.eigvalsh(G.matrix.astype(float))).astype(int)
    vals, counts = np.unique(ev, return_counts=True)
    got = dict(zip(vals.tolist(), counts.tolist()))
    want = dict(zip(rep.eigenvalues, rep.multiplicities))
    assert got == want


def test_spectrum_listed_values():
    assert srg_verify(build_graph(quad(2, 3)), 2, 3).eigenvalues[1:] == (2, -2)
    assert srg_verify(build_graph(quad(3, 3)), 3, 3).eigenvalues[1:] == (8, -4)
    assert srg_verify(build_graph(quad(3, 2)), 3, 2).eigenvalues == (18, 3, -3)


@pytest.mark.parametrize("r,q", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_star_eigenvector_corpus(r, q):
    Q = quad(r, q)
    for name, (T, x) in standard_corpus(Q).items():
        rep = star_eigenvector_check(T)
        assert rep, (name, rep.counterexample)
    one_gen = standard_corpus(Q)["generators_1"][0]
    G = build_graph(Q)
    Amu = G.apply(one_gen.weights)
    assert Amu == [(q ** (r - 1) - 1) * w + theta(r - 2, q) for w in one_gen.weights]


def test_star_check_matches_property_star(Q52):
    import random
    rng = random.Random(3)
    corpus = [T for T, _ in standard_corpus(Q52).values()]
    for _ in range(40):
        mu = WeightedSet(Q52, tuple(rng.randint(-2, 2) for _ in range(35)))
        if rng.random() < 0.5:
            mu = rng.randint(-3, 3) * rng.choice(corpus) + rng.choice(corpus)
        ok = property_star(mu) is not None
        if ok:
            assert star_eigenvector_check(mu)
        else:
            from tightquad.tight import StarNotSatisfied
            with pytest.raises(StarNotSatisfied):
                star_eigenvector_check(mu)


@pytest.mark.parametrize("r,q", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_pair_eigenvectors_all_pairs(r, q):
    Q = quad(r, q)
    corpus = [T for T, _ in standard_corpus(Q).values()]
    for i in range(len(Q)):
        for j in bits(Q.full_mask & ~Q.perp_mask[i]):
            if j < i:
                continue
            assert pair_eigenvector_check(Q, i, j)
            for T in corpus:
                assert orthogonality_check(T, i, j)


def test_pair_vector_rejects_collinear(Q52):
    j = next(j for j in bits(Q52.perp_mask[0]) if j)
    with pytest.raises(CollinearPair):
        pair_vector(Q52, 0, j)


def test_non_tight_not_orthogonal(Q52):
    # a weight function without the star property is not orthogonal to every pair vector
    mu = WeightedSet.from_indices(Q52, [0])
    v = [w for w in mu.weights]
    hits = [sum(a * b for a, b in zip(v, pair_vector(Q52, 0, j)))
            for j in bits(Q52.full_mask & ~Q52.perp_mask[0])]
    assert any(hits)


def test_scaled_vector_is_eigenvector(Q52):
    T = standard_corpus(Q52)["generators_2"][0]
    v = scaled_star_vector(T)
    assert build_graph(Q52).apply(v) == [3 * t for t in v]
