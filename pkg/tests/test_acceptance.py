"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line."""

import itertools
import json
import random
import subprocess
import sys
import time

import pytest

from conftest import brute_points, quad
from tightquad import linalg, pointfile
from tightquad.census import k_points, theta, verify_counts, verify_lemma_lm
from tightquad.polar import Subspace, bits
from tightquad.sieve import admissible_residues, excluded_parameters, exclusion_fraction
from tightquad.spectra import (build_graph, orthogonality_check, pair_eigenvector_check,
                               srg_verify, star_eigenvector_check)
from tightquad.tight import (check_subspace_identity, congruence_audit, exhaustive_search,
                             line_pencil_check, standard_corpus, sum_squares_identity,
                             tight_parameter)


@pytest.fixture
def verdict(capsys):
    def say(n, ok, note=""):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'} {note}".rstrip())
        assert ok, f"criterion {n} failed: {note}"
    return say


TIGHT_SPACES = [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3)]


def test_1_point_counts(verdict):
    t0 = time.perf_counter()
    bad = []
    for r, q in [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (5, 2)]:
        n = len(quad(r, q))
        if n != (q ** (r - 1) + 1) * theta(r - 1, q):
            bad.append((r, q, n))
    dt = time.perf_counter() - t0
    verdict(1, not bad and dt < 60, f"point counts, 10 quadrics, {dt:.1f}s, mismatches={bad}")


def test_2_pair_counts(verdict):
    t0 = time.perf_counter()
    bad = []
    for r, q in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)]:
        Q = quad(r, q)
        for rep in verify_counts(Q):
            if not rep:
                bad.append((r, q, rep.name, rep.counterexample))
        for p0 in range(len(Q)):
            rep = verify_lemma_lm(Q, p0)
            if not rep or rep.details["lambda"] != q ** (2 * r - 4):
                bad.append((r, q, "lemma_lm", p0, rep.counterexample))
                break
    dt = time.perf_counter() - t0
    verdict(2, not bad and dt < 120, f"pair counts and lambda, {dt:.1f}s, failures={bad[:3]}")


def _all_subspaces_pg5_2():
    F = quad(3, 2).field
    pts = brute_points(F, 6)
    out = set()
    for k in (1, 2, 3):
        for combo in itertools.combinations(pts, k):
            R, _ = linalg.rref(F, list(combo))
            if len(R) == k:
                out.add(tuple(R))
    return sorted(out)


def _random_subspaces(Q, n, seed):
    rng = random.Random(seed)
    F, d = Q.field, Q.dim
    out = []
    while len(out) < n:
        k = rng.randint(1, Q.rank)
        rows = [tuple(rng.randrange(F.q) for _ in range(d)) for _ in range(k)]
        R, _ = linalg.rref(F, rows)
        if len(R) == k:
            out.append(tuple(R))
    return out


def test_3_tight_set_identities(verdict):
    bad = []
    notes = []
    for r, q in TIGHT_SPACES:
        Q = quad(r, q)
        corpus = standard_corpus(Q)
        if (r, q) == (3, 2):
            subspaces = _all_subspaces_pg5_2()
            assert len(subspaces) == 63 + 651 + 1395
        else:
            subspaces = _random_subspaces(Q, 10 ** 4, seed=1000 * r + q)
        for name, (T, x) in corpus.items():
            if tight_parameter(T) != x:
                bad.append((r, q, name, "x"))
                continue
            want = [q ** (r - 1) * w + x * theta(r - 2, q) for w in T.weights]
            if T.perp_sums != want:
                bad.append((r, q, name, "point identity"))
            if not all(check_subspace_identity(T, Subspace(S)) for S in subspaces):
                bad.append((r, q, name, "subspace identity"))
            for p0 in range(len(Q)):
                if not sum_squares_identity(T, p0):
                    bad.append((r, q, name, "sum of squares", p0))
                    break
                if not T[p0] and not line_pencil_check(T, p0):
                    bad.append((r, q, name, "pencil", p0))
                    break
        notes.append(f"Q+({2 * r - 1},{q}):{len(corpus)} sets/{len(subspaces)} subspaces")
    verdict(3, not bad, "; ".join(notes) + (f" failures={bad[:3]}" if bad else ""))


def test_4_theorem_end_to_end(verdict):
    bad = []
    audited = 0
    for r, q in TIGHT_SPACES + [(4, 2)]:
        Q = quad(r, q)
        for name, (T, x) in standard_corpus(Q).items():
            a = congruence_audit(T)
            audited += 1
            if not a.passed or a.generators != len(Q.generator_masks):
                bad.append((r, q, name, a.counterexample))
            if not set(a.residues) <= set(admissible_residues(x, q, r)):
                bad.append((r, q, name, "residue outside sieve"))
    verdict(4, not bad, f"{audited} tight sets audited on every generator, failures={bad[:3]}")


def test_5_sieve(verdict):
    t0 = time.perf_counter()
    ok = excluded_parameters(4, 3, 8) == [3, 4, 8]
    frac = exclusion_fraction(4, 3)
    ok &= frac == 0.5
    for q in (2, 3, 4, 5):
        ok &= excluded_parameters(q, 4) == [] and excluded_parameters(q, 4, 200) == []
    dt = time.perf_counter() - t0
    verdict(5, ok and dt < 1, f"excluded(4,3,8)={excluded_parameters(4, 3, 8)}, fraction={frac}, "
                              f"rank 4 empty, {dt:.3f}s")


def test_6_spectra(verdict):
    bad = []
    pairs_checked = 0
    for r, q in [(2, 2), (2, 3), (3, 2), (3, 3)]:
        Q = quad(r, q)
        rep = srg_verify(build_graph(Q), r, q)
        want = (q * k_points(r - 2, q), q ** (r - 1) - 1, -(q ** (r - 2) + 1))
        if rep.eigenvalues != want:
            bad.append((r, q, "eigenvalues"))
        corpus = [T for T, _ in standard_corpus(Q).values()]
        for T in corpus:
            if not star_eigenvector_check(T):
                bad.append((r, q, "star"))
        for i in range(len(Q)):
            for j in bits(Q.full_mask & ~Q.perp_mask[i] & ~((1 << (i + 1)) - 1)):
                pairs_checked += 1
                if not pair_eigenvector_check(Q, i, j):
                    bad.append((r, q, "pair", i, j))
                if not all(orthogonality_check(T, i, j) for T in corpus):
                    bad.append((r, q, "orthogonality", i, j))
    verdict(6, not bad, f"SRG on 4 quadrics, {pairs_checked} non-collinear pairs, failures={bad[:3]}")


def test_7_search(verdict):
    t0 = time.perf_counter()
    ok = True
    for r, n in [(2, 6), (3, 30)]:
        Q = quad(r, 2)
        found = sorted(T.mask for T in exhaustive_search(Q, 1))
        ok &= len(found) == n and found == sorted(Q.generator_masks)
    dt = time.perf_counter() - t0
    verdict(7, ok and dt < 300, f"x=1 search gives 6 and 30 generators, {dt:.1f}s")


def _cli(args):
    res = subprocess.run([sys.executable, "-m", "tightquad", *args],
                         capture_output=True)
    return res.returncode, res.stdout


def test_8_determinism(verdict, tmp_path):
    Q = quad(3, 2)
    g = Q.generator_masks[0]
    gen = tmp_path / "generator.txt"
    gen.write_text(pointfile.dumps(Q, g))
    plus = tmp_path / "generator_plus.txt"
    plus.write_text(pointfile.dumps(Q, g | 1 << next(bits(Q.full_mask & ~g))))
    bad_codes = tmp_path / "bad_codes.txt"
    bad_codes.write_text("q=4 rank=2\n1 0 0 4\n")
    commands = [
        (["sieve", "--q", "4", "--rank", "3", "--xmax", "8", "--format", "csv"], 0),
        (["sieve", "--q", "4", "--rank", "3", "--xmax", "8", "--format", "json"], 0),
        (["sieve", "--q", "5", "--rank", "4", "--xmax", "13", "--format", "json"], 0),
        (["sieve", "--q", "6", "--rank", "3"], 2),
        (["verify", str(gen)], 0),
        (["verify", str(plus)], 1),
        (["verify", str(bad_codes)], 2),
        (["census", "--q", "2", "--rank", "3"], 0),
        (["spectra", "--q", "2", "--rank", "3"], 0),
        (["search", "--q", "2", "--rank", "2", "--x", "1"], 0),
    ]
    bad = []
    for args, code in commands:
        outs = set()
        for jobs in ("1", "1", "8", "8"):
            rc, out = _cli(args + ["--jobs", jobs])
            if rc != code:
                bad.append((args[0], jobs, rc))
            outs.add(out)
        if len(outs) != 1:
            bad.append((args, "output differs"))
        out = outs.pop()
        if out.startswith(b"{"):
            json.loads(out)
    verdict(8, not bad, f"{len(commands)} commands x 4 runs byte-identical, failures={bad[:3]}")
