import io
import json

import pytest

from conftest import quad
from tightquad import pointfile
from tightquad.cli import main
from tightquad.polar import bits


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_sieve_csv():
    code, text = run("sieve", "--q", "4", "--rank", "3", "--xmax", "8", "--format", "csv")
    assert code == 0
    rows = [ln.split(",") for ln in text.strip().splitlines()[1:]]
    assert [int(r[0]) for r in rows if r[2] == "1"] == [3, 4, 8]


def test_sieve_json_rank4():
    code, text = run("sieve", "--q", "5", "--rank", "4", "--xmax", "13", "--format", "json")
    rep = json.loads(text)
    assert code == 0 and rep["excluded"] == [] and len(rep["rows"]) == 13
    assert rep["schema"] == 1 and rep["modulus"] == [0, 1] and rep["q"] == 5


def test_sieve_table():
    code, text = run("sieve", "--q", "4", "--rank", "3")
    assert code == 0 and "yes" in text


def test_not_prime_power(capsys):
    code, _ = run("sieve", "--q", "6", "--rank", "3")
    assert code == 2
    assert "NotPrimePower" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        run("sieve", "--rank", "3")
    assert exc.value.code == 2


@pytest.mark.parametrize("cmd", ["census", "counts"])
def test_census(cmd):
    code, text = run(cmd, "--q", "2", "--rank", "3")
    rep = json.loads(text)
    assert code == 0 and rep["passed"]
    names = [c["name"] for c in rep["checks"]]
    assert "lemma_lm" in names and "collinear_pair_exclusive" in names
    assert rep["counts"]["points"] == 35


def test_spectra():
    code, text = run("spectra", "--q", "2", "--rank", "3")
    rep = json.loads(text)
    assert code == 0
    s = rep["srg"]
    assert (s["v"], s["k"], s["lambda"], s["mu"]) == (35, 18, 9, 9)
    assert s["eigenvalues"] == [18, 3, -3]


def test_search():
    code, text = run("search", "--q", "2", "--rank", "2", "--x", "1")
    rep = json.loads(text)
    assert code == 0 and rep["count"] == 6 and rep["exhaustive"]


def test_search_budget():
    code, text = run("search", "--q", "2", "--rank", "3", "--x", "2", "--budget", "20")
    assert code == 0 and json.loads(text)["exhaustive"] is False


def test_resource_limit(capsys):
    code, _ = run("census", "--q", "3", "--rank", "4", "--max-points", "50")
    assert code == 2
    assert "cap" in capsys.readouterr().err
    # the override does not leak into later runs
    assert run("census", "--q", "2", "--rank", "2")[0] == 0


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_verify_generator(tmp_path, Q52):
    f = _write(tmp_path, "g.txt", pointfile.dumps(Q52, Q52.generator_masks[0]))
    code, text = run("verify", f)
    rep = json.loads(text)
    assert code == 0 and rep["x"] == 1 and rep["congruence_audit"]["passed"]


def test_verify_generator_plus_point(tmp_path, Q52):
    g = Q52.generator_masks[0]
    extra = next(bits(Q52.full_mask & ~g))
    f = _write(tmp_path, "gp.txt", pointfile.dumps(Q52, g | 1 << extra))
    code, text = run("verify", f)
    rep = json.loads(text)
    assert code == 1 and not rep["tight"]
    assert rep["witness"]["reason"] == "point"


def test_verify_bad_codes(tmp_path, capsys):
    f = _write(tmp_path, "bad.txt", "q=4 rank=2\n1 0 0 5\n")
    assert run("verify", f)[0] == 2
    assert "CoordinateOutOfRange" in capsys.readouterr().err


def test_verify_off_quadric(tmp_path, capsys):
    f = _write(tmp_path, "off.txt", "q=2 rank=3\n1 1 0 0 0 0\n")
    assert run("verify", f)[0] == 2
    assert "PointOffQuadric" in capsys.readouterr().err


def test_verify_missing_file(tmp_path):
    assert run("verify", str(tmp_path / "nope.txt"))[0] == 2


def test_verify_complement_parallel(tmp_path):
    Q = quad(3, 3)
    from tightquad.tight import build_disjoint_generators
    T = build_disjoint_generators(Q, 2)
    f = _write(tmp_path, "c.txt", pointfile.dumps(Q, Q.full_mask & ~T.mask, indices=True))
    c1, t1 = run("verify", f, "--jobs", "1")
    c2, t2 = run("verify", f, "--jobs", "3")
    assert c1 == c2 == 0 and t1 == t2
    assert json.loads(t1)["x"] == 10 - 2


def test_provenance_fields():
    rep = json.loads(run("census", "--q", "4", "--rank", "2")[1])
    for k in ("schema", "version", "command", "q", "rank", "modulus"):
        assert k in rep
    assert rep["modulus"] == [1, 1, 1]


def test_module_entry():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "tightquad", "sieve", "--q", "3", "--rank", "3",
                          "--format", "csv"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("x,residues,excluded")
