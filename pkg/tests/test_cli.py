import json
import math
import os

import numpy as np
import pytest

from dissmap import cli


def write_matrix(path, M):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cli.matrix_obj(np.asarray(M, dtype=complex)), fh)


@pytest.fixture
def scalar_files(tmp_path):
    paths = {}
    for name, M in (("J", [[0.0]]), ("R", [[0.7]]), ("Q", [[1.0]]), ("B", [[1.0]])):
        p = tmp_path / f"{name}.json"
        write_matrix(p, M)
        paths[name] = str(p)
    return paths


def run(argv):
    return cli.main(argv)


def test_matrix_roundtrip_real_and_complex(tmp_path):
    rng = np.random.default_rng(0)
    for M in (rng.standard_normal((3, 2)),
              rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))):
        p = tmp_path / "m.json"
        write_matrix(p, M)
        back = cli.load_matrix(str(p))
        assert np.array_equal(back, np.asarray(M, dtype=complex))


def test_serializer_17g_roundtrip():
    vals = [1 / 3, math.pi, 1e-300, 123456.789, 0.1 + 0.2]
    text = cli._ser({"v": vals})
    back = json.loads(text)
    assert back["v"] == vals


def test_check_scalar_ok(scalar_files, tmp_path, capsys):
    out = str(tmp_path / "rep.json")
    code = run(["check", "--J", scalar_files["J"], "--R", scalar_files["R"],
                "--Q", scalar_files["Q"], "--output", out])
    assert code == 0
    rep = json.loads(open(out).read())
    assert rep["result"]["stability"] == "asymptotically_stable"
    assert rep["command"] == "check" and "sha256" in rep["inputs"]["J"]


def test_check_non_skew_exit2(tmp_path, capsys):
    for name, M in (("J", [[0.0, 1.0], [1.0, 0.0]]), ("R", np.eye(2)), ("Q", np.eye(2))):
        write_matrix(tmp_path / f"{name}.json", M)
    code = run(["check", "--J", str(tmp_path / "J.json"), "--R", str(tmp_path / "R.json"),
                "--Q", str(tmp_path / "Q.json")])
    assert code == 2


def test_check_missing_file_exit1(tmp_path, capsys):
    code = run(["check", "--J", str(tmp_path / "nope.json"),
                "--R", str(tmp_path / "nope.json"), "--Q", str(tmp_path / "nope.json")])
    assert code == 1


def test_check_marginal_exit3(tmp_path, capsys):
    write_matrix(tmp_path / "J.json", [[0.0, -1.0], [1.0, 0.0]])
    write_matrix(tmp_path / "R.json", np.zeros((2, 2)))
    write_matrix(tmp_path / "Q.json", np.eye(2))
    code = run(["check", "--J", str(tmp_path / "J.json"), "--R", str(tmp_path / "R.json"),
                "--Q", str(tmp_path / "Q.json"), "--output", str(tmp_path / "o.json")])
    assert code == 3


def test_map_minimal_and_infeasible(tmp_path, capsys):
    write_matrix(tmp_path / "X.json", [[1.0], [0.0]])
    write_matrix(tmp_path / "Y.json", [[0.0], [1.0]])
    out = str(tmp_path / "rep.json")
    code = run(["map", "--X", str(tmp_path / "X.json"), "--Y", str(tmp_path / "Y.json"),
                "--output", out])
    assert code == 0
    rep = json.loads(open(out).read())
    assert rep["result"]["feasible"] is True
    assert rep["result"]["frob_norm_sq"] == pytest.approx(2.0)

    write_matrix(tmp_path / "Yneg.json", [[-1.0], [0.0]])
    code = run(["map", "--X", str(tmp_path / "X.json"), "--Y", str(tmp_path / "Yneg.json"),
                "--output", out])
    assert code == 4
    rep = json.loads(open(out).read())
    assert rep["result"]["feasible"] is False
    assert rep["result"]["diagnostics"]["psd_ok"] is False


def test_map_families(tmp_path, capsys):
    rng = np.random.default_rng(2)
    X = rng.standard_normal((4, 2))
    H = rng.standard_normal((4, 4))
    Y = (H @ H.T + (H - H.T)) @ X
    write_matrix(tmp_path / "X.json", X)
    write_matrix(tmp_path / "Y.json", Y)
    out = str(tmp_path / "rep.json")
    base = run(["map", "--X", str(tmp_path / "X.json"), "--Y", str(tmp_path / "Y.json"),
                "--output", out])
    assert base == 0
    for fam in ("first", "second"):
        code = run(["map", "--X", str(tmp_path / "X.json"), "--Y", str(tmp_path / "Y.json"),
                    "--family", fam, "--output", out])
        assert code == 0
        res = json.loads(open(out).read())["result"]
        assert res["feasible"] is True
        assert res["residual"] <= 1e-8 * max(1.0, np.linalg.norm(Y))
        assert res["lambda_min"] >= -1e-8


def test_radius_structured_scalar_certificate(scalar_files, tmp_path, capsys):
    out = str(tmp_path / "rep.json")
    code = run(["radius", "--J", scalar_files["J"], "--R", scalar_files["R"],
                "--Q", scalar_files["Q"], "--B", scalar_files["B"],
                "--kind", "structured", "--grid", "101", "--starts", "4",
                "--refine", "20", "--output", out])
    assert code == 0
    rep = json.loads(open(out).read())
    assert rep["result"]["value"] == pytest.approx(0.7, abs=1e-6)
    assert rep["result"]["label"] == "certified"
    assert rep["flags"]["equality_certified"] is True
    assert rep["certificate"]["eig_residual"] <= 1e-6


def test_radius_structured_C_mismatch_exit1(scalar_files, tmp_path, capsys):
    write_matrix(tmp_path / "C.json", [[2.0]])
    code = run(["radius", "--J", scalar_files["J"], "--R", scalar_files["R"],
                "--Q", scalar_files["Q"], "--B", scalar_files["B"],
                "--C", str(tmp_path / "C.json"), "--kind", "structured"])
    assert code == 1


def test_radius_marginal_exit3(tmp_path, capsys):
    write_matrix(tmp_path / "J.json", [[0.0, -1.0], [1.0, 0.0]])
    write_matrix(tmp_path / "R.json", np.zeros((2, 2)))
    write_matrix(tmp_path / "Q.json", np.eye(2))
    write_matrix(tmp_path / "B.json", np.eye(2))
    code = run(["radius", "--J", str(tmp_path / "J.json"), "--R", str(tmp_path / "R.json"),
                "--Q", str(tmp_path / "Q.json"), "--B", str(tmp_path / "B.json"),
                "--kind", "unstructured"])
    assert code == 3


def test_mu_command(tmp_path, capsys):
    write_matrix(tmp_path / "M.json", [[2.0]])
    out = str(tmp_path / "rep.json")
    code = run(["mu", "--M", str(tmp_path / "M.json"), "--output", out])
    assert code == 0
    rep = json.loads(open(out).read())
    assert rep["result"]["mu_2"] == pytest.approx(2.0)
    assert rep["result"]["mu_F_lower"] == pytest.approx(math.sqrt(2.0))


def test_sample_writes_valid_system(tmp_path, capsys):
    outdir = str(tmp_path / "sys")
    code = run(["sample", "--seed", "5", "--n", "3", "--outdir", outdir,
                "--output", str(tmp_path / "rep.json")])
    assert code == 0
    code = run(["check", "--J", os.path.join(outdir, "J.json"),
                "--R", os.path.join(outdir, "R.json"),
                "--Q", os.path.join(outdir, "Q.json"),
                "--output", str(tmp_path / "chk.json")])
    assert code == 0
    # identical seed reproduces identical files
    outdir2 = str(tmp_path / "sys2")
    run(["sample", "--seed", "5", "--n", "3", "--outdir", outdir2,
         "--output", str(tmp_path / "rep2.json")])
    for name in ("J", "R", "Q"):
        a = open(os.path.join(outdir, f"{name}.json")).read()
        b = open(os.path.join(outdir2, f"{name}.json")).read()
        assert a == b


def test_report_determinism(scalar_files, tmp_path, capsys):
    o1, o2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    argv = ["eta", "--J", scalar_files["J"], "--R", scalar_files["R"],
            "--Q", scalar_files["Q"], "--B", scalar_files["B"], "--w", "0.5",
            "--grid", "101", "--starts", "4"]
    assert run(argv + ["--output", o1]) == 0
    assert run(argv + ["--output", o2]) == 0
    assert open(o1).read() == open(o2).read()
