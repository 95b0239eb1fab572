import math
import os

import pytest

import weylaudit as w
from weylaudit.cli import main

SIDE = repr(2.0 * math.pi)


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    rc = main(["gen", "torus", "--dim", "2", "--side", SIDE, "--lmax", "100", "-o", str(d / "torus.spec")])
    assert rc == 0
    return d


def test_gen_torus_output(workdir):
    s = w.load(workdir / "torus.spec")
    assert s.total_count == 31397
    assert s.lambda_max == 100.0


def test_gen_rerun_byte_identical(workdir, tmp_path):
    out = tmp_path / "again.spec"
    argv = ["gen", "torus", "--dim", "2", "--side", SIDE, "--lmax", "100", "-o", str(out)]
    assert main(argv) == 0
    first = out.read_bytes()
    assert main(argv) == 0
    assert out.read_bytes() == first


def test_gen_sphere(tmp_path):
    out = tmp_path / "s.spec"
    assert main(["gen", "sphere", "--dim", "2", "--lmax", "50", "-o", str(out)]) == 0
    s = w.load(out)
    assert s.label == "round sphere S^2"


def test_count_and_riesz(workdir, tmp_path):
    n_out = tmp_path / "n.dat"
    assert main(["count", "-i", str(workdir / "torus.spec"), "--grid", "10:20:5", "-o", str(n_out)]) == 0
    rows = [l for l in n_out.read_text().splitlines() if not l.startswith("#")]
    assert len(rows) == 3
    lam, n = rows[0].split()
    s = w.load(workdir / "torus.spec")
    assert int(n) == w.counting_function(s, float(lam))

    r_out = tmp_path / "r.dat"
    assert main(["riesz", "--k", "1", "--grid", "20:30:0.5", "-i", str(workdir / "torus.spec"), "-o", str(r_out)]) == 0
    rows = [l for l in r_out.read_text().splitlines() if not l.startswith("#")]
    lam, val = rows[0].split()
    assert float(val) == pytest.approx(w.riesz_direct(s, 1, float(lam)), rel=1e-12)


def test_header_echoes_flags(workdir, tmp_path):
    out = tmp_path / "r.dat"
    argv = ["riesz", "--k", "1", "--grid", "20:21:0.5", "-i", str(workdir / "torus.spec"), "-o", str(out)]
    assert main(argv) == 0
    header = out.read_text().splitlines()[0]
    assert header == "# weylaudit " + " ".join(argv)


def test_audit_exit_codes(workdir, tmp_path, capsys):
    spec = str(workdir / "torus.spec")
    assert main(["audit", "--k", "1", "--coeffs", "torus", "--grid", "20:100:0.1", "-i", spec]) == 0
    assert "clean" in capsys.readouterr().out

    s = w.load(workdir / "torus.spec")
    bad = w.perturb(s, "remove-one", 25.0, tol=1e-9)
    badpath = tmp_path / "missing.spec"
    w.save(bad, badpath)
    out = tmp_path / "report.txt"
    rc = main(["audit", "--k", "1", "--coeffs", "torus", "--grid", "20:100:0.1", "-i", str(badpath), "-o", str(out)])
    assert rc == 2
    text = out.read_text()
    assert "anomalies-found" in text
    assert "missing" in text


def test_validation_errors_exit_one(tmp_path, capsys):
    assert main(["count", "-i", "no-such-file", "--grid", "1:2:1", "-o", str(tmp_path / "x")]) == 1
    assert main(["riesz", "--grid", "5:1:1", "-i", "x", "-o", "y"]) == 1
    assert main(["nonsense"]) == 1
    assert main(["gen", "torus", "--lmax", "10"]) == 1  # missing -o
    capsys.readouterr()


def test_completeness_exit_two(workdir, tmp_path):
    rc = main(["count", "-i", str(workdir / "torus.spec"), "--grid", "90:150:10", "-o", str(tmp_path / "x")])
    assert rc == 2


def test_thread_env_validation(workdir, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("WEYLAUDIT_THREADS", "zebra")
    assert main(["count", "-i", str(workdir / "torus.spec"), "--grid", "10:20:5", "-o", str(tmp_path / "x")]) == 1
    monkeypatch.setenv("WEYLAUDIT_THREADS", "0")
    assert main(["count", "-i", str(workdir / "torus.spec"), "--grid", "10:20:5", "-o", str(tmp_path / "x")]) == 1
    monkeypatch.setenv("WEYLAUDIT_THREADS", "4")
    assert main(["count", "-i", str(workdir / "torus.spec"), "--grid", "10:20:5", "-o", str(tmp_path / "x")]) == 0
    capsys.readouterr()


def test_wavetrace(workdir, tmp_path):
    out = tmp_path / "wt.dat"
    rc = main([
        "wavetrace", "--center", "40", "--sigma", "10", "--tgrid", "1:15:0.01",
        "--peaks", "3", "--min-sep", "1", "-i", str(workdir / "torus.spec"), "-o", str(out),
    ])
    assert rc == 0
    peak_lines = [l for l in out.read_text().splitlines() if l.startswith("# peak")]
    assert len(peak_lines) == 3


def test_kernel_export(tmp_path):
    out = tmp_path / "k.dat"
    assert main(["kernel", "--kind", "plateau", "-o", str(out)]) == 0
    assert out.read_text().startswith("# weylaudit kernel kind=plateau")


def test_basis_flag(tmp_path):
    out = tmp_path / "b.spec"
    rc = main(["gen", "torus", "--dim", "2", "--basis", "6.0,0;0,6.0", "--lmax", "10", "-o", str(out)])
    assert rc == 0
    s = w.load(out)
    assert "vol=36.0" in s.label
