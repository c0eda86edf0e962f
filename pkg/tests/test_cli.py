"""End-to-end runs of the command line front end, in process."""

import contextlib
import io
import shutil

import pytest

from tropcurve import fixtures
from tropcurve.cli import main
from tropcurve.formats import Workspace, format_workspace, parse_into


def run_cli(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        rc = main(list(argv))
    return rc, buf.getvalue()


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def tail_file(workdir):
    sm = fixtures.tail_system()
    ws = Workspace()
    ws.add_curve("gamma", fixtures.tail())
    ws.add_divisor("base", "gamma", sm.base)
    fids = []
    for i, g in enumerate(sm.gens):
        ws.add_func(f"g{i}", "gamma", g)
        fids.append(f"g{i}")
    ws.add_system("lam", "gamma", sm, "base", fids)
    path = workdir / "tail.trop"
    path.write_text(format_workspace(ws))
    return path


@pytest.fixture(scope="module")
def bundle(workdir, tail_file):
    out = workdir / "bundle"
    rc, _ = run_cli("construct", str(tail_file), "lam", "--out", str(out), "--quiet")
    assert rc == 0
    return out


# -- validate ----------------------------------------------------------------


def test_validate_reports_counts(tail_file):
    rc, out = run_cli("validate", str(tail_file))
    assert rc == 0
    assert out == "ok: 1 curves, 0 points, 3 funcs, 1 divisors, 1 systems, 0 maps\n"


def test_validate_merges_files(workdir, tail_file):
    extra = workdir / "extra.trop"
    extra.write_text("curve seg\nvertex X\nvertex Y\nedge s X Y 1\n")
    rc, out = run_cli("validate", str(tail_file), str(extra))
    assert rc == 0
    assert out.startswith("ok: 2 curves,")


def test_validate_rejects_duplicate_ids(tail_file):
    # loading the same file twice collides on every id
    rc, out = run_cli("validate", str(tail_file), str(tail_file))
    assert rc == 1
    assert "duplicate curve 'gamma'" in out


def test_validate_missing_file(workdir):
    rc, out = run_cli("validate", str(workdir / "nope.trop"))
    assert rc == 2
    assert out.startswith("error:")


def test_quiet_validate_says_nothing(tail_file):
    rc, out = run_cli("validate", str(tail_file), "--quiet")
    assert rc == 0
    assert out == ""


# -- div ---------------------------------------------------------------------


def test_div_prints_signed_entries(tail_file):
    rc, out = run_cli("div", str(tail_file), "gamma", "g1")
    assert rc == 0
    assert out == "-2 @ e0@0/1, +2 @ e1@1/2\n"


def test_div_constant_function(tail_file):
    rc, out = run_cli("div", str(tail_file), "gamma", "g0")
    assert rc == 0
    assert out == "0\n"


def test_div_unknown_func(tail_file):
    rc, out = run_cli("div", str(tail_file), "gamma", "nope")
    assert rc == 2
    assert "unknown func 'nope'" in out


def test_div_wrong_curve(tail_file):
    rc, out = run_cli("div", str(tail_file), "wrong", "g0")
    assert rc == 2
    assert "lives on curve 'gamma'" in out


# -- construct ---------------------------------------------------------------


def test_construct_report(workdir, tail_file):
    out_dir = workdir / "loud"
    rc, out = run_cli("construct", str(tail_file), "lam", "--out", str(out_dir))
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "degree 2"
    assert lines[1] == "target tree: 4 nodes, 3 edges"
    assert "indeterminacy e1@1/1 multiplicity 1" in lines
    assert "grafts: 1" in lines
    assert lines[-1] == f"bundle written to {out_dir}"


def test_construct_writes_parseable_bundle(bundle):
    assert sorted(p.name for p in bundle.iterdir()) == ["certificate.txt", "witness.trop"]
    ws = Workspace()
    parse_into(ws, (bundle / "witness.trop").read_text(), "witness.trop")
    assert set(ws.curves) == {"gamma", "gtilde", "target"}
    assert set(ws.maps) == {"pi", "phi"}
    psrc, pdst, _ = ws.maps["pi"]
    fsrc, fdst, _ = ws.maps["phi"]
    assert (psrc, pdst) == ("gtilde", "gamma")
    assert (fsrc, fdst) == ("gtilde", "target")
    # one grafted limb: gtilde carries one more edge than gamma
    assert len(ws.curves["gtilde"].edges) == len(ws.curves["gamma"].edges) + 1


def test_construct_certificate_content(bundle):
    text = (bundle / "certificate.txt").read_text()
    lines = text.splitlines()
    assert lines[0] == "certificate construct"
    for expected in (
        "degree 2",
        "generators 3",
        "algdim 2",
        "geomdim 1",
        "b1 1",
        "indeterminacy e1@1/1 1",
        "grafts 1",
        "check finite-morphism ok",
        "check harmonic ok",
        "check degree ok",
        "check b1-preserved ok",
        "check indeterminacy-degrees ok",
    ):
        assert expected in lines


def test_construct_certificate_flag_copies(workdir, tail_file, bundle):
    out_dir = workdir / "copycert"
    cert = workdir / "cert_copy.txt"
    rc, out = run_cli(
        "construct", str(tail_file), "lam",
        "--out", str(out_dir), "--certificate", str(cert), "--quiet",
    )
    assert rc == 0
    assert out == ""
    assert cert.read_text() == (bundle / "certificate.txt").read_text()


def test_construct_unknown_system(workdir, tail_file):
    rc, out = run_cli("construct", str(tail_file), "nope", "--out", str(workdir / "x"))
    assert rc == 2
    assert "unknown system 'nope'" in out


# -- verify ------------------------------------------------------------------


def test_verify_accepts_fresh_bundle(bundle):
    rc, out = run_cli("verify", str(bundle))
    assert rc == 0
    lines = out.splitlines()
    assert lines[-1] == "verified: degree 2"
    for name in (
        "morphism", "finite", "harmonic", "degree-consistent",
        "target-tree", "b1-preserved", "retraction",
    ):
        assert f"check {name} ok" in lines


def test_verify_quiet_success_is_silent(bundle):
    rc, out = run_cli("verify", str(bundle), "--quiet")
    assert rc == 0
    assert out == ""


def test_verify_rejects_tampered_slope(workdir, bundle):
    tampered = workdir / "tampered"
    shutil.rmtree(tampered, ignore_errors=True)
    shutil.copytree(bundle, tampered)
    wpath = tampered / "witness.trop"
    text = wpath.read_text()
    line = "edge et->t1@1/1 slope -1"
    assert line in text
    wpath.write_text(text.replace(line, "edge et->t1@1/1 slope 0"))

    cert = workdir / "tamper_cert.txt"
    rc, out = run_cli("verify", str(tampered), "--certificate", str(cert))
    assert rc == 1
    assert out == "verify failed: phi is not finite\n"
    cert_lines = cert.read_text().splitlines()
    assert cert_lines[-1] == "check failed: phi is not finite"

    # failures print even under --quiet
    rc, out = run_cli("verify", str(tampered), "--quiet")
    assert rc == 1
    assert "verify failed" in out


def test_verify_missing_bundle(workdir):
    rc, out = run_cli("verify", str(workdir / "nosuchdir"))
    assert rc == 2
    assert "no witness.trop" in out


# -- from-witness ------------------------------------------------------------


def test_from_witness_stdout_is_a_workspace(bundle):
    rc, out = run_cli("from-witness", str(bundle))
    assert rc == 0
    ws = Workspace()
    parse_into(ws, out, "recovered")
    cid, system, base_id, gen_ids = ws.systems["sys"]
    assert cid == "gamma"
    assert len(gen_ids) == 3
    assert system.degree == 2
    assert system.base.degree == 2
    assert system.base.is_effective()


def test_from_witness_explicit_point(workdir, bundle):
    out_path = workdir / "sys_at.trop"
    rc, out = run_cli("from-witness", str(bundle), "t1@1/2", "--out", str(out_path))
    assert rc == 0
    assert "degree 2, 3 generators" in out
    assert f"system written to {out_path}" in out

    ws = Workspace()
    parse_into(ws, out_path.read_text(), "sys_at")
    _, shifted, _, _ = ws.systems["sys"]
    _, default_out = run_cli("from-witness", str(bundle))
    ws0 = Workspace()
    parse_into(ws0, default_out, "default")
    _, default_sys, _, _ = ws0.systems["sys"]
    # pulling back a different tree point moves the base divisor
    assert shifted.base != default_sys.base
    assert shifted.base.degree == 2


def test_from_witness_bad_point(bundle):
    rc, out = run_cli("from-witness", str(bundle), "bogus")
    assert rc == 2
    assert "expected <edge>@<offset>" in out


# -- roundtrip ---------------------------------------------------------------


def test_roundtrip_bundle(bundle):
    rc, out = run_cli("roundtrip", str(bundle))
    assert rc == 0
    assert out.splitlines() == ["systems equivalent", "targets isometric", "degree 2"]


def test_roundtrip_system_file(tail_file):
    rc, out = run_cli("roundtrip", str(tail_file), "lam")
    assert rc == 0
    assert out.splitlines() == ["systems equivalent", "degree 2"]


def test_roundtrip_file_needs_system_id(tail_file):
    rc, out = run_cli("roundtrip", str(tail_file))
    assert rc == 2
    assert "needs a system id" in out
