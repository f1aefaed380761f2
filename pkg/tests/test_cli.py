import io
import subprocess
import sys

import pytest

from anharmonic import cli


def run(*argv):
    buf = io.StringIO()
    rc = cli.main(list(argv), out=buf)
    return rc, buf.getvalue()


def kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


# ---------------------------------------------------------------------------
# z

def test_z_harmonic_value():
    rc, out = run("z", "--a", "0", "--b", "1", "--c", "1", "--beta", "1", "--kv")
    assert rc == 0
    d = kv(out)
    assert float(d["Z_closed_form"]) == pytest.approx(0.677567805526, rel=1e-11)
    assert float(d["Z_direct_ode"]) == pytest.approx(0.677567805526, rel=1e-9)


def test_z_anharmonic_kv_block():
    rc, out = run("z", "--a", "0.1", "--b", "1", "--c", "1", "--beta", "1", "--kv")
    assert rc == 0
    d = kv(out)
    for key in ("Z_closed_form", "Z_direct_ode", "S_beta", "S_term_0", "S_term_3", "remainder_total",
                "Zcut_N16", "Zcut_first_omitted"):
        assert key in d
    assert d["S_term_1_source"] == "closed-form"
    assert d["S_term_2_source"].startswith("extrapolated")
    assert abs(float(d["Z_closed_form"]) - float(d["Z_direct_ode"])) < 1e-6


def test_z_order_change_within_proxy():
    base = ("z", "--a", "0.1", "--b", "1", "--c", "1", "--beta", "1", "--kv")
    d1 = kv(run(*base, "--order", "1")[1])
    d3 = kv(run(*base, "--order", "3")[1])
    diff = abs(float(d1["Z_closed_form"]) - float(d3["Z_closed_form"]))
    # the first omitted continuum term at order 1 bounds the change
    assert diff < abs(float(d3["S_term_2"])) * 1.5


def test_z_twelve_significant_digits():
    _, out = run("z", "--a", "0", "--b", "1", "--c", "1", "--beta", "1", "--kv")
    assert kv(out)["Z_closed_form"] == "0.677567805526"


# ---------------------------------------------------------------------------
# exit codes

def test_usage_errors():
    assert run()[0] == 1
    assert run("z", "--bogus")[0] == 1
    assert run("z", "--a", "0.1")[0] == 1
    assert run("figure", "3")[0] == 1


def test_domain_errors():
    assert run("z", "--a", "-1", "--b", "1", "--c", "1", "--beta", "1")[0] == 2
    assert run("z", "--a", "0", "--b", "-2", "--c", "1", "--beta", "1.2")[0] == 2


def test_io_error(tmp_path):
    rc, _ = run("figure", "2", "--a", "0", "--out", str(tmp_path / "missing" / "f.csv"))
    assert rc == 3


def test_entry_point_module():
    p = subprocess.run([sys.executable, "-m", "anharmonic", "oracle", "gaussian", "--b", "0", "--c", "1",
                        "--beta", "1", "--n-slices", "8"], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.strip() == "value=1"


# ---------------------------------------------------------------------------
# figures

def test_figure_csv_deterministic(tmp_path):
    for which in ("1", "2"):
        a, b = tmp_path / f"a{which}.csv", tmp_path / f"b{which}.csv"
        assert run("figure", which, "--out", str(a))[0] == 0
        assert run("figure", which, "--out", str(b))[0] == 0
        data = a.read_bytes()
        assert data == b.read_bytes()
        assert b"\r" not in data
        lines = data.decode("ascii").splitlines()
        assert lines[0] == "x,value" and len(lines) == cli.FIG_POINTS + 1


def test_figure_to_stdout():
    rc, out = run("figure", "1")
    assert rc == 0 and out.startswith("x,value\n")


def test_figure2_vanishes_without_quartic_term():
    rc, out = run("figure", "2", "--a", "0")
    assert rc == 0
    assert all(float(line.split(",")[1]) == 0 for line in out.splitlines()[1:])


def test_figure1_s_decreases_in_a():
    lo = cli.figure_rows(1, a=0.05, points=5)
    hi = cli.figure_rows(1, a=0.1, points=5)
    assert all(h[1] < l[1] for l, h in zip(lo, hi))


# ---------------------------------------------------------------------------
# oracle

@pytest.mark.parametrize("kind,extra", [("coupling", []), ("bridge", []), ("bruteforce", ["--a", "0.1", "--n-slices", "2"]),
                                        ("multisum", ["--a", "0.1", "--n-slices", "2"]),
                                        ("montecarlo", ["--a", "0.1", "--n-slices", "4"])])
def test_oracle_kinds(kind, extra):
    rc, out = run("oracle", kind, "--b", "1", "--c", "1", "--beta", "1", *extra)
    assert rc == 0 and out.startswith("value=")


def test_oracle_bruteforce_matches_multisum():
    args = ("--a", "0.1", "--b", "1", "--c", "1", "--beta", "0.5", "--n-slices", "2")
    v1 = float(kv(run("oracle", "bruteforce", *args)[1])["value"])
    v2 = float(kv(run("oracle", "multisum", *args)[1])["value"])
    assert v1 == pytest.approx(v2, rel=1e-6)


# ---------------------------------------------------------------------------
# validate

@pytest.fixture(scope="module")
def quick_run():
    return run("validate", "quick")


def test_validate_quick_reports_every_check(quick_run):
    _, out = quick_run
    lines = [l for l in out.splitlines() if l.startswith("[")]
    assert len(lines) == 12
    assert out.rstrip().endswith("passed")


def test_validate_quick_passes(quick_run):
    rc, out = quick_run
    assert rc == 0, out


def test_validate_corrupted_tolerance_fails():
    rc, out = run("validate", "quick", "--tolerance-scale", "0")
    assert rc == 2
    assert "[FAIL]" in out
