"""Command-line front end: file formats, exit codes, CSV content and determinism."""
import csv
import io
import math
import shutil
import subprocess

import numpy as np
import pytest

from artifact import cli
from artifact.cli import ParseError, main, parse_rates, read_spec_file, write_spec_file
from artifact.exponents import ExponentSolverError, correct_decoding_bsc, rc_exponent
from oracles import random_channels


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def table(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def bsc01(tmp_path):
    path = tmp_path / "bsc01.dmc"
    path.write_text("# binary symmetric channel\ndmc 2 2\n0.9 0.1\n0.1 0.9\n", encoding="utf-8")
    return str(path)


# -- specification files ---------------------------------------------------------


def test_spec_file_round_trip_is_exact():
    for W in random_channels(5, 3, 4, seed=3):
        assert np.array_equal(read_spec_file(write_spec_file(W)), W)
    J = np.random.default_rng(1).dirichlet(np.ones(6)).reshape(2, 3)
    assert np.array_equal(read_spec_file(write_spec_file(J, "src"), "src"), J)


def test_spec_file_comments_and_blank_lines():
    W = read_spec_file("# c\n\ndmc 1 3\n# row\n0.2 0.3 0.5\n")
    assert W.shape == (1, 3)


@pytest.mark.parametrize("text, line", [
    ("dmc 2 2\n0.9 0.1\n0.2 0.9\n", "line 3"),
    ("dmc 2 2\n0.9 0.1\n0.5\n", "line 3"),
    ("# x\ndmc 2 2\n0.9 0.1 0\n0.1 0.9\n", "line 3"),
    ("dmc 2 x\n", "line 1"),
    ("dmc 2 2\n0.9 abc\n0.1 0.9\n", "line 2"),
])
def test_malformed_rows_report_line_numbers(text, line):
    with pytest.raises(ParseError, match=line):
        read_spec_file(text)


def test_row_sum_tolerance():
    read_spec_file("dmc 1 2\n0.5 0.5000000000005\n")
    with pytest.raises(ParseError):
        read_spec_file("dmc 1 2\n0.5 0.500000002\n")


def test_parse_rates():
    assert np.allclose(parse_rates("0:1:5"), [0, 0.25, 0.5, 0.75, 1])
    for bad in ("1:0:3", "0:1:0", "0:1", "a:b:c"):
        with pytest.raises(ParseError):
            parse_rates(bad)


# -- exit codes ----------------------------------------------------------------------


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.dmc"
    bad.write_text("dmc 2 2\n0.9 0.2\n0.1 0.9\n", encoding="utf-8")
    code, out, err = run(["exponent", "rc", "--channel", str(bad)])
    assert code == 2 and out == "" and "line 2" in err
    assert run(["exponent", "rc", "--channel", str(tmp_path / "missing.dmc")])[0] == 2
    assert run(["exponent", "rc", "--bsc", "0.1", "--rates", "1:0:3"])[0] == 2
    assert run(["exponent", "sp", "--bsc", "0.1", "--decoder", "mmi"])[0] == 2


def test_solver_failure_exit_code(monkeypatch):
    def boom(*a, **k):
        raise ExponentSolverError("no convergence")

    monkeypatch.setattr(cli, "rc_exponent", boom)
    code, out, err = run(["exponent", "rc", "--bsc", "0.1", "--rates", "0:0.1:2"])
    assert code == 3 and "solver failure" in err


def test_bad_thread_environment(monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "many")
    assert run(["exponent", "rc", "--bsc", "0.1", "--rates", "0:0.1:2"])[0] == 2


# -- exponent -------------------------------------------------------------------------


def test_exponent_rc_sweep(bsc01):
    code, out, _ = run(["exponent", "rc", "--channel", bsc01, "--input", "uniform", "--rates", "0.0:0.6:25",
                        "--decoder", "ml"])
    assert code == 0
    assert out.splitlines()[0] == "rate,exponent,method,residual"
    rows = table(out)
    assert len(rows) == 25
    C = math.log(2) - (-0.1 * math.log(0.1) - 0.9 * math.log(0.9))
    vals = [(float(r["rate"]), float(r["exponent"])) for r in rows]
    assert all(v == 0.0 for R, v in vals if R >= C)
    assert all(v > 0.0 for R, v in vals if R < C - 0.01)
    R, v = vals[5]
    assert v == pytest.approx(rc_exponent(np.array([[0.9, 0.1], [0.1, 0.9]]), [0.5, 0.5], R).value, abs=1e-12)


def test_exponent_cd_matches_closed_form():
    code, out, _ = run(["exponent", "cd", "--bsc", "0.1", "--rates", "0.4:0.69:10"])
    assert code == 0
    for r in table(out):
        assert float(r["exponent"]) == pytest.approx(correct_decoding_bsc(0.1, float(r["rate"])), abs=1e-7)


def test_exponent_grid_close_to_primal(bsc01):
    args = ["exponent", "rc", "--channel", bsc01, "--rates", "0.0:0.3:7"]
    primal = table(run(args)[1])
    grid = table(run(args + ["--method", "grid", "--denom", "100"])[1])
    assert [r["method"] for r in grid] == ["grid"] * 7
    for a, b in zip(primal, grid):
        assert abs(float(a["exponent"]) - float(b["exponent"])) <= 1e-2


def test_exponent_dual_is_below_primal(bsc01):
    args = ["exponent", "rc", "--channel", bsc01, "--rates", "0.0:0.3:4"]
    primal = table(run(args)[1])
    dual = table(run(args + ["--method", "dual"])[1])
    for a, b in zip(primal, dual):
        assert float(b["exponent"]) <= float(a["exponent"]) + 1e-8


def test_exponent_bits_conversion():
    nats = table(run(["exponent", "sp", "--bsc", "0.1", "--rates", "0.1:0.3:3"])[1])
    lo, hi = 0.1 / math.log(2), 0.3 / math.log(2)
    bits = table(run(["exponent", "sp", "--bsc", "0.1", "--rates", f"{lo!r}:{hi!r}:3", "--bits"])[1])
    for a, b in zip(nats, bits):
        assert float(b["rate"]) == pytest.approx(float(a["rate"]) / math.log(2), rel=1e-12)
        assert float(b["exponent"]) == pytest.approx(float(a["exponent"]) / math.log(2), rel=1e-7, abs=1e-10)


def test_exponent_sw_sources(tmp_path):
    d = 0.11
    J = np.array([[(1 - d) / 2, d / 2], [d / 2, (1 - d) / 2]])
    src = tmp_path / "dsbs.src"
    with src.open("w", encoding="utf-8") as fh:
        write_spec_file(J, "src", fh)
    a = run(["exponent", "sw", "--source", str(src), "--rates", "0.4:0.69:4"])
    b = run(["exponent", "sw", "--dsbs", "0.11", "--rates", "0.4:0.69:4"])
    assert a[0] == b[0] == 0
    assert a[1] == b[1]


def test_exponent_output_independent_of_threads(bsc01):
    args = ["exponent", "rc", "--channel", bsc01, "--rates", "0.0:0.4:6"]
    one = run(["--threads", "1"] + args)[1]
    three = run(["--threads", "3"] + args)[1]
    assert one == three == run(["--threads", "1"] + args)[1]


# -- asymptotic ------------------------------------------------------------------------


def test_asymptotic_examples():
    rows = table(run(["asymptotic", "binom", "--n", "100", "--k", "50"])[1])
    assert float(rows[0]["ratio"]) == pytest.approx(1.0025, abs=1e-4)
    rows = table(run(["asymptotic", "stirling", "--n", "1"])[1])
    assert float(rows[0]["ratio"]) == pytest.approx(math.sqrt(2 * math.pi) / math.e, rel=1e-12)
    rows = table(run(["asymptotic", "tail", "--bernoulli", "0.3", "--A", "0.5", "--n", "100,400"])[1])
    assert [r["n"] for r in rows] == ["100", "400"]
    r100, r400 = (float(r["ratio"]) for r in rows)
    assert abs(r400 - 1) < abs(r100 - 1) < 0.05


def test_asymptotic_missing_argument():
    assert run(["asymptotic", "binom", "--n", "10"])[0] == 2


# -- expect and bounds --------------------------------------------------------------------


def test_expect_examples():
    rows = table(run(["expect", "ln1p", "--family", "exp", "--rate", "1"])[1])
    assert float(rows[0]["value"]) == pytest.approx(0.596347362323194, abs=1e-9)
    rows = table(run(["expect", "simo", "--snr", "1", "--sigmas", "1"])[1])
    assert float(rows[0]["value"]) == pytest.approx(0.596347362323194, abs=1e-9)
    code, out, _ = run(["expect", "guesswork", "--dist", "0.5,0.5", "--guess", "0.5,0.5", "--rho", "0.5",
                        "--mc-check", "--seed", "7", "--samples", "1000000"])
    r = table(out)[0]
    assert code == 0
    assert abs(float(r["value"]) - float(r["mc_mean"])) <= 3 * float(r["mc_se"])


@pytest.mark.parametrize("argv", [
    ["expect", "ln", "--family", "gamma", "--shape", "2", "--rate", "0.5"],
    ["expect", "frac", "--family", "exp", "--rho", "1.5"],
    ["expect", "lnfact", "--family", "poisson", "--lam", "4"],
    ["expect", "var-ln1p", "--family", "exp"],
    ["expect", "cauchy", "--dim", "2"],
])
def test_expect_mc_check(argv):
    code, out, _ = run(argv + ["--mc-check", "--seed", "3", "--samples", "2000000"])
    r = table(out)[0]
    assert code == 0
    assert abs(float(r["value"]) - float(r["mc_mean"])) <= 3 * float(r["mc_se"])


def test_bounds_examples():
    code, out, _ = run(["bounds", "rji", "--f", "ln1p", "--family", "exp", "--rate", "1", "--method", "best",
                        "--seed", "1"])
    assert code == 0
    assert out.splitlines()[0] == "bound,mc_mean,mc_se,direction,holds"
    assert table(out)[0]["holds"] == "true"
    r = table(run(["bounds", "jensen-like-entropy", "--family", "uniform01", "--seed", "1"])[1])[0]
    assert r["holds"] == "true" and r["direction"] == "lower"
    r = table(run(["bounds", "rji", "--family", "const", "--c", "2", "--seed", "1"])[1])[0]
    assert float(r["bound"]) == pytest.approx(math.log(3.0), abs=1e-6)
    assert float(r["mc_se"]) <= 1e-15


@pytest.mark.parametrize("argv", [
    ["bounds", "iid", "--count", "100", "--p", "0.5"],
    ["bounds", "jensen-like-moment", "--family", "exp", "--power", "3"],
    ["bounds", "capacity-second-moment", "--family", "exp"],
    ["bounds", "capacity-second-moment", "--family", "poisson", "--lam", "2"],
    ["bounds", "harmonic", "--means", "1,2"],
])
def test_bounds_hold(argv):
    code, out, _ = run(argv + ["--seed", "4"])
    assert code == 0 and table(out)[0]["holds"] == "true"


def test_mc_output_byte_identical():
    args = ["expect", "ln1p", "--family", "gamma", "--shape", "2", "--mc-check", "--seed", "9",
            "--samples", "3000000"]
    a = run(["--threads", "1"] + args)[1]
    b = run(["--threads", "4"] + args)[1]
    assert a == b == run(args)[1]


def test_console_script():
    exe = shutil.which("artifact")
    if exe is None:
        pytest.skip("console script not on PATH")
    res = subprocess.run([exe, "asymptotic", "stirling", "--n", "1,2"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "n,exact_log,approx_log,ratio"
