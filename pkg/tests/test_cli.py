import json
import math
import time

import numpy as np
import pytest

from adcsim import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    lines = text.strip().splitlines()
    return lines[0].split(","), np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])


def test_fig1_rows(capsys):
    code, out, _ = run(["fig1", "--kappa-t", "0,3"], capsys)
    assert code == 0
    header, data = table(out)
    assert header == ["kappa_t", "lambda", "mean_n"]
    rows = {(kt, lam): n for kt, lam, n in data}
    assert rows[(0.0, 1.0)] == pytest.approx(math.sinh(1) ** 2, rel=1e-14)
    assert rows[(0.0, 1.0)] == pytest.approx(1.381098, abs=5e-7)
    assert rows[(3.0, 1.0)] == pytest.approx(math.exp(-6) * math.sinh(1) ** 2, rel=1e-13)
    assert rows[(3.0, 0.0)] == 0.0


def test_fig1_default_grid(capsys):
    code, out, _ = run(["fig1"], capsys)
    _, data = table(out)
    assert code == 0 and data.shape == (5 * 301, 3)
    assert set(data[:, 1]) == {0.0, 0.1, 0.3, 0.5, 1.0}


def test_fig2_rows(capsys):
    code, out, _ = run(["fig2"], capsys)
    header, data = table(out)
    assert code == 0 and header == ["kappa_t", "n", "p"]
    assert data.shape == (4 * 21, 3)
    rows = {(kt, int(n)): p for kt, n, p in data}
    assert rows[(0.0, 1)] == 0.0
    assert rows[(0.0, 2)] == pytest.approx(0.187949, abs=1e-5)
    assert rows[(0.5, 0)] == pytest.approx(0.739374, abs=5e-7)
    # n is printed as an integer
    assert out.splitlines()[2].split(",")[1] == "1"


def test_fig2_oracle_matches_closed_form(capsys):
    _, closed, _ = run(["fig2", "--kappa-t", "0.5,1"], capsys)
    code, oracle, _ = run(["fig2", "--kappa-t", "0.5,1", "--cutoff", "92"], capsys)
    assert code == 0
    np.testing.assert_allclose(table(oracle)[1], table(closed)[1], atol=1e-8)


def test_fig3_origin_and_normalized(capsys):
    code, out, _ = run(["fig3", "--kappa-t", "0,50", "--alpha-grid", "-1:1:3"], capsys)
    header, data = table(out)
    assert code == 0 and header == ["kappa_t", "re_alpha", "im_alpha", "w"]
    origin = data[(data[:, 1] == 0) & (data[:, 2] == 0)]
    np.testing.assert_allclose(origin[:, 3], 1 / math.pi, rtol=1e-13)
    _, out2, _ = run(["wigner", "--kappa-t", "0,50", "--alpha-grid=-1:1:3", "--normalized"], capsys)
    np.testing.assert_array_equal(table(out2)[1][:, 3], 2 * data[:, 3])


def test_fig3_coarse_integral(capsys):
    code, out, _ = run(["fig3", "--kappa-t", "0.5"], capsys)
    _, data = table(out)
    assert code == 0 and data.shape == (61 * 61, 4)
    assert data[:, 3].sum() * 0.2**2 == pytest.approx(0.5, abs=1e-4)


def test_fig3_oracle(capsys):
    args = ["fig3", "--kappa-t", "0.5", "--alpha-grid", "-1:1:5"]
    _, closed, _ = run(args, capsys)
    code, oracle, _ = run(args + ["--cutoff", "92", "--threads", "2"], capsys)
    assert code == 0
    np.testing.assert_allclose(table(oracle)[1], table(closed)[1], atol=1e-8)


def test_tomogram(capsys):
    code, out, _ = run(["tomogram", "--kappa-t", "0"], capsys)
    header, data = table(out)
    assert code == 0 and header == ["kappa_t", "q", "r"]
    assert data.shape == (801, 3)
    assert data[400, 2] == pytest.approx(0.20755374871029736, rel=1e-14)
    assert np.trapezoid(data[:, 2], data[:, 1]) == pytest.approx(1.0, abs=1e-5)
    code, out, _ = run(["tomogram", "--kappa-t", "30", "--q-grid", "-3:3:7"], capsys)
    _, data = table(out)
    np.testing.assert_allclose(data[:, 2], np.exp(-data[:, 1] ** 2) / math.sqrt(math.pi), atol=1e-15)


def test_tomogram_oracle_guard(capsys):
    code, _, err = run(["tomogram", "--kappa-t", "0", "--cutoff", "64"], capsys)
    assert code == 2 and "top Fock level" in err


def test_json_output(capsys):
    code, out, _ = run(["fig1", "--kappa-t", "0:1:2", "--lambda", "1", "--json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["columns"] == ["kappa_t", "lambda", "mean_n"]
    assert doc["rows"][0] == [0.0, 1.0, pytest.approx(math.sinh(1) ** 2)]


def test_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert cli.main(["fig3", "--kappa-t", "0.5", "--alpha-grid", "-2:2:9", "--cutoff", "92", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    first = paths[0].read_text().splitlines()[1].split(",")
    assert first[:3] == ["5.0000000000000000e-01", "-2.0000000000000000e+00", "-2.0000000000000000e+00"]


def test_cutoff_guard_rejects_before_computing(capsys):
    start = time.perf_counter()
    code, out, err = run(["validate", "--cutoff", "8", "--lambda", "1"], capsys)
    assert code == 2
    assert "cutoff 8" in err and out == ""
    assert time.perf_counter() - start < 1.0


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["bogus"],
        ["fig1", "--kappa-t", "0:1:1"],
        ["fig1", "--kappa-t", "a,b"],
        ["fig1", "--lambda", "-1"],
        ["fig2", "--lambda", "0.5,1"],
        ["fig2", "--n-max", "-1"],
        ["fig3", "--alpha-grid", "0:1"],
        ["tomogram", "--f", "0", "--g", "0"],
        ["fig1", "--cutoff", "63"],
        ["fig1", "--tol", "0"],
    ],
)
def test_usage_errors(args, capsys):
    assert run(args, capsys)[0] == 2


def test_help_exits_zero(capsys):
    assert run(["--help"], capsys)[0] == 0


def test_io_error(tmp_path, capsys):
    code, _, err = run(["fig1", "--out", str(tmp_path / "missing" / "x.csv")], capsys)
    assert code == 3 and "cannot write" in err


def test_validate_small_config(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, _, _ = run(["validate", "--lambdas", "0.5", "--kappa-ts", "0,0.5", "--out", str(out)], capsys)
    report = json.loads(out.read_text())
    assert report["schema"] == "adc-validate/1"
    assert report["kraus_completeness_max_defect"] <= 1e-12
    assert all({"max_error", "tol", "pass"} <= set(c) for c in report["checks"].values())
    assert report["all_pass"] and code == 0


def test_validate_failure_exit(capsys):
    # cutoff 64 is too shallow at lambda = 1 for the 1e-8 matrix comparison
    code, out, err = run(["validate", "--lambdas", "1", "--kappa-ts", "0.1", "--cutoff", "64"], capsys)
    report = json.loads(out)
    assert code == 1 and not report["all_pass"]
    assert not report["checks"]["closed_form_vs_kraus"]["pass"]
    assert "FAIL closed_form_vs_kraus" in err


def test_parse_helpers():
    assert cli.parse_grid("-6:6:61") == (-6.0, 6.0, 61)
    assert cli.parse_values("0,0.5,1") == (0.0, 0.5, 1.0)
    assert cli.parse_values("0:1:3") == (0.0, 0.5, 1.0)
    assert cli._attach_negative_values(["--q-grid", "-3:3:7", "--out", "x"]) == ["--q-grid=-3:3:7", "--out", "x"]
