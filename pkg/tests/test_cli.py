import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from ratpencil import io
from ratpencil.cli import main

from conftest import four_pole, two_pole


@pytest.fixture
def two_pole_file(tmp_path):
    path = tmp_path / "f.json"
    io.save_json(io.rational_to_json(two_pole()), path)
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_generate_coeffs_to_stdout(two_pole_file, capsys):
    code, out, _ = run(["generate", "--function", two_pole_file, "--n", 2], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["kind"] == "fourier"
    assert obj["neg"][0]["re"] == 0.5


def test_generate_and_recover_round_trip(two_pole_file, tmp_path, capsys):
    for flag in ("--coeffs", "--samples"):
        data = tmp_path / f"d{flag}.json"
        assert run(["generate", "--function", two_pole_file, "--n", 8, flag, "--out", data], capsys)[0] == 0
        code, out, _ = run(["recover", "--data", data, "--m1", 1, "--m2", 1], capsys)
        assert code == 0
        est = io.rational_from_json(json.loads(out))
        np.testing.assert_allclose(np.sort_complex(est.poles), [-2.1, -0.1], atol=1e-10)


def test_recover_auto_order(two_pole_file, tmp_path, capsys):
    data = tmp_path / "d.json"
    run(["generate", "--function", two_pole_file, "--n", 2, "--out", data], capsys)
    code, out, _ = run(["recover", "--data", data, "--l", 2], capsys)
    assert code == 0
    assert len(json.loads(out)["poles"]) == 2


def test_sensitivity_command(two_pole_file, tmp_path, capsys):
    out = tmp_path / "s.json"
    assert run(["sensitivity", "--function", two_pole_file, "--out", out], capsys)[0] == 0
    obj = io.load_json(out)
    assert obj["outside"]["rho"][0] == pytest.approx(0.952380952, rel=1e-8)


def test_experiment_csv(two_pole_file, capsys):
    code, out, _ = run(["experiment", "--function", two_pole_file, "--n", 2, "--sigma", 1e-3,
                        "--trials", 3, "--seed", 5], capsys)
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["pole_re", "pole_im", "stat", "value"]
    stats = {r[2]: r[3] for r in rows[1:]}
    assert stats["config.seed"] == "5"
    assert stats["config.target"] == "coefficients"
    assert stats["failed_trials"] == "0"


def test_experiment_is_reproducible(two_pole_file, tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"e{i}.csv"
        run(["experiment", "--function", two_pole_file, "--n", 2, "--sigma", 1e-4, "--target", "samples",
             "--trials", 4, "--workers", 1 + i, "--out", path], capsys)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert b"\r\n" not in outs[0]


def test_compare_aaa_csv(tmp_path, capsys):
    f = tmp_path / "f.json"
    io.save_json(io.rational_to_json(four_pole()), f)
    code, out, _ = run(["compare-aaa", "--function", f, "--n", 15, "--l", 20, "--sigma", 1e-7, "--trials", 2], capsys)
    assert code == 0
    stats = [r[2] for r in csv.reader(out.splitlines())][1:]
    assert "hankel:e_z_average" in stats
    assert "aaa:e_z_average" in stats


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["generate", "--n", "2"],
        ["generate", "--function", "{f}", "--n", "x"],
        ["generate", "--function", "{missing}", "--n", "2"],
        ["generate", "--function", "{f}", "--n", "0"],
        ["recover", "--data", "{f}"],
        ["experiment", "--function", "{f}", "--n", "2", "--sigma", "1e-3", "--l", "9"],
        ["experiment", "--function", "{f}", "--n", "2", "--sigma", "-1"],
        ["experiment", "--function", "{f}", "--n", "2", "--sigma", "1e-3", "--seed", "-1"],
        ["experiment", "--function", "{f}", "--n", "2", "--sigma", "1e-3", "--target", "nope"],
    ],
)
def test_invalid_input_exit_code(argv, two_pole_file, tmp_path, capsys):
    argv = [a.format(f=two_pole_file, missing=tmp_path / "none.json") for a in argv]
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_numerical_failure_exit_code(tmp_path, capsys):
    data = tmp_path / "zero.json"
    io.save_json({"kind": "fourier", "N": 2, "neg": [0] * 4, "pos": [0] * 4}, data)
    code, _, err = run(["recover", "--data", data, "--m1", 1, "--m2", 0], capsys)
    assert code == 2
    assert "numerical failure" in err


def test_module_entry_point(two_pole_file):
    res = subprocess.run([sys.executable, "-m", "ratpencil", "sensitivity", "--function", str(two_pole_file)],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "inside" in json.loads(res.stdout)
