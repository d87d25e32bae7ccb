import csv
import io
import json
import os

import numpy as np
import pytest

from guenoise.cli import main
from guenoise.channels import qubit_f
from guenoise.sff import sff41


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sff_csv(capsys):
    code, out, _ = run(capsys, "sff", "--kind", "r2", "--n", "4", "--t-max", "40")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "value", "value/N^2"]
    assert float(rows[1][0]) == 0 and float(rows[1][1]) == 16 and float(rows[1][2]) == 1
    assert len(rows) == 1 + 257
    assert out.isascii()


def test_channel_peak(capsys):
    code, out, _ = run(capsys, "channel", "--n", "2", "--t-max", "8", "--grid", "linear", "--points", "801")
    data = np.loadtxt(io.StringIO(out), delimiter=",", skiprows=1)
    i = np.argmax(data[:, 1])
    assert abs(data[i, 0] - np.sqrt(3)) < 0.02
    assert data[i, 1] == pytest.approx(0.964, abs=1e-3)
    assert np.allclose(data[:, 1], qubit_f(data[:, 0]), atol=1e-12)


def test_json_and_atomic_output(capsys, tmp_path):
    path = tmp_path / "r41.json"
    code, _, _ = run(capsys, "sff", "--kind", "r41", "--n", "4", "--points", "20", "--format", "json", "--output", str(path), "--seed", "3")
    assert code == 0
    obj = json.loads(path.read_text())
    for key in ("kind", "n", "grid", "seed", "version"):
        assert key in obj
    assert obj["kind"] == "r41" and obj["n"] == 4 and obj["seed"] == 3
    t = obj["columns"]["t"]
    assert obj["columns"]["value"][5] == pytest.approx(sff41(t[5], 4), rel=1e-15)
    assert [p.name for p in tmp_path.iterdir()] == ["r41.json"]


def test_mc_kind_reproducible(capsys, tmp_path):
    args = ["sff", "--kind", "mc", "--p", "2", "--q", "1", "--n", "3", "--points", "4", "--samples", "500", "--seed", "9"]
    run(capsys, *args, "--output", str(tmp_path / "a.csv"))
    run(capsys, *args, "--output", str(tmp_path / "b.csv"))
    a = (tmp_path / "a.csv").read_text()
    assert a == (tmp_path / "b.csv").read_text()
    assert a.splitlines()[0] == "t,value,std_error,value/N^3"


@pytest.mark.parametrize(
    "argv",
    [
        ["sff", "--n", "0"],
        ["sff", "--n", "4", "--t-min", "5", "--t-max", "1"],
        ["sff", "--n", "4", "--points", "1"],
        ["sff", "--n", "4", "--grid", "cubic"],
        ["channel", "--n", "1"],
        ["variance", "--n", "3", "--row", "5"],
        ["sff", "--n", "200"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_numeric_failure_exit_1(capsys, monkeypatch, tmp_path):
    import guenoise.sff as sffmod
    from guenoise.errors import NumericConsistencyError

    def broken(t, n):
        raise NumericConsistencyError("forced", {"t": t})

    monkeypatch.setitem(sffmod._EVALUATORS, "r2", broken)
    path = tmp_path / "out.csv"
    code, _, err = run(capsys, "sff", "--n", "3", "--output", str(path))
    assert code == 1 and "numeric failure" in err
    assert not path.exists() and list(tmp_path.iterdir()) == []


def test_other_commands(capsys):
    for argv in (
        ["variance", "--n", "4", "--points", "5"],
        ["typicality", "--n", "4", "--points", "5", "--row", "1", "--col", "1"],
        ["qubit", "--n", "2", "--points", "5", "--quantity", "var-offdiag", "--pauli", "0", "1", "0", "0"],
    ):
        code, out, _ = run(capsys, *argv)
        assert code == 0
        assert out.splitlines()[0] == "t,value" and len(out.splitlines()) == 7


def test_validate_small(capsys, tmp_path):
    path = tmp_path / "v.json"
    code, _, err = run(capsys, "validate", "--n", "2", "--samples", "20000", "--seed", "7", "--format", "json", "--output", str(path))
    assert code == 0, err
    first = path.read_text()
    run(capsys, "validate", "--n", "2", "--samples", "20000", "--seed", "7", "--format", "json", "--output", str(path))
    assert path.read_text() == first
    assert all(c["passed"] for c in json.loads(first)["checks"])
