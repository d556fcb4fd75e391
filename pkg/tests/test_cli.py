import csv
import json

import jsonschema
import numpy as np
import pytest

from ugrm_gft.cli import load_schema, parse_grid, parse_int_grid, run


@pytest.fixture
def dataset(tmp_path):
    out = tmp_path / "data"
    assert run(["synth", "--n", "5", "--t", "4", "--band", "6", "--seed", "1",
                "--out-dir", str(out)]) == 0
    return out


def common(dataset):
    return ["--signal", str(dataset / "signal.csv"), "--stations", str(dataset / "stations.csv"),
            "--neighbors", "2"]


def read_json(path):
    return json.loads(path.read_text("utf-8"))


def test_parse_grid():
    assert parse_grid("0:1:0.5") == (0.0, 0.5, 1.0)
    assert parse_grid("0.1,0.3") == (0.1, 0.3)
    assert parse_int_grid("0,5,10") == (0, 5, 10)


def test_synth_outputs(dataset):
    report = read_json(dataset / "report.json")
    jsonschema.validate(report, load_schema())
    assert report["files"] == ["signal.csv", "stations.csv"]


@pytest.mark.parametrize("variant", ["I", "II"])
def test_spectrum_parseval(dataset, tmp_path, variant):
    out = tmp_path / "spec"
    rc = run(["spectrum", *common(dataset), "--variant", variant, "--alpha", "0.3", "--k", "0.2",
              "--out-dir", str(out)])
    assert rc == 0
    report = read_json(out / "report.json")
    jsonschema.validate(report, load_schema())
    assert abs(report["spectrum_energy"] - report["signal_energy"]) <= 1e-8 * report["signal_energy"]
    with (out / "spectrum.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 20
    freqs = [float(r["frequency"]) for r in rows]
    assert freqs == sorted(freqs)


def test_spectrum_undirected_second_block_zero(tmp_path):
    # one time step: the line factor has no edges, so the product is undirected
    sym = tmp_path / "sym.csv"
    sym.write_text("0,1,0,0,0\n1,0,1,0,0\n0,1,0,1,0\n0,0,1,0,1\n0,0,0,1,0\n")
    one = tmp_path / "one.csv"
    np.savetxt(one, np.random.default_rng(0).standard_normal((5, 1)), delimiter=",")
    out = tmp_path / "spec"
    assert run(["spectrum", "--signal", str(one), "--graph", str(sym), "--alpha", "0.5",
                "--k", "0.7", "--out-dir", str(out)]) == 0
    with (out / "spectrum.csv").open() as fh:
        z2 = [abs(float(r["z2"])) for r in csv.DictReader(fh)]
    assert len(z2) == 5 and max(z2) <= 1e-10


def denoise_args(dataset, out):
    return ["denoise", *common(dataset), "--alpha-grid", "0,0.5,1", "--k-grid", "0,1",
            "--sigma", "0.1,0.2", "--trials", "2", "--m-grid", "0,5,10,20", "--out-dir", str(out)]


def test_denoise_outputs_and_schema(dataset, tmp_path):
    out = tmp_path / "den"
    assert run(denoise_args(dataset, out)) == 0
    report = read_json(out / "report.json")
    jsonschema.validate(report, load_schema())
    assert len(report["reports"]) == 2
    for name in report["files"]:
        assert (out / name).is_file()
    header = (out / "curves" / "sigma_0.1" / "baseline_L.csv").read_text().splitlines()[0]
    assert header == "M,SNR,BAE"
    methods = [r["method"] for r in report["table"][0]["rows"]]
    assert methods[:2] == ["optimal", "ISNR"] and "Lap-GFT-I" in methods


def test_manifest_rerun_is_byte_identical(dataset, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(denoise_args(dataset, a)) == 0
    assert run(["denoise", "--manifest", str(a / "manifest.json"), "--out-dir", str(b)]) == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()


def test_monotonicity_command(tmp_path):
    path2 = tmp_path / "p2.csv"
    path2.write_text("0,0\n1,0\n")
    out = tmp_path / "mono"
    assert run(["monotonicity", "--graph", str(path2), "--k-grid", "1", "--alpha-grid", "0,0.5",
                "--out-dir", str(out)]) == 0
    report = read_json(out / "monotonicity.json")
    jsonschema.validate(report, load_schema())
    assert report["summary"]["total_violations"] == 1


def test_build_graph(dataset, tmp_path):
    out = tmp_path / "g"
    assert run(["build-graph", "--stations", str(dataset / "stations.csv"), "--neighbors", "2",
                "--out-dir", str(out)]) == 0
    report = read_json(out / "report.json")
    jsonschema.validate(report, load_schema())
    assert report["edges"] == 10


def test_missing_input_exit_code(tmp_path, capsys):
    rc = run(["spectrum", "--signal", str(tmp_path / "nope.csv"), "--graph", str(tmp_path / "g.csv"),
              "--out-dir", str(tmp_path / "o")])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_malformed_csv_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,x\n")
    rc = run(["spectrum", "--signal", str(bad), "--graph", str(bad), "--out-dir", str(tmp_path / "o")])
    assert rc == 2
    assert "line 2" in capsys.readouterr().err


def test_usage_error_exit_code(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run(["denoise", "--variant", "III", "--out-dir", str(tmp_path)])
    assert exc.value.code == 2


def test_manifest_for_other_command(dataset, tmp_path):
    assert run(["spectrum", "--manifest", str(dataset / "manifest.json"),
                "--out-dir", str(tmp_path / "x")]) == 2
