import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

import ewframes as ew
from ewframes import cli, io
from ewframes.errors import FormatError, SystemMismatch, ValidationError


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "unit.json").write_text(json.dumps({"points": list(range(-4, 5))}))
    (tmp_path / "rays.json").write_text(
        json.dumps({"points": [-2, 0, 2], "leftInfinite": True, "rightInfinite": True})
    )
    (tmp_path / "shannon.json").write_text(json.dumps({"kind": "shannon"}))
    (tmp_path / "gauss.json").write_text(json.dumps({"kind": "gaussian", "delta": 0.01}))
    return tmp_path


def _signal_csv(path, sig):
    io.write_signal(sig, path)
    return str(path)


def test_build_outputs_band_table(workdir, capsys):
    code = cli.main(["build", str(workdir / "rays.json"), str(workdir / "gauss.json")])
    assert code == 0
    table = json.loads(capsys.readouterr().out)
    assert [a["center"] for a in table["atoms"]] == [-3.0, -1.0, 1.0, 3.0]
    assert table["gamma"]["label"] == "c"


def test_detect_from_csv(workdir, capsys):
    f = np.linspace(0, 1, 101)
    mag = np.exp(-((f - 0.2) / 0.05) ** 2) + np.exp(-((f - 0.7) / 0.05) ** 2)
    with open(workdir / "spec.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["freq", "mag"])
        w.writerows(zip(f.tolist(), mag.tolist()))
    assert cli.main(["detect", str(workdir / "spec.csv"), "--bands", "2", "-o", str(workdir / "b.json")]) == 0
    bset = io.load_boundaries(workdir / "b.json")
    assert bset.left_infinite and bset.right_infinite
    assert bset.points[3] == pytest.approx(0.45)
    assert "boundaries: -inf" in capsys.readouterr().err


def test_transform_and_reconstruct_round_trip(workdir, capsys, rng):
    system = ew.build_system(
        ew.build_partition(io.load_boundaries(workdir / "rays.json")), io.load_wavelet(workdir / "gauss.json")[0]
    )
    dt, n = ew.signal_grid(system, (-10, 10), 256)
    sig = ew.random_bandlimited(rng, dt, n, (-2, 2))
    src = _signal_csv(workdir / "sig.csv", sig)
    args = [str(workdir / "rays.json"), str(workdir / "gauss.json")]
    assert cli.main(["transform", src, *args, "-o", str(workdir / "c.json"), "--reconstruct"]) == 0
    out = capsys.readouterr().out
    err = float(out.split("relative error ")[1].split()[0])
    assert err < 1e-8
    assert cli.main(["reconstruct", str(workdir / "c.json"), *args, "-o", str(workdir / "back.bin")]) == 0
    back = io.read_signal(workdir / "back.bin")
    assert back.dt == dt
    assert np.linalg.norm(back.samples - sig.samples) / np.linalg.norm(sig.samples) < 1e-8


def test_per_band_csv_directory(workdir, rng):
    sig = ew.random_bandlimited(rng, 1 / 16, 64, (-4, 4))
    src = _signal_csv(workdir / "s.csv", sig)
    code = cli.main(["transform", src, str(workdir / "unit.json"), str(workdir / "shannon.json"),
                     "-o", str(workdir / "bands")])
    assert code == 0
    files = sorted(p.name for p in (workdir / "bands").iterdir())
    assert len(files) == 8 and "band_0.csv" in files
    rows = list(csv.reader(open(workdir / "bands" / "band_0.csv")))
    assert rows[0] == ["k", "b", "re", "im"] and len(rows) == 1 + 4


def test_certify_exit_codes_and_determinism(workdir, capsys):
    args = ["certify", str(workdir / "unit.json"), str(workdir / "shannon.json"),
            "--grid-points", "2048", "--samples", "256", "--probes", "3", "--seed", "7"]
    assert cli.main(args) == 0
    first = capsys.readouterr().out
    assert json.loads(first)["verdict"] == "ParsevalCertified"
    assert cli.main(args) == 0
    assert capsys.readouterr().out == first
    assert cli.main(args + ["--shifts", ",".join(["2"] * 8)]) == 1
    assert json.loads(capsys.readouterr().out)["verdict"] == "BesselOnly"


def test_report_dump(workdir):
    out = workdir / "dump.csv"
    code = cli.main(["report-dump", str(workdir / "unit.json"), str(workdir / "shannon.json"),
                     "--grid-points", "64", "--alpha", "0", "--alpha", "1", "-o", str(out)])
    assert code == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["xi", "s", "G[0.0].re", "G[0.0].im", "G[1.0].re", "G[1.0].im"]
    assert len(rows) == 65
    assert all(float(r[1]) == 1.0 and float(r[2]) == 1.0 and float(r[4]) == 0.0 for r in rows[1:])


def test_exit_codes(workdir, capsys):
    shannon = str(workdir / "shannon.json")
    assert cli.main(["build", str(workdir / "missing.json"), shannon]) == 4
    (workdir / "bad.json").write_text("{not json")
    assert cli.main(["build", str(workdir / "bad.json"), shannon]) == 4
    (workdir / "desc.json").write_text(json.dumps({"points": [1, 0, -1]}))
    assert cli.main(["build", str(workdir / "desc.json"), shannon]) == 2
    sig = _signal_csv(workdir / "odd.csv", ew.SampledSignal(np.ones(30), 0.3))
    assert cli.main(["transform", sig, str(workdir / "unit.json"), shannon]) == 2
    sys_ = ew.build_system(ew.build_partition(io.load_boundaries(workdir / "rays.json")), ew.gaussian())
    dt, n = ew.signal_grid(sys_, (-10, 10), 128)
    g = _signal_csv(workdir / "g.csv", ew.random_bandlimited(np.random.default_rng(1), dt, n, (-2, 2)))
    code = cli.main(["transform", g, str(workdir / "rays.json"), str(workdir / "gauss.json"),
                     "--reconstruct", "--max-iter", "1"])
    assert code == 3
    assert "NotConverged" in capsys.readouterr().err


def test_console_script_runs(workdir):
    res = subprocess.run(
        [sys.executable, "-m", "ewframes.cli", "build", str(workdir / "unit.json"), str(workdir / "shannon.json")],
        capture_output=True, text=True,
    )
    assert res.returncode == 0
    assert len(json.loads(res.stdout)["atoms"]) == 8


# formats


def test_signal_csv_validation(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("t,re,im\n0,1,0\n0.1,1,0\n0.3,1,0\n")
    with pytest.raises(FormatError):
        io.read_signal(p)
    p.write_text("0,1,0\n0.1,x,0\n")
    with pytest.raises(FormatError, match="line 2"):
        io.read_signal(p)
    p.write_text("0,1\n0.1,1\n")
    with pytest.raises(FormatError, match="columns"):
        io.read_signal(p)


def test_raw_signal_round_trip(tmp_path, rng):
    sig = ew.SampledSignal(rng.standard_normal(33) + 1j * rng.standard_normal(33), 0.125)
    io.write_signal(sig, tmp_path / "x.bin")
    back = io.read_signal(tmp_path / "x.bin")
    assert np.array_equal(back.samples, sig.samples) and back.dt == 0.125
    (tmp_path / "x.json").write_text(json.dumps({"sampleInterval": 0.125, "length": 40}))
    with pytest.raises(FormatError):
        io.read_signal(tmp_path / "x.bin")


def test_json_floats_round_trip():
    x = 0.1 + 0.2
    assert json.loads(io.dumps({"v": x}))["v"] == x


def test_custom_wavelet(tmp_path):
    xs = np.linspace(-1, 1, 21)
    np.savetxt(tmp_path / "w.csv", np.column_stack([xs, 1 - np.abs(xs), 0 * xs]), delimiter=",")
    w = io.wavelet_from_config(
        {"kind": "custom", "params": {"path": "w.csv", "amplitude": 2}, "delta": 0.0}, tmp_path
    )
    assert w.l2_norm_sq == pytest.approx(4 * 2 / 3)
    assert w.essential.width == 2.0
    with pytest.raises(ValidationError):
        io.wavelet_from_config({"kind": "custom"})
    with pytest.raises(ValidationError):
        io.wavelet_from_config({"kind": "morlet"})


def test_meyer_config_options(tmp_path):
    (tmp_path / "m.json").write_text(json.dumps({"kind": "meyer", "params": {"tau": 0.2}, "overlap": 1.5}))
    w, opts = io.load_wavelet(tmp_path / "m.json")
    assert w.params["tau"] == 0.2 and opts == {"overlap": 1.5}


def test_coefficient_envelope(shannon_system, gaussian_system, rng):
    sig = ew.random_bandlimited(rng, 1 / 16, 256, (-8, 8))
    c = ew.dewt_forward(sig, shannon_system)
    data = json.loads(io.dumps(io.coefficients_to_dict(c)))
    back = io.coefficients_from_dict(data, shannon_system)
    for n in c.bands:
        assert np.array_equal(back.bands[n], c.bands[n])
    with pytest.raises(SystemMismatch):
        io.coefficients_from_dict(data, gaussian_system)
    with pytest.raises(FormatError):
        io.coefficients_from_dict({"bands": []}, shannon_system)


def test_partition_with_inline_infinity(tmp_path):
    p = tmp_path / "p.json"
    p.write_text('{"points": [-Infinity, -1, 0, 1, Infinity]}')
    bset = io.load_boundaries(p)
    assert bset.left_infinite and bset.right_infinite and bset.points == (-1.0, 0.0, 1.0)
    assert math.isinf(bset.indexed()[0][1])


def test_detect_flat_spectrum_fails(workdir, capsys):
    np.savetxt(workdir / "flat.csv", np.column_stack([np.linspace(0, 1, 50), np.ones(50)]), delimiter=",")
    assert cli.main(["detect", str(workdir / "flat.csv"), "--bands", "2"]) == 2
    assert "NotEnoughExtrema" in capsys.readouterr().err


def test_shannon_transform_reconstruct_cli(workdir, capsys, rng):
    sig = ew.random_bandlimited(rng, 1 / 16, 512, (-4, 4))
    src = _signal_csv(workdir / "s.csv", sig)
    for mode in ("dewt", "cewt"):
        code = cli.main(["transform", src, str(workdir / "unit.json"), str(workdir / "shannon.json"),
                         "--mode", mode, "--reconstruct"])
        assert code == 0
        out = capsys.readouterr().out
        assert float(out.split("relative error ")[1].split()[0]) <= 1e-8
