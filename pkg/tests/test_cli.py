import json
import os

import numpy as np
import pytest

from centroflow import disk, ellipse, load_body, make_support_fn, save_body
from centroflow.bodyio import body_from_dict, body_to_dict
from centroflow.cli import main
from centroflow.spectral import angles


@pytest.fixture()
def workdir(tmp_path):
    save_body(disk(1.0, 128), tmp_path / "disk.json")
    save_body(ellipse(1.5, 0.9, 0.4, 256), tmp_path / "ellipse.json")
    th = angles(256)
    bad = {"n": 256, "h": list(1 + 0.5 * np.cos(2 * th)), "symmetric": True}
    (tmp_path / "bad.json").write_text(json.dumps(bad))
    return tmp_path


class TestBodyJson:
    def test_grid_roundtrip(self, tmp_path, wobble):
        path = tmp_path / "w.json"
        save_body(wobble, path)
        back = load_body(path)
        assert np.max(np.abs(back.samples - wobble.samples)) < 1e-15
        assert back.symmetric == wobble.symmetric

    def test_fourier_form_accepted(self):
        body = body_from_dict({
            "n": 64,
            "fourier": {"a": [1.0, 0.0, 0.2], "b": [0.0, 0.05]},
            "symmetric": True,
        })
        th = angles(64)
        want = 1.0 + 0.2 * np.cos(2 * th) + 0.05 * np.sin(2 * th)
        assert np.max(np.abs(body.samples - want)) < 1e-13

    def test_writer_emits_grid_form(self, wobble):
        data = body_to_dict(wobble)
        assert set(data) == {"n", "h", "symmetric"}

    def test_mismatched_n_rejected(self):
        with pytest.raises(ValueError):
            body_from_dict({"n": 32, "h": [1.0] * 64})


class TestOpCommand:
    def test_centroid_of_disk(self, workdir, capsys):
        rc = main(["op", "centroid", "--body", str(workdir / "disk.json")])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        assert np.allclose(data["h"], 4 / (3 * np.pi), atol=1e-10)

    def test_bm_of_ellipse(self, workdir, capsys):
        rc = main(["op", "bm", "--body", str(workdir / "ellipse.json")])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        assert data["distance"] == pytest.approx(1.0, abs=1e-4)

    def test_lambda_of_ellipse_is_fixed_point(self, workdir, capsys):
        rc = main(["op", "lambda", "--body", str(workdir / "ellipse.json")])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        orig = load_body(workdir / "ellipse.json")
        assert np.max(np.abs(np.array(data["h"]) - orig.samples)) <= 1e-7

    def test_nonconvex_body_is_exit_2(self, workdir, capsys):
        rc = main(["op", "polar", "--body", str(workdir / "bad.json")])
        assert rc == 2
        assert "error" in capsys.readouterr().err

    def test_missing_file_is_exit_3(self, workdir, capsys):
        rc = main(["op", "polar", "--body", str(workdir / "nope.json")])
        assert rc == 3

    def test_out_file(self, workdir):
        out = workdir / "polar.json"
        rc = main(["op", "polar", "--body", str(workdir / "disk.json"),
                   "--out", str(out)])
        assert rc == 0
        assert load_body(out).samples[0] == pytest.approx(1.0, abs=1e-10)


class TestMinkowskiCommand:
    def test_solve(self, workdir, capsys):
        th = angles(64)
        (workdir / "f.json").write_text(
            json.dumps({"n": 64, "f": list(1 + 0.3 * np.cos(2 * th))}))
        rc = main(["minkowski", "--f", str(workdir / "f.json")])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        want = 1 - 0.1 * np.cos(2 * th)
        assert np.max(np.abs(np.array(data["h"]) - want)) < 1e-12

    def test_closure_violation_exit_2(self, workdir, capsys):
        th = angles(64)
        (workdir / "f1.json").write_text(
            json.dumps({"n": 64, "f": list(1 + 0.2 * np.cos(th))}))
        rc = main(["minkowski", "--f", str(workdir / "f1.json")])
        assert rc == 2


class TestFlowCommand:
    def test_disk_run_outputs(self, workdir):
        out = workdir / "run"
        rc = main(["flow", "--body", str(workdir / "disk.json"),
                   "--out", str(out), "--t-stop", "0.05", "--every", "20"])
        assert rc == 0
        lines = (out / "trace.csv").read_text().strip().split("\n")
        assert lines[0] == ("t,area,polar_area,bp_ratio,min_S,max_ca2,"
                            "max_ca3,d_bm,harnack")
        report = json.loads((out / "report.json").read_text())
        assert report["estimated_T"] == pytest.approx(0.25, abs=1e-6)
        final_bp = float(lines[-1].split(",")[3])
        assert final_bp == pytest.approx((4 / (3 * np.pi)) ** 2, abs=1e-6)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["version"]
        assert "trace.csv" in manifest["outputs"]
        assert len(manifest["input_sha256"]) == 64

    def test_frames_emitted(self, workdir):
        out = workdir / "run_frames"
        frames = out / "frames"
        rc = main(["flow", "--body", str(workdir / "disk.json"),
                   "--out", str(out), "--frames", str(frames),
                   "--t-stop", "0.02", "--every", "50"])
        assert rc == 0
        files = sorted(os.listdir(frames))
        assert files[0] == "frame_000000.svg"
        text = (frames / files[0]).read_text()
        assert "viewBox=\"-2 -2 4 4\"" in text
        assert "polyline" in text

    def test_nonconvex_body_exit_2(self, workdir, capsys):
        rc = main(["flow", "--body", str(workdir / "bad.json"),
                   "--out", str(workdir / "r2")])
        assert rc == 2
        assert "t=0" in capsys.readouterr().err


class TestCampaignCommands:
    def test_fuzz_deterministic_bytes(self, workdir):
        out1, out2 = workdir / "f1", workdir / "f2"
        assert main(["fuzz", "--seeds", "8", "--seed", "7",
                     "--out", str(out1)]) == 0
        assert main(["fuzz", "--seeds", "8", "--seed", "7",
                     "--out", str(out2)]) == 0
        assert (out1 / "fuzz.json").read_bytes() == (out2 / "fuzz.json").read_bytes()

    def test_stability_scatter(self, workdir):
        out = workdir / "stab"
        rc = main(["stability", "--samples", "10", "--seed", "3",
                   "--n", "128", "--out", str(out)])
        assert rc == 0
        lines = (out / "scatter.csv").read_text().strip().split("\n")
        assert lines[0] == "seed,eps,d_bm_minus_1,pinch_bound,gamma_witness"
        assert len(lines) == 11
        summary = json.loads((out / "summary.json").read_text())
        assert np.isfinite(summary["gamma"])
