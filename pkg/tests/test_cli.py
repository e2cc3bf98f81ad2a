"""
Command line tests: every subcommand through main(argv)
"""

import json

import numpy as np
import pytest

from main import main
from src.baselines import GaussianFilterSpec, gaussian_filter
from src.data import AtomSet, RenderParams, read_dataset, render_atoms
from src.model import save_checkpoint
from src.noise import NoiseParams
from src.tensor import Tensor, load_tensor, save_tensor
from src.utils import read_json, read_pgm

SMALL = ["--size", "32x32", "--perlin-cell", "16"]


def _error_record(capsys) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def _files(root):
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*"))
            if p.is_file() and p.name != "resolved.json"}


@pytest.fixture
def noisy_file(tmp_path, rng):
    path = tmp_path / "noisy.tensor"
    save_tensor(path, Tensor(rng.uniform(0, 255, (1, 24, 24)).astype(np.float32)), "noisy")
    return path


class TestGenerate:
    def test_empty_dataset(self, tmp_path):
        assert main(["generate", "--out", str(tmp_path / "ds"), "--count", "0"] + SMALL) == 0
        assert read_json(tmp_path / "ds" / "index.json")["count"] == 0
        resolved = read_json(tmp_path / "ds" / "resolved.json")
        assert resolved["noise_params"] == "builtin-paper"
        assert resolved["noise"] == NoiseParams.builtin().to_dict()
        assert resolved["generation"]["size"] == [32, 32]

    def test_same_seed_same_bytes(self, tmp_path):
        for name in ("a", "b"):
            assert main(["generate", "--out", str(tmp_path / name), "--count", "2", "--seed", "5"] + SMALL) == 0
        assert _files(tmp_path / "a") == _files(tmp_path / "b")
        a = read_json(tmp_path / "a" / "resolved.json")
        b = read_json(tmp_path / "b" / "resolved.json")
        a.pop("out"), b.pop("out")
        assert a == b

    def test_validation_set(self, tmp_path):
        args = ["generate", "--out", str(tmp_path / "train"), "--count", "1", "--val-out", str(tmp_path / "val"),
                "--val-count", "2"] + SMALL
        assert main(args) == 0
        assert len(read_dataset(tmp_path / "val")) == 2
        assert read_json(tmp_path / "val" / "index.json")["seed"] != 0

    def test_config_file_and_environment(self, tmp_path, monkeypatch):
        config = tmp_path / "settings.json"
        config.write_text(json.dumps({"size": "32x32", "perlin_cell": 16, "count": 3}), encoding="utf-8")
        monkeypatch.setenv("NUC_SEED", "9")
        assert main(["generate", "--out", str(tmp_path / "ds"), "--config", str(config), "--count", "1"]) == 0
        resolved = read_json(tmp_path / "ds" / "resolved.json")
        assert resolved["count"] == 1
        assert resolved["seed"] == 9
        assert resolved["generation"]["perlin_cell"] == 16

    def test_invalid_size(self, tmp_path, capsys):
        assert main(["generate", "--out", str(tmp_path / "ds"), "--size", "1x5"]) == 2
        assert _error_record(capsys)["error"] == "config"

    def test_missing_out(self, capsys):
        assert main(["generate"]) == 2
        assert _error_record(capsys)["error"] == "usage"


class TestCalibration:
    def test_vacuum_then_calibrate(self, tmp_path):
        vac = tmp_path / "vac"
        assert main(["synth-vacuum", "--out", str(vac), "--levels", "3", "--frames", "4", "--size", "32x32"]) == 0
        assert main(["calibrate", "--in", str(vac), "--out", str(tmp_path / "params.json")]) == 0
        params = NoiseParams.load(tmp_path / "params.json")
        assert params.slope >= 0 and params.intercept >= 0
        report = read_json(tmp_path / "params_report.json")
        assert len(report["rows"]) == 3
        assert read_json(tmp_path / "resolved.json")["noise"] == params.to_dict()

    def test_single_intensity_fails(self, tmp_path, capsys):
        vac = tmp_path / "vac"
        assert main(["synth-vacuum", "--out", str(vac), "--levels", "1", "--frames", "3", "--size", "16x16"]) == 0
        capsys.readouterr()
        assert main(["calibrate", "--in", str(vac), "--out", str(tmp_path / "params.json")]) == 2
        record = _error_record(capsys)
        assert record["error"] == "fit"
        assert "need >= 2 intensities" in record["message"]


class TestDenoise:
    def test_gaussian_matches_library(self, tmp_path, noisy_file):
        out = tmp_path / "out" / "smooth.tensor"
        assert main(["denoise", "--in", str(noisy_file), "--out", str(out), "--method", "gaussian"]) == 0
        expected = gaussian_filter(load_tensor(noisy_file)[0], GaussianFilterSpec.from_sigma(1.5))
        np.testing.assert_array_equal(load_tensor(out)[0].data, expected.data)
        assert read_json(tmp_path / "out" / "resolved.json")["gaussian"] == {"sigma": 1.5, "radius": 5}

    def test_pgm_output(self, tmp_path, noisy_file):
        out = tmp_path / "smooth.pgm"
        assert main(["denoise", "--in", str(noisy_file), "--out", str(out), "--method", "gaussian"]) == 0
        assert read_pgm(out).shape == (24, 24)

    def test_scgn_checkpoint(self, tmp_path, noisy_file, tiny_model):
        ckpt = save_checkpoint(tmp_path / "ckpt", tiny_model, seed=3, epoch=0)
        out = tmp_path / "scgn.tensor"
        args = ["denoise", "--in", str(noisy_file), "--out", str(out), "--checkpoint", str(ckpt),
                "--n", "1", "--channels", "4", "--r", "1"]
        assert main(args) == 0
        result = load_tensor(out)[0].data
        assert result.shape == (1, 24, 24)
        assert np.all(np.isfinite(result))

    def test_architecture_mismatch(self, tmp_path, noisy_file, tiny_model, capsys):
        ckpt = save_checkpoint(tmp_path / "ckpt", tiny_model, seed=3, epoch=0)
        args = ["denoise", "--in", str(noisy_file), "--out", str(tmp_path / "x.tensor"), "--checkpoint", str(ckpt),
                "--n", "2"]
        assert main(args) == 2
        assert _error_record(capsys)["error"] == "config"

    def test_corrupt_input(self, tmp_path, capsys):
        bad = tmp_path / "bad.tensor"
        bad.write_bytes(b"not a tensor file at all")
        assert main(["denoise", "--in", str(bad), "--out", str(tmp_path / "x.tensor"), "--method", "gaussian"]) == 2
        record = _error_record(capsys)
        assert record["error"] == "format" and record["offset"] == 0

    def test_scgn_without_checkpoint(self, tmp_path, noisy_file, capsys):
        assert main(["denoise", "--in", str(noisy_file), "--out", str(tmp_path / "x.tensor")]) == 2
        assert _error_record(capsys)["error"] == "usage"


class TestEvalAndLocalize:
    def test_eval_writes_reports(self, tmp_path, small_dataset, capsys):
        out = tmp_path / "eval"
        args = ["eval", "--dataset", str(small_dataset), "--method", "oracle", "--method", "identity",
                "--out", str(out)]
        assert main(args) == 0
        stdout = capsys.readouterr().out
        assert "oracle" in stdout and "99.00" in stdout
        assert read_json(out / "report_oracle.json")["psnr_db"] == 99.0
        assert [r["meta"]["method"] for r in read_json(out / "metrics.json")] == ["oracle", "identity"]
        assert (out / "table.txt").read_text(encoding="utf-8").startswith("Method")

    def test_eval_scgn_needs_checkpoint(self, small_dataset, capsys):
        assert main(["eval", "--dataset", str(small_dataset), "--method", "scgn"]) == 2
        assert _error_record(capsys)["error"] == "usage"

    def test_localize(self, tmp_path):
        image = render_atoms(AtomSet([[10.0, 10.0], [20.0, 22.0]], image_size=(32, 32)), RenderParams.groundtruth())
        save_tensor(tmp_path / "gt.tensor", image, "gt")
        assert main(["localize", "--in", str(tmp_path / "gt.tensor"), "--out", str(tmp_path / "loc")]) == 0
        centroids = read_json(tmp_path / "loc" / "centroids.json")
        assert centroids["count"] == 2
        np.testing.assert_allclose(sorted(centroids["centroids"]), [[10.0, 10.0], [20.0, 22.0]], atol=1e-6)
        mask = read_pgm(tmp_path / "loc" / "mask.pgm")
        assert set(np.unique(mask)) == {0.0, 255.0}

    def test_localize_help_states_min_size_default(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["localize", "--help"])
        assert exc.value.code == 0
        text = " ".join(capsys.readouterr().out.split())
        assert "(default 1; 2 also drops isolated pixels)" in text


class TestTraceCommand:
    def test_writes_maps_and_weights(self, tmp_path, noisy_file, tiny_model):
        ckpt = save_checkpoint(tmp_path / "ckpt", tiny_model, seed=3, epoch=0)
        out = tmp_path / "trace"
        assert main(["trace", "--in", str(noisy_file), "--out", str(out), "--checkpoint", str(ckpt)]) == 0
        index = read_json(out / "trace.json")
        kinds = [m["kind"] for m in index["maps"]]
        assert kinds.count("local_sd") == 2 and kinds.count("sdgw_gate") == 2
        assert len(index["band_weights"]) == 2 and len(index["band_weights"][0]) == 2
        assert read_pgm(out / "gate_00.pgm").shape == (24, 49)
        assert read_pgm(out / "denoised.pgm").shape == (24, 24)
        assert read_json(out / "resolved.json")["arch"]["C"] == 4

    def test_needs_checkpoint(self, tmp_path, noisy_file, capsys):
        assert main(["trace", "--in", str(noisy_file), "--out", str(tmp_path / "trace")]) == 2
        assert _error_record(capsys)["error"] == "usage"


class TestTrainCommand:
    def test_tiny_run(self, tmp_path, small_dataset):
        out = tmp_path / "run"
        args = ["train", "--dataset", str(small_dataset), "--out", str(out), "--epochs", "1", "--batch-size", "2",
                "--n", "1", "--channels", "4", "--r", "1"]
        assert main(args) == 0
        manifest = read_json(out / "model" / "manifest.json")
        assert manifest["arch"]["n"] == 1 and manifest["arch"]["C"] == 4
        assert len(manifest["loss_history"]) == 1
        resolved = read_json(out / "resolved.json")
        assert resolved["train"]["epochs"] == 1 and resolved["preset"] == "desk"

    def test_negative_epochs_from_environment(self, tmp_path, small_dataset, capsys, monkeypatch):
        monkeypatch.setenv("NUC_EPOCHS", "-1")
        assert main(["train", "--dataset", str(small_dataset), "--out", str(tmp_path / "run")]) == 2
        assert _error_record(capsys)["error"] == "config"


@pytest.mark.slow
def test_desk_pipeline(tmp_path, capsys):
    data, val, run = tmp_path / "train", tmp_path / "val", tmp_path / "run"
    assert main(["generate", "--preset", "desk", "--out", str(data), "--count", "200", "--val-out", str(val),
                 "--val-count", "50", "--threads", "4"]) == 0
    assert main(["train", "--preset", "desk", "--dataset", str(data), "--out", str(run)]) == 0
    capsys.readouterr()
    assert main(["eval", "--dataset", str(val), "--checkpoint", str(run / "model"), "--out", str(tmp_path / "eval")]) == 0
    reports = {r["meta"]["method"]: r for r in read_json(tmp_path / "eval" / "metrics.json")}
    assert reports["scgn"]["psnr_db"] >= reports["gaussian"]["psnr_db"] + 3.0
