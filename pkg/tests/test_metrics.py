"""
Tests for PSNR, SSIM, localization, IoU and metric reports
"""

import math

import numpy as np
import pytest

from src.data import AtomSet, RenderParams, poisson_disk, render_atoms
from src.metrics import (
    FLAG_IOU_EMPTY, FLAG_PSNR_CAPPED, MetricReport, MetricsConfig, evaluate_images, format_table, iou, localize,
    psnr, ssim,
)
from src.utils.errors import ConfigError, DimensionError


def _gt(positions, size=40):
    return render_atoms(AtomSet(positions, image_size=(size, size)), RenderParams.groundtruth())


class TestPsnr:
    def test_identical(self):
        image = np.full((8, 8), 30.0)
        assert psnr(image, image) == math.inf

    def test_full_scale_error(self):
        assert psnr(np.zeros((4, 4)), np.full((4, 4), 255.0)) == pytest.approx(0.0)

    def test_unit_error(self):
        gt = np.full((1, 8, 8), 100.0)
        assert psnr(gt + 1.0, gt) == pytest.approx(48.1308, abs=1e-4)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            psnr(np.zeros((4, 4)), np.zeros((4, 5)))


class TestSsim:
    def test_identical(self, rng):
        image = rng.uniform(0, 255, (32, 32))
        assert ssim(image, image) == pytest.approx(1.0, abs=1e-12)

    def test_inversion_is_negative(self, rng):
        image = rng.uniform(0, 255, (32, 32))
        assert ssim(255.0 - image, image) < 0

    def test_constant_images(self):
        c1 = (0.01 * 255) ** 2
        expected = (2 * 100 * 150 + c1) / (100 ** 2 + 150 ** 2 + c1)
        assert ssim(np.full((16, 16), 100.0), np.full((16, 16), 150.0)) == pytest.approx(expected, rel=1e-6)

    def test_too_small(self):
        with pytest.raises(DimensionError):
            ssim(np.zeros((10, 10)), np.zeros((10, 10)))


class TestLocalize:
    def test_empty_image(self):
        result = localize(np.zeros((1, 16, 16)))
        assert result.count == 0 and not result.mask.data.any()

    def test_single_atom(self):
        result = localize(_gt([[20.0, 20.0]]))
        assert result.count == 1
        np.testing.assert_allclose(result.centroids[0], [20.0, 20.0], atol=1e-6)
        assert result.mask.shape == (1, 40, 40)

    def test_two_close_atoms_stay_apart(self):
        result = localize(_gt([[16.0, 20.0], [24.0, 20.0]]))
        assert result.count == 2
        np.testing.assert_allclose(sorted(result.centroids[:, 0]), [16.0, 24.0], atol=1e-6)

    def test_min_size_filters_components(self):
        image = np.zeros((16, 16))
        image[3, 3] = 200.0
        image[8:10, 8:10] = 200.0
        assert localize(image).count == 2
        assert localize(image, min_size=2).count == 1

    def test_threshold_range(self):
        with pytest.raises(ConfigError):
            localize(np.zeros((8, 8)), threshold=255.0)

    def test_render_round_trip(self):
        size = 64
        for seed in range(50):
            atoms = poisson_disk(size, size, 4.0, seed)
            result = localize(render_atoms(atoms, RenderParams.groundtruth()))
            interior = atoms.positions[(atoms.positions <= size - 1).all(axis=1)]
            assert result.count >= len(interior)
            for x, y in interior:
                d = np.hypot(result.centroids[:, 0] - x, result.centroids[:, 1] - y)
                assert d.min() < 0.5


class TestIou:
    def test_identical_and_disjoint(self):
        a = np.zeros((10, 10))
        a[:5] = 1
        assert iou(a, a) == 1.0
        assert iou(a, 1 - a) == 0.0

    def test_partial_overlap(self):
        a, b = np.zeros(200), np.zeros(200)
        a[:100] = 1
        b[50:150] = 1
        assert iou(a.reshape(10, 20), b.reshape(10, 20)) == pytest.approx(50 / 150)

    def test_both_empty(self):
        assert iou(np.zeros((4, 4)), np.zeros((4, 4))) == 1.0


class TestReport:
    def test_oracle_report(self):
        gts = [_gt([[20.0, 20.0]]).data, _gt([[10.0, 12.0], [30.0, 25.0]]).data]
        report = evaluate_images(gts, gts, meta={"method": "oracle"})
        assert report.psnr_db == 99.0
        assert report.ssim == pytest.approx(1.0)
        assert report.iou == 1.0
        assert report.method == "oracle"
        assert report.meta["samples"] == 2
        assert all(FLAG_PSNR_CAPPED in s.flags for s in report.per_sample)

    def test_empty_masks_flagged(self):
        zeros = [np.zeros((1, 16, 16))]
        report = evaluate_images(zeros, zeros)
        assert FLAG_IOU_EMPTY in report.per_sample[0].flags

    def test_prediction_clamped(self):
        gt = np.full((1, 16, 16), 255.0)
        clamped = evaluate_images([gt + 50.0], [gt])
        raw = evaluate_images([gt + 50.0], [gt], MetricsConfig(clamp=False))
        assert clamped.psnr_db == 99.0
        assert raw.psnr_db == pytest.approx(10 * math.log10(255.0 ** 2 / 2500.0))

    def test_count_mismatch(self):
        with pytest.raises(DimensionError):
            evaluate_images([np.zeros((16, 16))], [])

    def test_invalid_config(self):
        with pytest.raises(ConfigError):
            MetricsConfig(min_size=0).validate()

    def test_save_load(self, tmp_path):
        gts = [_gt([[20.0, 20.0]]).data]
        report = evaluate_images([gts[0] * 0.9], gts, meta={"method": "gaussian"})
        report.save(tmp_path / "report.json")
        back = MetricReport.load(tmp_path / "report.json")
        assert back.to_dict() == report.to_dict()

    def test_format_table(self):
        reports = [MetricReport(psnr_db=30.123, ssim=0.81234, iou=0.5, meta={"method": "gaussian"}),
                   MetricReport(psnr_db=35.0, ssim=0.9, iou=0.75, meta={"method": "scgn"})]
        lines = format_table(reports).splitlines()
        assert lines[0].split() == ["Method", "PSNR", "(dB)", "SSIM", "IoU"]
        assert set(lines[1]) == {"-"}
        assert lines[2].split() == ["gaussian", "30.12", "0.8123", "0.5000"]
        assert lines[3].split() == ["scgn", "35.00", "0.9000", "0.7500"]
        assert len({len(line) for line in lines}) == 1
