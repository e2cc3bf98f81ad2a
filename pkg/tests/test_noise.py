"""
Tests for the sensor noise model and calibration
"""

import numpy as np
import pytest
from scipy import stats

from src.noise import (
    NoiseParams, SequenceFit, VacuumSequence, add_noise, calibrate, calibrate_with_report, fit_affine,
    intensity_ladder, pooled_sigma_c, read_sequences, sequence_statistics, sigma_p, synth_vacuum, write_sequences,
)
from src.tensor import Tensor
from src.utils.errors import ConfigError, DomainError, FitError


def _ladder_sequences(params, base=100.0, frames=10, h=128, w=256, seed=0):
    return [synth_vacuum(i, params, frames, h, w, seed + k) for k, i in enumerate(intensity_ladder(base))]


class TestNoiseParams:
    def test_builtin_values(self):
        p = NoiseParams.builtin()
        assert (p.slope, p.intercept, p.sigma_c) == (0.03583, 1.379, 0.6641)

    def test_sigma_p_line(self):
        assert sigma_p(100.0, NoiseParams.builtin()) == pytest.approx(4.962)
        assert sigma_p(0.0, NoiseParams.builtin()) == pytest.approx(1.379)

    def test_negative_intensity(self):
        with pytest.raises(DomainError):
            sigma_p(-1.0, NoiseParams.builtin())

    def test_negative_parameter_rejected(self):
        with pytest.raises(ConfigError):
            NoiseParams(slope=-0.1).validate()

    def test_missing_key_rejected(self):
        with pytest.raises(ConfigError):
            NoiseParams.from_dict({"slope": 0.1, "intercept": 1.0})

    def test_save_load(self, tmp_path):
        p = NoiseParams(slope=0.04, intercept=1.1, sigma_c=0.5)
        p.save(tmp_path / "params.json")
        assert NoiseParams.load(tmp_path / "params.json") == p


class TestAddNoise:
    def test_zero_noise_is_identity(self):
        clean = Tensor(np.arange(48, dtype=np.float32).reshape(1, 6, 8))
        np.testing.assert_array_equal(add_noise(clean, NoiseParams.zero(), seed=1).data, clean.data)

    def test_seeded(self):
        clean = np.full((1, 16, 16), 50.0, dtype=np.float32)
        a = add_noise(clean, NoiseParams.builtin(), seed=5).data
        np.testing.assert_array_equal(a, add_noise(clean, NoiseParams.builtin(), seed=5).data)
        assert not np.array_equal(a, add_noise(clean, NoiseParams.builtin(), seed=6).data)
        assert a.dtype == np.float32

    def test_column_noise_is_shared_down_columns(self):
        clean = np.zeros((1, 4, 10000), dtype=np.float32)
        noisy = add_noise(clean, NoiseParams(sigma_c=2.0), seed=0).data[0]
        np.testing.assert_array_equal(noisy, np.broadcast_to(noisy[0], noisy.shape))
        assert noisy[0].std() == pytest.approx(2.0, rel=0.03)

    def test_pointwise_std_follows_intensity(self):
        p = NoiseParams(slope=0.03583, intercept=1.379, sigma_c=0.0)
        clean = np.full((1, 512, 512), 100.0, dtype=np.float32)
        noisy = add_noise(clean, p, seed=2).data
        assert noisy.mean() == pytest.approx(100.0, abs=0.05)
        assert noisy.std() == pytest.approx(4.962, rel=0.01)

    def test_pointwise_noise_is_gaussian(self):
        p = NoiseParams(slope=0.03583, intercept=1.379, sigma_c=0.0)
        clean = np.full((1, 250, 400), 150.0, dtype=np.float32)
        z = (add_noise(clean, p, seed=11).data.astype(np.float64) - 150.0) / sigma_p(150.0, p)
        assert z.size == 100_000
        assert stats.kstest(z.ravel(), "norm").pvalue > 0.01

    def test_negative_clean_rejected(self):
        with pytest.raises(DomainError):
            add_noise(np.full((1, 4, 4), -1.0), NoiseParams.builtin(), seed=0)


class TestSequences:
    def test_intensity_ladder(self):
        assert intensity_ladder(100.0) == pytest.approx([100, 120, 140, 160, 180, 200])
        assert len(intensity_ladder(20.0, count=3)) == 3

    def test_needs_two_frames(self):
        with pytest.raises(ConfigError):
            synth_vacuum(100.0, NoiseParams.builtin(), 1, 8, 8, seed=0)

    def test_directory_round_trip(self, tmp_path):
        seqs = [synth_vacuum(i, NoiseParams.builtin(), 3, 8, 12, seed=i) for i in (50.0, 90.0)]
        back = read_sequences(write_sequences(tmp_path / "vac", seqs))
        assert [s.intensity for s in back] == [50.0, 90.0]
        assert len(back[1].frames) == 3
        np.testing.assert_array_equal(back[1].frames[2].data, seqs[1].frames[2].data)

    def test_missing_directory(self, tmp_path):
        with pytest.raises(ConfigError):
            read_sequences(tmp_path / "nope")


class TestFitAffine:
    def test_exact_line(self):
        slope, intercept, r = fit_affine([1.0, 2.0, 3.0], [3.0, 5.0, 7.0])
        assert (slope, intercept, r) == pytest.approx((2.0, 1.0, 1.0))

    def test_negative_slope_clamped(self):
        slope, intercept, _ = fit_affine([1.0, 2.0], [3.0, 2.0])
        assert slope == 0.0 and intercept == pytest.approx(4.0)

    def test_single_intensity(self):
        with pytest.raises(FitError, match="need >= 2 intensities"):
            fit_affine([100.0], [4.0])

    def test_shared_intensity(self):
        with pytest.raises(FitError, match="one intensity"):
            fit_affine([100.0, 100.0], [4.0, 4.1])


class TestCalibration:
    def test_recovers_builtin_parameters(self):
        params, report = calibrate_with_report(_ladder_sequences(NoiseParams.builtin(), frames=100, h=256))
        assert params.slope == pytest.approx(0.03583, rel=0.05)
        assert params.intercept == pytest.approx(1.379, rel=0.05)
        assert params.sigma_c == pytest.approx(0.6641, rel=0.05)
        assert len(report.rows) == 6
        assert report.r_value > 0.99
        for row in report.rows:
            assert row.residual == pytest.approx(row.sigma_p - row.fitted_sigma_p)

    def test_zero_column_noise(self):
        p = NoiseParams(slope=0.03583, intercept=1.379, sigma_c=0.0)
        seqs = [synth_vacuum(i, p, 100, 256, 256, seed=k) for k, i in enumerate((100.0, 200.0))]
        assert calibrate(seqs).sigma_c < 0.02 * sigma_p(100.0, p)

    def test_same_intensity_different_seeds(self):
        seqs = [synth_vacuum(100.0, NoiseParams.builtin(), 10, 64, 64, seed=s) for s in (0, 1)]
        with pytest.raises(FitError, match="declare intensity 100"):
            calibrate(seqs)

    def test_nearly_equal_measured_intensities(self):
        with pytest.raises(FitError, match="one intensity"):
            fit_affine([100.0, 100.01, 99.995], [4.9, 5.1, 5.0])

    def test_pooling_favours_low_column_variance(self):
        dim = SequenceFit(intensity=20.0, sigma_p=2.0, sigma_c=0.2, sigma_c_sq=0.04, column_var=0.06,
                          column_count=1000)
        bright = SequenceFit(intensity=200.0, sigma_p=20.0, sigma_c=0.0, sigma_c_sq=-0.1, column_var=1.5,
                             column_count=1000)
        pooled = pooled_sigma_c([dim, bright])
        assert pooled == pytest.approx(0.2, rel=0.01)
        assert pooled_sigma_c([dim, dim]) == pytest.approx(0.2)

    def test_pooled_column_noise_at_faint_corner(self):
        truth = NoiseParams(slope=0.1, intercept=3.0, sigma_c=0.2)
        fit = calibrate(_ladder_sequences(truth, base=20.0, frames=100, h=256))
        assert fit.sigma_c == pytest.approx(0.2, rel=0.05)

    def test_sequence_statistics_intensity(self):
        row = sequence_statistics(synth_vacuum(150.0, NoiseParams.builtin(), 4, 64, 64, seed=1))
        assert row.intensity == pytest.approx(150.0, abs=0.5)

    def test_single_sequence(self):
        with pytest.raises(FitError, match="need >= 2 intensities"):
            calibrate([synth_vacuum(100.0, NoiseParams.builtin(), 2, 8, 8, seed=0)])

    def test_single_row_frames(self):
        seq = VacuumSequence(100.0, [Tensor(np.full((1, 1, 8), 100.0)) for _ in range(3)])
        with pytest.raises(FitError):
            sequence_statistics(seq)

    @pytest.mark.slow
    def test_random_parameter_recovery(self):
        rng = np.random.default_rng(42)
        for draw in range(20):
            truth = NoiseParams(slope=rng.uniform(0.01, 0.1), intercept=rng.uniform(0.5, 3.0),
                                sigma_c=rng.uniform(0.2, 2.0))
            fit = calibrate(_ladder_sequences(truth, base=20.0, frames=100, h=256, seed=100 * draw))
            assert fit.slope == pytest.approx(truth.slope, rel=0.05)
            assert fit.intercept == pytest.approx(truth.intercept, rel=0.05)
            assert fit.sigma_c == pytest.approx(truth.sigma_c, rel=0.05)
