"""
Tests for synthetic data generation and dataset storage
"""

import math

import numpy as np
import pytest

from src.data import (
    AtomSet, GenerationConfig, RenderParams, generate_dataset, make_sample, nearest_pixels, perlin_mask,
    perlin_noise, poisson_disk, read_dataset, render_atoms,
)
from src.noise import NoiseParams
from src.utils.errors import ConfigError, UsageError
from src.utils.helpers import derive_seeds


def _brute_force_min_distance(points: np.ndarray) -> float:
    best = math.inf
    for i in range(len(points)):
        d = np.sqrt(((points[i + 1:] - points[i]) ** 2).sum(axis=1))
        if d.size:
            best = min(best, float(d.min()))
    return best


def _files(root):
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


class TestPoissonDisk:
    def test_radius_beyond_diagonal_gives_one_point(self):
        atoms = poisson_disk(10, 10, r_min=20.0, seed=0)
        assert len(atoms) == 1

    def test_degenerate_domain(self):
        assert len(poisson_disk(0, 10, r_min=4.0, seed=0)) == 0

    def test_invalid_radius(self):
        with pytest.raises(ConfigError):
            poisson_disk(10, 10, r_min=0.0, seed=0)

    def test_min_distance_and_density(self):
        w = h = 256
        atoms = poisson_disk(w, h, r_min=4.0, seed=3)
        assert _brute_force_min_distance(atoms.positions) >= 4.0
        assert np.all((atoms.positions >= 0) & (atoms.positions < 256))
        area = w * h
        low, high = area / (4 * 16.0), area / (16.0 * math.pi / 4)
        assert 0.7 * low <= len(atoms) <= 1.3 * high

    def test_deterministic(self):
        a, b = poisson_disk(64, 48, 4.0, seed=9), poisson_disk(64, 48, 4.0, seed=9)
        np.testing.assert_array_equal(a.positions, b.positions)

    @pytest.mark.slow
    def test_fifty_sets_pass_distance_audit(self):
        for seed in range(50):
            atoms = poisson_disk(256, 256, r_min=4.0, seed=seed)
            assert _brute_force_min_distance(atoms.positions) >= 4.0


class TestPerlinMask:
    def test_threshold_below_range(self):
        assert np.all(perlin_mask(64, 64, 16, -1.01, seed=0).data == 1.0)

    def test_threshold_above_range(self):
        assert np.all(perlin_mask(64, 64, 16, 1.01, seed=0).data == 0.0)

    def test_both_classes_over_seeds(self):
        for seed in range(20):
            mask = perlin_mask(256, 256, 64, 0.0, seed).data
            np.testing.assert_array_equal(mask, perlin_mask(256, 256, 64, 0.0, seed).data)
            assert mask.shape == (1, 256, 256)
            assert 0 < mask.sum() < mask.size

    def test_noise_range(self):
        noise = perlin_noise(100, 70, 10, seed=2)
        assert noise.shape == (70, 100)
        assert noise.min() >= -1.0 and noise.max() <= 1.0

    def test_cell_too_small(self):
        with pytest.raises(ConfigError):
            perlin_noise(16, 16, 1, seed=0)


class TestRenderAtoms:
    def test_empty_groundtruth(self):
        image = render_atoms(AtomSet(image_size=(16, 16)), RenderParams.groundtruth())
        assert image.shape == (1, 16, 16) and not image.data.any()

    def test_single_atom_closed_form(self):
        image = render_atoms(AtomSet([[8.0, 8.0]], image_size=(16, 16)), RenderParams.groundtruth()).data[0]
        assert image[8, 8] == pytest.approx(255.0)
        assert image[8, 9] == pytest.approx(255.0 * math.exp(-1.0 / (2 * 0.75 ** 2)), rel=1e-5)
        assert image[8, 9] == pytest.approx(104.8, abs=0.1)
        assert image[9, 8] == pytest.approx(image[8, 9])

    def test_distant_atoms_do_not_interact(self):
        single = render_atoms(AtomSet([[10.0, 10.0]], image_size=(32, 32)), RenderParams.groundtruth()).data[0]
        pair = render_atoms(AtomSet([[10.0, 10.0], [20.0, 10.0]], image_size=(32, 32)),
                            RenderParams.groundtruth()).data[0]
        assert pair[10, 10] == pytest.approx(single[10, 10], rel=0.01)
        assert pair[10, 20] == pytest.approx(single[10, 10], rel=0.01)

    def test_clean_mode_is_seeded(self):
        atoms = AtomSet([[5.0, 5.0], [12.0, 9.0]], image_size=(16, 16))
        a = render_atoms(atoms, RenderParams.clean(), seed=4).data
        b = render_atoms(atoms, RenderParams.clean(), seed=4).data
        np.testing.assert_array_equal(a, b)
        assert 5.0 <= a.min() and a.max() <= 255.0

    def test_groundtruth_ignores_seed(self):
        atoms = AtomSet([[5.3, 4.1], [11.0, 12.7]], image_size=(16, 16))
        a = render_atoms(atoms, RenderParams.groundtruth(), seed=1).data
        b = render_atoms(atoms, RenderParams.groundtruth(), seed=999).data
        assert a.tobytes() == b.tobytes()

    def test_groundtruth_constants_fixed(self):
        with pytest.raises(ConfigError):
            RenderParams(peak_brightness=200.0).validate()


class TestMakeSample:
    def test_all_material_keeps_every_atom(self):
        cfg = GenerationConfig(size=(48, 48), perlin_cell=16, perlin_threshold=-1.01)
        sample = make_sample(cfg, seed=5)
        raw = poisson_disk(48, 48, cfg.r_min, derive_seeds(5, 4)[0], k=cfg.poisson_k)
        assert len(sample.atoms) == len(raw) == sample.meta["raw_atoms"]

    def test_all_vacuum(self):
        cfg = GenerationConfig(size=(48, 48), perlin_cell=16, perlin_threshold=1.01)
        sample = make_sample(cfg, seed=5)
        assert len(sample.atoms) == 0
        assert not sample.gt.data.any()

    def test_retained_atoms_lie_in_material(self):
        cfg = GenerationConfig.default()
        for seed in (1, 2):
            sample = make_sample(cfg, seed)
            mask = perlin_mask(256, 256, cfg.perlin_cell, cfg.perlin_threshold, derive_seeds(seed, 4)[1]).data[0]
            rows, cols = nearest_pixels(sample.atoms, 256, 256)
            assert len(sample.atoms) > 0
            assert np.all(mask[rows, cols] == 1.0)

    def test_noiseless_sample_matches_clean_render(self):
        cfg = GenerationConfig(size=(32, 32), perlin_cell=16, noise=NoiseParams.zero())
        sample = make_sample(cfg, seed=8)
        clean = render_atoms(sample.atoms, cfg.clean_render, seed=derive_seeds(8, 4)[2], size=(32, 32))
        np.testing.assert_array_equal(sample.noisy.data, clean.data)

    def test_invalid_config(self):
        with pytest.raises(ConfigError):
            make_sample(GenerationConfig(size=(32, 32), r_min=-1.0), seed=0)


class TestDataset:
    def test_layout_and_lazy_reads(self, small_dataset):
        ds = read_dataset(small_dataset)
        assert len(ds) == 4
        assert ds.noisy(0).shape == (1, 32, 32)
        assert ds.stack("gt").shape == (4, 1, 32, 32)
        assert len(ds.atoms(1)) == ds.index["samples"][1]["atoms"]
        assert len(ds.dataset_id) == 12

    def test_empty_dataset(self, tmp_path, small_config):
        out = generate_dataset(tmp_path / "empty", small_config, count=0, seed=0)
        ds = read_dataset(out)
        assert len(ds) == 0 and ds.index["count"] == 0

    def test_deterministic_bytes(self, tmp_path, small_config):
        a = generate_dataset(tmp_path / "a", small_config, count=3, seed=7)
        b = generate_dataset(tmp_path / "b", small_config, count=3, seed=7, threads=2)
        assert _files(a) == _files(b)

    def test_pgm_export(self, tmp_path, small_config):
        out = generate_dataset(tmp_path / "pgm", small_config, count=1, seed=0, pgm=True)
        assert (out / "samples" / "000000" / "noisy.pgm").read_bytes().startswith(b"P5\n32 32\n255\n")

    def test_missing_ground_truth(self, tmp_path, small_config):
        out = generate_dataset(tmp_path / "nogt", small_config, count=1, seed=0)
        (out / "samples" / "000000" / "gt.tensor").unlink()
        with pytest.raises(UsageError):
            read_dataset(out).gt(0)

    def test_not_a_dataset(self, tmp_path):
        with pytest.raises(ConfigError):
            read_dataset(tmp_path)

    def test_negative_count(self, tmp_path, small_config):
        with pytest.raises(ConfigError):
            generate_dataset(tmp_path / "neg", small_config, count=-1, seed=0)

    def test_config_round_trip(self):
        cfg = GenerationConfig.desk()
        assert GenerationConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()
