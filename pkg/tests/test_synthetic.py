"""Dataset-free fixtures."""

import csv

import numpy as np

from siren_elm.ingest import SIREN, URBAN, read_manifest
from siren_elm.synthetic import iter_clips, siren_clip, synthetic_dataset, urban_clip, write_fixture


class TestClips:
    def test_siren_clip_is_bounded_tonal_sweep(self):
        x = siren_clip(np.random.default_rng(0))
        assert x.shape == (220500,)
        assert np.abs(x).max() <= 0.9 + 1e-12
        power = np.abs(np.fft.rfft(x)) ** 2
        freqs = np.fft.rfftfreq(x.shape[0], 1 / 44100)
        band = (freqs >= 550) & (freqs <= 1550)
        assert power[band].sum() / power.sum() > 0.9

    def test_urban_clip_bounded(self):
        rng = np.random.default_rng(1)
        for _ in range(6):
            x = urban_clip(rng)
            assert x.shape == (220500,)
            assert np.abs(x).max() <= 0.9 + 1e-12

    def test_iter_clips_folds_and_labels(self):
        clips = list(iter_clips(n_siren=10, n_urban=15, seed=2))
        assert [c.label for c in clips] == [SIREN] * 10 + [URBAN] * 15
        assert [c.fold for c in clips[:10]] == [1, 2, 3, 4, 5] * 2
        assert clips[0].source == "synth-siren-000"

    def test_seeded(self):
        a = next(iter_clips(1, 0, seed=4)).samples
        b = next(iter_clips(1, 0, seed=4)).samples
        np.testing.assert_array_equal(a, b)


class TestFixtures:
    def test_synthetic_dataset_chunks_match(self):
        small = synthetic_dataset(3, 4, seed=1, chunk=2)
        whole = synthetic_dataset(3, 4, seed=1, chunk=100)
        np.testing.assert_array_equal(small.X, whole.X)
        assert small.sources == whole.sources
        assert small.counts() == {"urban": 4, "siren": 3}

    def test_write_fixture_layout(self, tmp_path):
        manifest = write_fixture(tmp_path, n_siren=2, n_urban=4, seed=0, n_excluded=2)
        with manifest.open() as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 8
        assert list(rows[0]) == ["filename", "fold", "target", "category", "esc10", "src_file", "take"]
        entries = read_manifest(manifest)
        assert [e.label for e in entries] == [SIREN, SIREN, URBAN, URBAN, URBAN, URBAN, None, None]
        assert len(list((tmp_path / "audio").glob("*.wav"))) == 6
