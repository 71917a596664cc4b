"""WAV decoding, clip standardization, manifest parsing and dataset loading."""

import csv
import logging
import struct

import numpy as np
import pytest

from conftest import float32, pcm16, wav_bytes
from siren_elm.errors import (
    EmptyInputError,
    FormatError,
    IngestionError,
    ManifestError,
    RateMismatchError,
    UnsupportedCodecError,
)
from siren_elm.ingest import (
    SAMPLE_RATE,
    SIREN,
    URBAN,
    AudioClip,
    WavData,
    category_label,
    decode_wav,
    decode_wav_bytes,
    fix_length,
    load_dataset,
    normalize_category,
    read_manifest,
    standardize,
    to_mono,
    write_wav,
)


class TestDecodeWav:
    def test_pcm16_scaling(self):
        wav = decode_wav_bytes(wav_bytes(pcm16([32767, 0, -32768])))
        assert wav.sample_rate == 44100
        assert wav.channels == 1
        np.testing.assert_allclose(wav.samples[0], [32767 / 32768, 0.0, -1.0])
        assert wav.samples[0, 1] == 0.0

    def test_stereo_is_deinterleaved(self):
        wav = decode_wav_bytes(wav_bytes(pcm16([16384, -16384, 8192, 0]), channels=2))
        assert wav.samples.shape == (2, 2)
        np.testing.assert_allclose(wav.samples[0], [0.5, 0.25])
        np.testing.assert_allclose(wav.samples[1], [-0.5, 0.0])

    def test_float32(self):
        wav = decode_wav_bytes(wav_bytes(float32([0.25, -0.75, 1.5]), format_tag=3, bits=32))
        np.testing.assert_allclose(wav.samples[0], [0.25, -0.75, 1.0])

    def test_extensible_pcm(self):
        raw = wav_bytes(pcm16([16384]), format_tag=0xFFFE, extensible_tag=1)
        np.testing.assert_allclose(decode_wav_bytes(raw).samples[0], [0.5])

    def test_odd_chunk_before_fmt_is_padded(self):
        extra = b"LIST" + struct.pack("<I", 3) + b"abc" + b"\x00"
        wav = decode_wav_bytes(wav_bytes(pcm16([100, 200]), extra_chunks=extra))
        np.testing.assert_allclose(wav.samples[0], [100 / 32768, 200 / 32768])

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"format_tag": 7, "bits": 8},  # mu-law
            {"format_tag": 2, "bits": 8},  # ADPCM
            {"format_tag": 1, "bits": 24},
            {"format_tag": 3, "bits": 64},
        ],
    )
    def test_unsupported_codecs(self, kwargs):
        with pytest.raises(UnsupportedCodecError):
            decode_wav_bytes(wav_bytes(b"\x00" * 24, **kwargs))

    def test_unsupported_codec_is_a_format_error(self):
        with pytest.raises(FormatError):
            decode_wav_bytes(wav_bytes(b"\x00" * 4, format_tag=7, bits=8))

    def test_not_riff(self):
        with pytest.raises(FormatError, match="RIFF"):
            decode_wav_bytes(b"OggS" + b"\x00" * 40)

    def test_truncated_data_chunk(self):
        raw = wav_bytes(pcm16(np.zeros(100)))
        with pytest.raises(FormatError, match="truncated"):
            decode_wav_bytes(raw[:-10])

    def test_missing_fmt(self):
        raw = b"RIFF" + struct.pack("<I", 12) + b"WAVE" + b"data" + struct.pack("<I", 0)
        with pytest.raises(FormatError, match="fmt"):
            decode_wav_bytes(raw)

    def test_data_chunk_before_fmt(self):
        payload = pcm16([100, -200, 300])
        fmt_body = struct.pack("<HHIIHH", 1, 1, 44100, 88200, 2, 16)
        chunks = b"data" + struct.pack("<I", len(payload)) + payload
        chunks += b"fmt " + struct.pack("<I", len(fmt_body)) + fmt_body
        raw = b"RIFF" + struct.pack("<I", 4 + len(chunks)) + b"WAVE" + chunks
        wav = decode_wav_bytes(raw)
        assert wav.sample_rate == 44100 and wav.channels == 1
        np.testing.assert_allclose(wav.samples[0], [100 / 32768, -200 / 32768, 300 / 32768])

    def test_partial_frame(self):
        with pytest.raises(FormatError, match="whole number"):
            decode_wav_bytes(wav_bytes(pcm16([1, 2, 3]), channels=2))

    def test_file_roundtrip_and_missing_file(self, tmp_path):
        samples = np.linspace(-0.5, 0.5, 441)
        path = tmp_path / "a.wav"
        write_wav(path, samples, 44100)
        wav = decode_wav(path)
        np.testing.assert_allclose(wav.samples[0], samples, atol=1 / 32768)
        with pytest.raises(IngestionError, match="missing.wav"):
            decode_wav(tmp_path / "missing.wav")


class TestStandardize:
    def test_to_mono(self):
        np.testing.assert_allclose(to_mono([[0.5, -0.5]]), [0.5, -0.5])
        np.testing.assert_allclose(to_mono([[1.0], [-1.0]]), [0.0])
        np.testing.assert_allclose(to_mono([[0.2, 0.4], [0.6, 0.0]]), [0.4, 0.2])

    def test_to_mono_empty(self):
        with pytest.raises(EmptyInputError):
            to_mono(np.zeros((0, 10)))

    def test_fix_length(self):
        full = np.ones(220500)
        np.testing.assert_array_equal(fix_length(full, 44100), full)
        padded = fix_length(np.ones(1000), 44100)
        assert padded.shape == (220500,)
        assert padded[:1000].sum() == 1000 and not padded[1000:].any()
        assert fix_length(np.ones(300000), 44100).shape == (220500,)
        assert fix_length(np.ones(10), 8000, 0.001).shape == (8,)

    def test_fix_length_errors(self):
        with pytest.raises(EmptyInputError):
            fix_length([], 44100)
        with pytest.raises(FormatError):
            fix_length([0.1], 0)

    def test_standardize(self):
        wav = WavData(samples=np.full((2, 100), 0.5), sample_rate=44100, channels=2)
        out = standardize(wav)
        assert out.shape == (220500,)
        assert out[:100].tolist() == [0.5] * 100


class TestAudioClip:
    def test_valid_clip_is_read_only(self):
        clip = AudioClip(np.zeros(220500), SAMPLE_RATE, SIREN, 1, "x.wav")
        assert clip.duration == 5.0
        with pytest.raises(ValueError):
            clip.samples[0] = 1.0

    @pytest.mark.parametrize(
        "samples, fold, label, exc",
        [
            (np.zeros(1000), 1, 0, FormatError),
            (np.full(220500, 1.5), 1, 0, FormatError),
            (np.zeros(220500), 6, 0, ManifestError),
            (np.zeros(220500), 1, 2, ManifestError),
        ],
    )
    def test_invalid_clips(self, samples, fold, label, exc):
        with pytest.raises(exc):
            AudioClip(samples, SAMPLE_RATE, label, fold, "bad.wav")


class TestManifest:
    def test_category_names(self):
        assert normalize_category("  Car horn ") == "car_horn"
        assert normalize_category("crying-baby") == "crying_baby"
        assert category_label("Siren") == SIREN
        assert category_label("car_horn") == URBAN
        assert category_label("Hand saw") == URBAN
        assert category_label("dog") is None

    def _write(self, path, header, rows):
        with path.open("w", newline="") as f:
            w = csv.writer(f)
            w.writerow(header)
            w.writerows(rows)
        return path

    def test_read_manifest_ignores_extra_columns(self, tmp_path):
        path = self._write(
            tmp_path / "m.csv",
            ["Filename", "Fold", "target", "Category"],
            [["a.wav", "1", "42", "siren"], ["b.wav", "3", "0", "dog"]],
        )
        entries = read_manifest(path)
        assert [(e.filename, e.fold, e.label) for e in entries] == [("a.wav", 1, SIREN), ("b.wav", 3, None)]

    def test_unknown_layout(self, tmp_path):
        path = self._write(tmp_path / "m.csv", ["file", "split", "class"], [["a.wav", "1", "siren"]])
        with pytest.raises(ManifestError, match="required columns"):
            read_manifest(path)

    def test_bad_fold(self, tmp_path):
        path = self._write(tmp_path / "m.csv", ["filename", "fold", "category"], [["a.wav", "x", "siren"]])
        with pytest.raises(ManifestError, match="fold"):
            read_manifest(path)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(ManifestError):
            read_manifest(tmp_path / "nope.csv")


class TestLoadDataset:
    def test_loads_fixture(self, fixture_tree, caplog):
        caplog.set_level(logging.WARNING, logger="siren_elm")
        ds = load_dataset(fixture_tree / "meta" / "esc50.csv", fixture_tree / "audio", threads=2)
        assert len(ds) == 40
        assert ds.excluded == 3
        assert ds.manifest_rows == 43
        assert ds.counts == {SIREN: 10, URBAN: 30}
        assert all(c.samples.shape == (220500,) for c in ds)
        assert [c.label for c in ds] == [SIREN] * 10 + [URBAN] * 30
        assert ds.duration_hours == pytest.approx(40 * 5 / 3600)
        assert "excluded 3" in caplog.text

    def test_rate_mismatch(self, tmp_path):
        audio = tmp_path / "audio"
        audio.mkdir()
        write_wav(audio / "s.wav", np.zeros(22050 * 5), 22050)
        manifest = tmp_path / "m.csv"
        manifest.write_text("filename,fold,category\ns.wav,1,siren\n")
        with pytest.raises(RateMismatchError, match="s.wav"):
            load_dataset(manifest, audio)

    def test_missing_audio_names_file(self, tmp_path):
        audio = tmp_path / "audio"
        audio.mkdir()
        manifest = tmp_path / "m.csv"
        manifest.write_text("filename,fold,category\ngone.wav,2,rain\n")
        with pytest.raises(IngestionError, match="gone.wav") as info:
            load_dataset(manifest, audio)
        assert info.value.path.endswith("gone.wav")

    def test_corrupt_audio_becomes_ingestion_error(self, tmp_path):
        audio = tmp_path / "audio"
        audio.mkdir()
        (audio / "c.wav").write_bytes(b"garbage")
        manifest = tmp_path / "m.csv"
        manifest.write_text("filename,fold,category\nc.wav,2,rain\n")
        with pytest.raises(IngestionError, match="c.wav"):
            load_dataset(manifest, audio)

    def test_empty_data_chunk_names_file(self, tmp_path):
        audio = tmp_path / "audio"
        audio.mkdir()
        (audio / "empty.wav").write_bytes(wav_bytes(b""))
        manifest = tmp_path / "m.csv"
        manifest.write_text("filename,fold,category\nempty.wav,3,siren\n")
        with pytest.raises(IngestionError, match="empty.wav") as info:
            load_dataset(manifest, audio)
        assert info.value.path.endswith("empty.wav")
        assert isinstance(info.value.__cause__, EmptyInputError)

    def test_short_clip_is_padded(self, tmp_path):
        audio = tmp_path / "audio"
        audio.mkdir()
        write_wav(audio / "short.wav", np.full(1000, 0.25), SAMPLE_RATE)
        manifest = tmp_path / "m.csv"
        manifest.write_text("filename,fold,category\nshort.wav,4,engine\n")
        ds = load_dataset(manifest, audio)
        assert ds[0].samples.shape == (220500,)
        assert ds[0].fold == 4 and ds[0].label == URBAN
