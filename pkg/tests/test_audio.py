"""16-bit PCM WAV reading and writing."""

import struct
import warnings
import wave

import numpy as np
import pytest

from ogshrink.audio import read_wav, write_wav


def test_round_trip_quantization(tmp_path):
    rng = np.random.default_rng(0)
    s = np.clip(rng.standard_normal(5000) * 0.25, -0.999, 0.999)
    p = tmp_path / "rt.wav"
    write_wav(p, s, 16000)
    r, fs = read_wav(p)
    assert fs == 16000
    assert r.shape == s.shape
    assert np.max(np.abs(r - s)) <= 2.0 ** -15


def test_sample_rates_preserved(tmp_path):
    for fs in (8000, 16000, 44100):
        p = tmp_path / f"sr{fs}.wav"
        write_wav(p, np.zeros(100), fs)
        _, got = read_wav(p)
        assert got == fs


def test_write_clips_out_of_range(tmp_path):
    p = tmp_path / "clip.wav"
    write_wav(p, np.array([2.0, -2.0, 0.0]), 8000)
    r, _ = read_wav(p)
    assert abs(r[0] - (32767 / 32768.0)) < 1e-9
    assert r[1] == -1.0
    assert r[2] == 0.0


def test_stereo_downmix_warns(tmp_path):
    p = tmp_path / "st.wav"
    left = (np.arange(50) * 100).astype("<i2")
    right = np.full(50, 1000, dtype="<i2")
    inter = np.empty(100, dtype="<i2")
    inter[0::2] = left
    inter[1::2] = right
    with wave.open(str(p), "wb") as w:
        w.setnchannels(2)
        w.setsampwidth(2)
        w.setframerate(16000)
        w.writeframes(inter.tobytes())
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        r, fs = read_wav(p)
    assert len(rec) == 1
    assert fs == 16000
    expect = (left.astype(float) + right.astype(float)) / 2.0 / 32768.0
    assert np.max(np.abs(r - expect)) < 1e-9


def test_rejects_non_16bit(tmp_path):
    p = tmp_path / "b8.wav"
    with wave.open(str(p), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(1)
        w.setframerate(8000)
        w.writeframes(bytes(100))
    with pytest.raises(ValueError):
        read_wav(p)


def test_rejects_garbage_file(tmp_path):
    p = tmp_path / "junk.wav"
    p.write_bytes(struct.pack("<4sI4s", b"RIFF", 4, b"XXXX"))
    with pytest.raises(ValueError):
        read_wav(p)


def test_write_validation(tmp_path):
    p = tmp_path / "v.wav"
    with pytest.raises(ValueError):
        write_wav(p, np.ones((2, 2)), 8000)
    with pytest.raises(ValueError):
        write_wav(p, np.array([np.nan]), 8000)
    with pytest.raises(ValueError):
        write_wav(p, np.ones(4), 0)
