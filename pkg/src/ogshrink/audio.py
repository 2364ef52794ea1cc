"""Minimal 16-bit PCM WAV I/O on top of the stdlib wave module.

Samples map to [-1, 1) by dividing by 32768; writing clamps to the
representable range and truncates toward zero (no dither), so a
write-then-read round trip moves a sample by less than 2^-15.
"""

from __future__ import annotations

import wave
import warnings

import numpy as np

__all__ = ["read_wav", "write_wav"]


def read_wav(path):
    """Read a 16-bit PCM WAV file; returns (signal in [-1, 1), sample_rate).

    Mono only; stereo input is downmixed by averaging the channels with a
    warning. Anything other than 16-bit integer PCM is rejected.
    """
    try:
        with wave.open(str(path), "rb") as wf:
            nch = wf.getnchannels()
            width = wf.getsampwidth()
            comp = wf.getcomptype()
            rate = wf.getframerate()
            nframes = wf.getnframes()
            raw = wf.readframes(nframes)
    except (wave.Error, EOFError) as exc:
        raise ValueError(f"not a readable WAV file: {path} ({exc})") from exc
    if comp != "NONE":
        raise ValueError(f"compressed WAV ({comp}) is not supported: {path}")
    if width != 2:
        raise ValueError(
            f"only 16-bit PCM is supported, got {8 * width}-bit: {path}"
        )
    if nch not in (1, 2):
        raise ValueError(f"only mono or stereo WAV is supported, got {nch} channels")
    data = np.frombuffer(raw, dtype="<i2")
    if nch == 2:
        warnings.warn(f"downmixing stereo to mono by averaging: {path}",
                      stacklevel=2)
        data = data.reshape(-1, 2).mean(axis=1)
    return np.asarray(data, dtype=float) / 32768.0, rate


def write_wav(path, signal, sample_rate):
    """Write a mono 16-bit PCM WAV file.

    Values are scaled by 32768, clamped to the int16 range, and truncated
    toward zero.
    """
    arr = np.asarray(signal, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1D signal, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("signal contains non-finite values")
    rate = int(sample_rate)
    if rate < 1:
        raise ValueError("sample_rate must be a positive integer")
    pcm = np.trunc(np.clip(arr * 32768.0, -32768.0, 32767.0)).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(rate)
        wf.writeframes(pcm.tobytes())
