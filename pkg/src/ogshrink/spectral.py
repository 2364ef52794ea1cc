"""STFT analysis/synthesis and the spectrogram-domain speech denoiser.

Frames are 32 ms with 50% overlap. The same square-root periodic Hann
window is used for analysis and synthesis; its square satisfies the
constant-overlap-add identity exactly at half-frame hop (sin^2 + cos^2),
so the round trip reconstructs the signal to float rounding. The signal
is padded by one hop in front and enough zeros at the tail that every
original sample is covered by exactly two frames.

denoise_speech runs the 2D group shrinkage over the complex half
spectrum with lambda rescaled by the per-coefficient noise std
sigma * ||w||_2 that time-domain AWGN of std sigma acquires under the
(unnormalized) windowed transform.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .ogs import OgsConfig, ogs_denoise_2d
from .penalties import PenaltySpec
from .signals import empirical_wiener_post

__all__ = [
    "SpectrogramPlan",
    "Spectrogram",
    "stft",
    "istft",
    "stft_noise_std",
    "denoise_speech",
]


def _sqrt_hann(frame_len):
    # periodic Hann under the square root: w(n)^2 = sin^2(pi n / L), so
    # w(n)^2 + w(n + L/2)^2 = 1 exactly at 50% overlap
    n = np.arange(frame_len)
    return np.abs(np.sin(np.pi * n / frame_len))


@dataclass(frozen=True, eq=False)
class SpectrogramPlan:
    """Frame length, hop, and the shared analysis/synthesis window.

    ``hop`` must equal ``frame_len // 2`` (50% overlap) and the squared
    window must satisfy constant overlap-add at that hop to 1e-12; both
    are checked at construction.
    """

    frame_len: int
    hop: int
    window: np.ndarray

    def __post_init__(self):
        fl = int(self.frame_len)
        if fl < 2 or fl % 2 != 0:
            raise ValueError("frame_len must be an even integer >= 2")
        if int(self.hop) * 2 != fl:
            raise ValueError("hop must be exactly frame_len / 2")
        object.__setattr__(self, "frame_len", fl)
        object.__setattr__(self, "hop", fl // 2)
        w = np.asarray(self.window, dtype=float)
        if w.shape != (fl,):
            raise ValueError(f"window must have shape ({fl},), got {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise ValueError("window must be finite and non-negative")
        w2 = w * w
        cola = w2[: fl // 2] + w2[fl // 2 :]
        if np.max(np.abs(cola - 1.0)) > 1e-12:
            raise ValueError("window^2 does not satisfy 50% constant overlap-add")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "window", w)

    @classmethod
    def for_rate(cls, sample_rate) -> "SpectrogramPlan":
        """32 ms frames at the given rate, rounded to an even sample count.

        512 samples at 16 kHz, 256 at 8 kHz.
        """
        fs = float(sample_rate)
        if not fs > 0.0:
            raise ValueError("sample_rate must be positive")
        fl = int(round(0.032 * fs))
        fl += fl % 2
        if fl < 2:
            raise ValueError(f"sample rate {sample_rate!r} gives an empty frame")
        return cls(frame_len=fl, hop=fl // 2, window=_sqrt_hann(fl))

    @property
    def bins(self) -> int:
        return self.frame_len // 2 + 1

    def n_frames(self, signal_len) -> int:
        """Frames needed so hop-front padding plus the signal is covered."""
        n = int(signal_len)
        if n < 1:
            raise ValueError("signal length must be at least 1")
        return -(-n // self.hop) + 1


@dataclass(eq=False)
class Spectrogram:
    """Half-spectrum STFT frames: ``data`` is bins x frames complex."""

    data: np.ndarray
    plan: SpectrogramPlan
    signal_len: int

    def __post_init__(self):
        d = np.asarray(self.data)
        if d.ndim != 2:
            raise ValueError("spectrogram data must be 2D (bins x frames)")
        if d.shape[0] != self.plan.bins:
            raise ValueError(
                f"expected {self.plan.bins} bins for frame_len "
                f"{self.plan.frame_len}, got {d.shape[0]}"
            )
        self.data = np.asarray(d, dtype=np.complex128)
        self.signal_len = int(self.signal_len)
        if self.signal_len < 1:
            raise ValueError("signal_len must be at least 1")
        if d.shape[1] != self.plan.n_frames(self.signal_len):
            raise ValueError(
                f"frame count {d.shape[1]} inconsistent with signal length "
                f"{self.signal_len} at hop {self.plan.hop}"
            )


def stft(s, plan: SpectrogramPlan) -> Spectrogram:
    """Windowed hop-advanced half-spectrum frames of a real signal.

    The signal is zero-padded by one hop in front and to a whole frame at
    the tail; the original length is recorded on the result so the
    inverse restores it exactly.
    """
    arr = np.asarray(s, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1D signal, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("input signal is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("input signal contains non-finite values")
    hop, fl = plan.hop, plan.frame_len
    nf = plan.n_frames(arr.size)
    padded = np.zeros((nf - 1) * hop + fl)
    padded[hop : hop + arr.size] = arr
    frames = np.lib.stride_tricks.sliding_window_view(padded, fl)[::hop]
    spec = np.fft.rfft(frames * plan.window, axis=1)
    return Spectrogram(spec.T.copy(), plan, arr.size)


def istft(sg: Spectrogram) -> np.ndarray:
    """Windowed overlap-add inverse; exact round trip with :func:`stft`.

    Each frame is inverted, windowed again, and overlap-added; the sum is
    divided by the accumulated squared window (identically 1 over the
    retained span) and the front/tail padding is sliced off.
    """
    plan = sg.plan
    hop, fl = plan.hop, plan.frame_len
    nf = sg.data.shape[1]
    frames = np.fft.irfft(sg.data.T, n=fl, axis=1) * plan.window
    total = (nf - 1) * hop + fl
    out = np.zeros(total)
    wsum = np.zeros(total)
    w2 = plan.window * plan.window
    for m in range(nf):
        out[m * hop : m * hop + fl] += frames[m]
        wsum[m * hop : m * hop + fl] += w2
    good = wsum > 1e-12
    out[good] /= wsum[good]
    return out[hop : hop + sg.signal_len]


def stft_noise_std(plan: SpectrogramPlan, sigma=1.0) -> float:
    """Per-coefficient complex noise std in the STFT of AWGN of std sigma.

    For time-domain white noise, E|X(k)|^2 = sigma^2 * ||w||^2 in every
    bin of the unnormalized windowed transform, so the complex
    coefficients behave like unit complex noise scaled by sigma * ||w||_2.
    """
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma < 0.0:
        raise ValueError("sigma must be finite and non-negative")
    return sigma * float(np.linalg.norm(plan.window))


def denoise_speech(s, sample_rate, cfg: OgsConfig, sigma, ewp: bool = False,
                   plan: SpectrogramPlan = None) -> np.ndarray:
    """Denoise a noisy speech-like signal through the STFT domain.

    Runs ``ogs_denoise_2d`` on the complex spectrogram with groups of
    ``cfg.group = (k1, k2)`` bins x frames. ``cfg.lam`` is the
    unit-noise-level weight (as produced by the calibration tables for
    complex data); it is rescaled to cfg.lam * sigma * ||w||_2 before
    shrinking, preserving the penalty's beta so the convexity margin
    carries over. ``sigma`` is the time-domain noise std; sigma = 0 takes
    the identity path (round trip only).

    With ``ewp=True`` the shrunk spectrogram serves as the pilot for
    empirical Wiener post-processing of the noisy coefficients before
    inversion; the shrinkage multiplier and the Wiener gain are both real
    and non-negative, so retained coefficients keep their phase either
    way.
    """
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma < 0.0:
        raise ValueError("sigma must be finite and non-negative")
    if not isinstance(cfg.group, tuple):
        raise ValueError("denoise_speech needs a 2D (k1, k2) group shape")
    if plan is None:
        plan = SpectrogramPlan.for_rate(sample_rate)
    sg = stft(s, plan)
    if sigma == 0.0:
        return istft(sg)
    sig_c = stft_noise_std(plan, sigma)
    lam = cfg.lam * sig_c
    if cfg.penalty.kind == "abs":
        pen = cfg.penalty
    else:
        beta = cfg.penalty.a * cfg.group_cardinality * cfg.lam
        pen = PenaltySpec(cfg.penalty.kind, beta / (cfg.group_cardinality * lam))
    cfg_stft = replace(cfg, lam=lam, penalty=pen)
    shrunk = ogs_denoise_2d(sg.data, cfg_stft).estimate
    if ewp:
        shrunk = empirical_wiener_post(sg.data, shrunk, sig_c)
    return istft(Spectrogram(shrunk, plan, sg.signal_len))
