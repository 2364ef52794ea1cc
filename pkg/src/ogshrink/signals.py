"""Synthetic test signals, SNR metrics, and scalar-threshold baselines.

Everything here is deterministic under an explicit seed. The attenuation
helpers at the bottom give the closed-form output noise std of soft and
hard thresholding applied to unit Gaussian noise, used to put the
thresholding baselines on the same noise-target footing as the group
shrinkage calibration tables.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

__all__ = [
    "gen_group_sparse",
    "add_awgn",
    "snr_db",
    "scalar_threshold_denoise",
    "empirical_wiener_post",
    "estimate_sigma_mad",
    "soft_threshold_attenuation",
    "hard_threshold_attenuation",
    "attenuation_threshold",
]

_PLACEMENT_TRIES = 500


def gen_group_sparse(n=100, n_groups=2, group_len_range=(10, 20),
                     amplitude_range=(1.0, 5.0), seed=0):
    """Zero signal with ``n_groups`` disjoint smooth bursts.

    Each burst is a Hann-shaped lump (interior samples of a Hann window,
    so every sample in the run is nonzero) with a random peak amplitude
    drawn from ``amplitude_range`` and a random sign. Runs are separated
    by at least one zero so the support splits into exactly ``n_groups``
    maximal runs whose lengths fall in ``group_len_range``.

    Raises ValueError if the requested bursts cannot be placed after a
    bounded number of attempts.
    """
    n = int(n)
    n_groups = int(n_groups)
    if n < 1:
        raise ValueError("n must be at least 1")
    if n_groups < 0:
        raise ValueError("n_groups must be non-negative")
    lo, hi = (int(group_len_range[0]), int(group_len_range[1]))
    if not 1 <= lo <= hi:
        raise ValueError(f"bad group_len_range {group_len_range!r}")
    alo, ahi = (float(amplitude_range[0]), float(amplitude_range[1]))
    if not 0.0 < alo <= ahi:
        raise ValueError(f"bad amplitude_range {amplitude_range!r}")

    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    taken = np.zeros(n, dtype=bool)
    for _ in range(n_groups):
        for attempt in range(_PLACEMENT_TRIES):
            length = int(rng.integers(lo, hi + 1))
            if length > n:
                continue
            start = int(rng.integers(0, n - length + 1))
            # pad the collision check by one sample each side so separate
            # bursts never fuse into a longer run
            a = max(0, start - 1)
            b = min(n, start + length + 1)
            if not taken[a:b].any():
                break
        else:
            raise ValueError(
                f"could not place {n_groups} disjoint bursts of length "
                f"{lo}..{hi} in a signal of length {n}"
            )
        env = np.hanning(length + 2)[1:-1]
        amp = rng.uniform(alo, ahi)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        x[start:start + length] = sign * amp * env
        taken[start:start + length] = True
    return x


def add_awgn(x, sigma=None, target_snr_db=None, seed=0):
    """Add white Gaussian noise; returns (noisy, sigma_used).

    Give either ``sigma`` directly or ``target_snr_db``, in which case
    sigma = ||x|| / sqrt(n * 10^(SNR/10)) so the expected sample SNR hits
    the target. Target mode needs a nonzero signal.
    """
    arr = np.asarray(x, dtype=float)
    if (sigma is None) == (target_snr_db is None):
        raise ValueError("give exactly one of sigma and target_snr_db")
    if sigma is not None:
        sigma = float(sigma)
        if not np.isfinite(sigma) or sigma < 0.0:
            raise ValueError("sigma must be finite and non-negative")
    else:
        nrm = float(np.linalg.norm(arr.ravel()))
        if nrm == 0.0:
            raise ValueError("target-SNR mode needs a nonzero signal")
        sigma = nrm / math.sqrt(arr.size * 10.0 ** (float(target_snr_db) / 10.0))
    rng = np.random.default_rng(seed)
    return arr + sigma * rng.standard_normal(arr.shape), sigma


def snr_db(reference, estimate):
    """10 log10(||x||^2 / ||x - xhat||^2); inf when the estimate is exact."""
    ref = np.asarray(reference, dtype=float)
    est = np.asarray(estimate, dtype=float)
    if ref.shape != est.shape:
        raise ValueError("reference and estimate shapes differ")
    p_ref = float(np.sum(ref * ref))
    if p_ref == 0.0:
        raise ValueError("reference signal is zero")
    d = ref - est
    p_err = float(np.sum(d * d))
    if p_err == 0.0:
        return math.inf
    return 10.0 * math.log10(p_ref / p_err)


def scalar_threshold_denoise(y, threshold, mode="soft"):
    """Elementwise soft or hard thresholding at level ``threshold`` >= 0.

    Complex input is thresholded on magnitude with the phase kept, the
    usual convention for spectrogram coefficients.
    """
    t = float(threshold)
    if t < 0.0:
        raise ValueError("threshold must be non-negative")
    if mode not in ("soft", "hard"):
        raise ValueError(f"mode must be 'soft' or 'hard', got {mode!r}")
    arr = np.asarray(y)
    if not np.iscomplexobj(arr):
        arr = arr.astype(float)
    mag = np.abs(arr)
    if mode == "hard":
        return np.where(mag > t, arr, 0.0)
    scale = np.zeros_like(mag)
    np.divide(np.maximum(mag - t, 0.0), mag, out=scale, where=mag > 0.0)
    return arr * scale


def empirical_wiener_post(noisy, pilot, sigma):
    """Rescale noisy coefficients by |pilot|^2 / (|pilot|^2 + sigma^2).

    ``sigma`` is the per-coefficient noise std in whatever domain the
    arrays live in (complex std for complex coefficients). A zero pilot
    coefficient zeroes the output; a pilot far above the noise passes the
    noisy value through, so the post-processing undoes the amplitude bias
    of shrinkage where the pilot says there is signal.
    """
    s = float(sigma)
    if not np.isfinite(s) or s <= 0.0:
        raise ValueError("sigma must be finite and positive")
    na = np.asarray(noisy)
    pa = np.asarray(pilot)
    if na.shape != pa.shape:
        raise ValueError("noisy and pilot shapes differ")
    p2 = (pa * pa.conj()).real if np.iscomplexobj(pa) else pa * pa
    return na * (p2 / (p2 + s * s))


def estimate_sigma_mad(y):
    """Noise std estimate: median absolute deviation / 0.6745.

    Complex input is split into its real and imaginary parts (each part
    carries the per-part noise std). Needs at least 256 samples for the
    median to be worth anything; a constant input returns 0 with a
    warning since the MAD degenerates.
    """
    arr = np.asarray(y)
    if np.iscomplexobj(arr):
        arr = np.concatenate([arr.real.ravel(), arr.imag.ravel()])
    else:
        arr = np.asarray(arr, dtype=float).ravel()
    if arr.size < 256:
        raise ValueError(f"need at least 256 samples, got {arr.size}")
    med = float(np.median(arr))
    mad = float(np.median(np.abs(arr - med)))
    if mad == 0.0:
        warnings.warn("MAD is zero (constant input); returning sigma = 0",
                      stacklevel=2)
        return 0.0
    return mad / 0.6745


def _phi(t):
    return math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)


def _upper_tail(t):
    return 0.5 * math.erfc(t / math.sqrt(2.0))


def soft_threshold_attenuation(t):
    """Output std of soft thresholding at T applied to unit Gaussian noise.

    E[soft(X, T)^2] = 2 * ((1 + T^2) * Q(T) - T * phi(T)) for X ~ N(0, 1),
    from integrating (x - T)^2 against the normal density over [T, inf).
    """
    t = float(t)
    if t < 0.0:
        raise ValueError("threshold must be non-negative")
    val = 2.0 * ((1.0 + t * t) * _upper_tail(t) - t * _phi(t))
    return math.sqrt(max(val, 0.0))


def hard_threshold_attenuation(t):
    """Output std of hard thresholding at T applied to unit Gaussian noise.

    E[hard(X, T)^2] = 2 * (Q(T) + T * phi(T)).
    """
    t = float(t)
    if t < 0.0:
        raise ValueError("threshold must be non-negative")
    return math.sqrt(2.0 * (_upper_tail(t) + t * _phi(t)))


def attenuation_threshold(alpha, mode="soft"):
    """Threshold T such that thresholding unit noise leaves std ``alpha``.

    Inverts the attenuation curves by bisection; both are strictly
    decreasing from 1 at T = 0. ``alpha`` must lie in (0, 1).
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    fn = soft_threshold_attenuation if mode == "soft" else hard_threshold_attenuation
    if mode not in ("soft", "hard"):
        raise ValueError(f"mode must be 'soft' or 'hard', got {mode!r}")
    lo, hi = 0.0, 1.0
    while fn(hi) > alpha:
        hi *= 2.0
        if hi > 64.0:
            raise ValueError(f"no threshold reaches attenuation {alpha:g}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if fn(mid) > alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)
