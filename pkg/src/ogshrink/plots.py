"""Figure rendering for the CLI report paths.

Forces the Agg backend so figures render headless; every function writes
a PNG to the given path and returns that path.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

__all__ = [
    "save_denoise_overlay",
    "save_spectrogram_pair",
    "save_alpha_curve",
    "save_sure_curve",
    "save_benchmark_bars",
]

_DPI = 130


def save_denoise_overlay(path, noisy, denoised, clean=None):
    """Noisy and denoised traces on one axis, optional clean reference."""
    fig, ax = plt.subplots(figsize=(9, 3.2))
    n = np.asarray(noisy, dtype=float)
    ax.plot(n, color="0.75", lw=0.8, label="noisy")
    if clean is not None:
        ax.plot(np.asarray(clean, dtype=float), "k--", lw=0.9, label="clean")
    ax.plot(np.asarray(denoised, dtype=float), color="C0", lw=1.2,
            label="denoised")
    ax.set_xlabel("sample")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def _log_mag(x):
    m = np.abs(np.asarray(x))
    floor = m.max() * 1e-5 if m.max() > 0 else 1.0
    return 20.0 * np.log10(np.maximum(m, floor))


def save_spectrogram_pair(path, before, after, sample_rate=None, hop=None):
    """Log-magnitude images of two spectrograms on a shared color scale."""
    b = _log_mag(before)
    a = _log_mag(after)
    vmax = max(b.max(), a.max())
    vmin = vmax - 80.0
    extent = None
    if sample_rate is not None and hop is not None:
        nf = b.shape[1]
        extent = (0.0, nf * hop / float(sample_rate), 0.0, sample_rate / 2.0)
    fig, axes = plt.subplots(2, 1, figsize=(9, 6), sharex=True, sharey=True)
    for ax, img, name in ((axes[0], b, "input"), (axes[1], a, "denoised")):
        im = ax.imshow(img, origin="lower", aspect="auto", vmin=vmin,
                       vmax=vmax, extent=extent, cmap="magma")
        ax.set_ylabel("Hz" if extent else "bin")
        ax.set_title(name, fontsize=9)
    axes[1].set_xlabel("s" if extent else "frame")
    fig.colorbar(im, ax=axes, label="dB", shrink=0.9)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def save_alpha_curve(path, lambdas, alphas, target=None):
    """Noise attenuation versus lambda on a semilog-y axis."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(np.asarray(lambdas, dtype=float),
                np.asarray(alphas, dtype=float), "o-", ms=4)
    if target is not None:
        ax.axhline(float(target), color="0.6", ls="--", lw=0.9)
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"output noise std $\alpha$")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def save_sure_curve(path, lambdas, estimates, best_lambda=None):
    """Estimated risk versus lambda; the selected lambda gets a marker."""
    lam = np.asarray(lambdas, dtype=float)
    est = np.asarray(estimates, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(lam, est, "o-", ms=4)
    if best_lambda is not None:
        ax.axvline(float(best_lambda), color="C3", ls="--", lw=0.9,
                   label=f"selected {best_lambda:.4g}")
        ax.legend(fontsize=8)
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel("estimated risk")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def save_benchmark_bars(path, mean_snrs):
    """Mean output SNR per method as a labeled bar chart."""
    names = list(mean_snrs.keys())
    vals = [float(mean_snrs[m]) for m in names]
    fig, ax = plt.subplots(figsize=(6, 4))
    bars = ax.bar(names, vals, color="C0")
    ax.bar_label(bars, fmt="%.2f", fontsize=8)
    ax.set_ylabel("mean output SNR (dB)")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)
