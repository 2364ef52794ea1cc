"""Monte-Carlo calibration of the residual noise fraction alpha.

Applying the group shrinkage denoiser to pure unit-variance noise leaves
a residual whose standard deviation, alpha(lambda, K, phi), measures how
aggressively a parameter choice suppresses noise. alpha is a decreasing
function of lambda for fixed group shape and penalty, and it scales: for
noise of std sigma, running with lambda = lambda_unit * sigma scales the
residual to alpha * sigma. That makes alpha a reusable, signal-free way
to pick lambda ("reduce the noise to 0.1% of its level") instead of
hand-tuning per input.

Estimates here exclude a border of width K-1 on each side so every
counted sample sees full group coverage, and they record the sample count
and seed so tables can be rebuilt bit-identically.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .ogs import OgsConfig, ogs_denoise, ogs_denoise_2d

CSV_FIELDS = ("kind", "beta", "iterations", "k1", "k2", "lambda", "alpha", "n_samples", "seed")

_MIN_RELIABLE_SAMPLES = 10_000


def _normalize_shape(shape):
    if isinstance(shape, (int, np.integer)):
        return 1, int(shape)
    k1, k2 = shape
    return int(k1), int(k2)


@dataclass(frozen=True)
class CalibrationEntry:
    """One measured (lambda, alpha) point and everything needed to redo it."""

    kind: str
    beta: float
    iterations: int
    k1: int
    k2: int
    lam: float
    alpha: float
    n_samples: int
    seed: int

    @property
    def series_key(self):
        return (self.kind, self.beta, self.iterations, self.k1, self.k2)


class CalibrationTable:
    """A set of calibration entries, queryable by log-alpha interpolation.

    Entries are grouped by (kind, beta, iterations, k1, k2); within each
    series alpha must be strictly decreasing as lambda increases, which is
    checked on construction (a non-monotone series means the Monte-Carlo
    sample was too small to trust).
    """

    def __init__(self, entries):
        self.entries = sorted(entries, key=lambda e: e.series_key + (e.lam,))
        for key, series in self._series().items():
            lams = [e.lam for e in series]
            alphas = [e.alpha for e in series]
            if any(b <= a for a, b in zip(lams, lams[1:])):
                raise ValueError(f"duplicate lambda in calibration series {key}")
            if any(b >= a for a, b in zip(alphas, alphas[1:])):
                raise ValueError(
                    f"alpha is not strictly decreasing in lambda for series {key}"
                )

    def _series(self):
        out = {}
        for e in self.entries:
            out.setdefault(e.series_key, []).append(e)
        return out

    def interpolate_lambda(self, target_alpha, shape, kind="atan", beta=1.0,
                           iterations=25) -> float:
        """lambda achieving ``target_alpha``, linear in lambda vs log(alpha)."""
        k1, k2 = _normalize_shape(shape)
        key = (kind, float(beta), int(iterations), k1, k2)
        series = self._series().get(key)
        if not series or len(series) < 2:
            raise ValueError(f"no calibration series with at least two rows for {key}")
        alphas = np.array([e.alpha for e in series])
        lams = np.array([e.lam for e in series])
        if not alphas[-1] <= target_alpha <= alphas[0]:
            raise ValueError(
                f"target alpha {target_alpha:g} outside tabulated range "
                f"[{alphas[-1]:g}, {alphas[0]:g}] for {key}"
            )
        i = int(np.searchsorted(-alphas, -target_alpha, side="right")) - 1
        i = min(max(i, 0), len(series) - 2)
        la, lb = math.log(alphas[i]), math.log(alphas[i + 1])
        t = (la - math.log(target_alpha)) / (la - lb)
        return float(lams[i] + t * (lams[i + 1] - lams[i]))

    def save(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_FIELDS)
            for e in self.entries:
                w.writerow([
                    e.kind, repr(e.beta), e.iterations, e.k1, e.k2,
                    repr(e.lam), repr(e.alpha), e.n_samples, e.seed,
                ])

    @classmethod
    def load(cls, path) -> "CalibrationTable":
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            header = tuple(next(r))
            if header != CSV_FIELDS:
                raise ValueError(f"unexpected calibration header {header!r}")
            entries = [
                CalibrationEntry(
                    kind=row[0], beta=float(row[1]), iterations=int(row[2]),
                    k1=int(row[3]), k2=int(row[4]), lam=float(row[5]),
                    alpha=float(row[6]), n_samples=int(row[7]), seed=int(row[8]),
                )
                for row in r
            ]
        return cls(entries)


def _noise(rng, shape, complex_data):
    if complex_data:
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return rng.standard_normal(shape)


def estimate_alpha(lam, shape, kind="atan", beta=1.0, iterations=25,
                   n_samples=1_000_000, seed=0, complex_data=False) -> float:
    """Estimate alpha(lambda, shape, penalty) on fresh unit-variance noise.

    Parameters
    ----------
    lam : float
        Regularization weight, in units of the (unit) noise std.
    shape : int or (int, int)
        Group length (1D) or box shape (2D).
    kind, beta : str, float
        Penalty kind and its concavity fraction; a = beta/(prod(shape)*lam).
    n_samples : int
        Interior samples entering the std (fewer than 10^4 warns).
    complex_data : bool
        Use circular complex noise of unit total variance instead of real
        noise; needed when calibrating for spectrogram denoising.
    """
    n_samples = int(n_samples)
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if n_samples < _MIN_RELIABLE_SAMPLES:
        warnings.warn(
            f"alpha estimated from only {n_samples} samples; expect large scatter",
            stacklevel=2,
        )
    k1, k2 = _normalize_shape(shape)
    rng = np.random.default_rng(seed)
    if k1 == 1:
        cfg = OgsConfig.from_beta(lam, k2, kind, beta, iterations=iterations)
        y = _noise(rng, n_samples + 2 * (k2 - 1), complex_data)
        est = ogs_denoise(y, cfg).estimate
        interior = est[k2 - 1 : k2 - 1 + n_samples] if k2 > 1 else est
    else:
        cfg = OgsConfig.from_beta(lam, (k1, k2), kind, beta, iterations=iterations)
        rows = min(512, max(k1, int(math.sqrt(n_samples))))
        cols = -(-n_samples // rows)
        y = _noise(rng, (rows + 2 * (k1 - 1), cols + 2 * (k2 - 1)), complex_data)
        est = ogs_denoise_2d(y, cfg).estimate
        interior = est[k1 - 1 : k1 - 1 + rows, k2 - 1 : k2 - 1 + cols]
    return float(np.std(interior))


def solve_lambda_for_alpha(target_alpha, shape, kind="atan", beta=1.0, iterations=25,
                           tolerance=0.05, n_samples=400_000, seed=0,
                           complex_data=False, table=None) -> float:
    """Find lambda with alpha(lambda) = target_alpha by bracketed bisection.

    Uses the monotonicity of alpha in lambda. Each probe draws fresh noise
    from a seed derived from ``seed``, so the whole search is
    deterministic. ``tolerance`` is relative on alpha; the search also
    stops once the bracket is tighter than the Monte-Carlo scatter could
    justify. A :class:`CalibrationTable` can seed the starting point.
    """
    target_alpha = float(target_alpha)
    if not 0.0 < target_alpha < 1.0:
        raise ValueError("target alpha must lie in (0, 1)")
    if tolerance <= 0.0:
        raise ValueError("tolerance must be positive")

    lam0 = 1.0
    if table is not None:
        try:
            lam0 = table.interpolate_lambda(target_alpha, shape, kind, beta, iterations)
        except ValueError:
            pass

    evals = [0]

    def probe(lam):
        evals[0] += 1
        return estimate_alpha(lam, shape, kind, beta, iterations,
                              n_samples=n_samples, seed=seed + 7919 * evals[0],
                              complex_data=complex_data)

    lam = lam0
    a = probe(lam)
    lo = hi = lam
    a_lo = a_hi = a
    expansions = 0
    while a_hi > target_alpha:
        hi *= 1.8
        a_hi = probe(hi)
        expansions += 1
        if expansions > 60:
            raise RuntimeError("failed to bracket target alpha from above")
    while a_lo < target_alpha:
        lo /= 1.8
        a_lo = probe(lo)
        expansions += 1
        if expansions > 120:
            raise RuntimeError("failed to bracket target alpha from below")

    for _ in range(40):
        if hi / lo < 1.002:
            break
        mid = math.sqrt(lo * hi)
        a_mid = probe(mid)
        if abs(math.log(a_mid / target_alpha)) <= math.log1p(tolerance):
            return mid
        if a_mid > target_alpha:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def build_table(lambdas, shape, kind="atan", beta=1.0, iterations=25,
                n_samples=1_000_000, seed=0, complex_data=False) -> CalibrationTable:
    """Measure alpha over a lambda grid and return the resulting table."""
    k1, k2 = _normalize_shape(shape)
    entries = []
    for i, lam in enumerate(sorted(float(v) for v in lambdas)):
        alpha = estimate_alpha(lam, (k1, k2), kind, beta, iterations,
                               n_samples=n_samples, seed=seed + i,
                               complex_data=complex_data)
        entries.append(CalibrationEntry(
            kind=kind, beta=float(beta), iterations=int(iterations), k1=k1, k2=k2,
            lam=float(lam), alpha=alpha, n_samples=int(n_samples), seed=seed + i,
        ))
    return CalibrationTable(entries)
