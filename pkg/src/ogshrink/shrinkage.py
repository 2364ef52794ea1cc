"""Threshold operators induced by the penalties.

For the scalar problem G(x) = (y - x)^2 / 2 + lam * phi(x) the minimizer
theta(y) is a threshold rule: exactly zero for |y| <= lam, and for
|y| > lam the unique root of x + lam * phi'(x) = |y| on (0, |y|), with the
sign of y restored. With the non-convex penalties theta approaches the
identity for large |y| instead of staying a constant lam below it the way
the soft threshold does.

The group operator applies the same scalar rule to the Euclidean norm of
a vector and rescales, which is the exact minimizer for a single
(non-overlapping) group and also the building block the overlapping
solver is compared against in the degenerate cases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .penalties import (
    PenaltySpec,
    _deriv_abs,
    curvature_at_zero,
    max_convex_a,
    penalty_second_deriv,
)

_X_TOL = 1e-12


@dataclass(frozen=True)
class ThresholdProblem:
    """Threshold scale lambda plus the penalty defining the rule.

    Rejects parameterizations past the convexity bound (a > 1/lambda for
    the non-convex kinds); the boundary value itself is accepted.
    """

    lam: float
    penalty: PenaltySpec

    def __post_init__(self):
        lam = float(self.lam)
        if not np.isfinite(lam) or lam <= 0.0:
            raise ValueError(f"lambda must be finite and positive, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)
        if curvature_at_zero(self.penalty) < -max_convex_a(lam, 1):
            raise ValueError(
                f"penalty parameter a={self.penalty.a:g} exceeds the convexity bound "
                f"1/lambda={1.0 / lam:g}"
            )


def scalar_threshold(problem: ThresholdProblem, y: float) -> float:
    """Evaluate theta(y), the exact scalar denoiser for the problem.

    Zero for |y| <= lam; otherwise found by safeguarded Newton bisection
    on g(x) = x + lam * phi'(x) - |y| over the bracket [|y| - lam, |y|]
    (phi' <= 1 puts the root there), to 1e-12 absolute in x.
    """
    lam = problem.lam
    spec = problem.penalty
    ay = abs(float(y))
    if ay <= lam:
        return 0.0
    lo = ay - lam
    hi = ay
    x = lo
    for _ in range(200):
        g = x + lam * float(_deriv_abs(spec, np.float64(x))) - ay
        if g > 0.0:
            hi = x
        else:
            lo = x
        gp = 1.0 + lam * penalty_second_deriv(spec, x)
        if gp > 0.0:
            xn = x - g / gp
            if not lo < xn < hi:
                xn = 0.5 * (lo + hi)
        else:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= _X_TOL:
            x = xn
            break
        x = xn
    return x if y > 0 else -x


def group_threshold(problem: ThresholdProblem, y) -> np.ndarray:
    """Apply the threshold rule to the Euclidean norm of ``y``.

    Returns zeros when ||y||_2 <= lam, otherwise y scaled by
    theta(||y||_2) / ||y||_2. Complex input keeps its phase.
    """
    arr = np.asarray(y)
    if arr.size == 0:
        raise ValueError("group threshold needs a non-empty input")
    norm = float(np.linalg.norm(arr.ravel()))
    if norm <= problem.lam:
        return np.zeros_like(arr)
    rho = scalar_threshold(problem, norm)
    return arr * (rho / norm)


def slope_at_threshold(problem: ThresholdProblem) -> float:
    """theta'(lam+) = 1 / (1 + lam * phi''(0+)).

    Quantifies how abruptly the denoiser turns on; greater than 1 for the
    non-convex kinds (5.0 at lam=4, a=0.2). Raises when the slope is
    unbounded, i.e. a at the convexity boundary 1/lambda.
    """
    denom = 1.0 + problem.lam * curvature_at_zero(problem.penalty)
    if denom <= 0.0:
        raise ValueError(
            "threshold slope is unbounded: a is at or beyond the convexity bound 1/lambda"
        )
    return 1.0 / denom
