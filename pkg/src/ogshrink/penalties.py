"""Sparsity penalties with unit slope at the origin.

Four even penalty functions phi(x; a): the absolute value and three
non-convex alternatives (logarithmic, arctangent, rational). All satisfy
phi(0) = 0, phi'(0+) = 1, are twice differentiable on (0, inf), concave
there, and maximally concave at the origin where phi''(0+) = -a. The
parameter ``a`` controls how fast the marginal penalty decays; ``a = 0``
recovers the absolute value (permitted for the abs and rational kinds).

Keeping ``a`` at or below 1/(group_cardinality * lambda) keeps the total
denoising cost strictly convex, which is what makes these penalties safe
to use in place of the L1 norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PENALTY_KINDS = ("abs", "log", "atan", "rat")

_SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class PenaltySpec:
    """A penalty kind plus its concavity parameter ``a``.

    Parameters
    ----------
    kind : str
        One of ``"abs"``, ``"log"``, ``"atan"``, ``"rat"``.
    a : float
        Non-negative concavity parameter. Must be strictly positive for
        the log and atan kinds (their definitions divide by ``a``); the
        abs kind ignores it.
    """

    kind: str
    a: float = 0.0

    def __post_init__(self):
        if self.kind not in PENALTY_KINDS:
            raise ValueError(f"unknown penalty kind {self.kind!r}, expected one of {PENALTY_KINDS}")
        a = float(self.a)
        if not np.isfinite(a) or a < 0.0:
            raise ValueError(f"penalty parameter a must be finite and >= 0, got {self.a!r}")
        if self.kind in ("log", "atan") and a == 0.0:
            raise ValueError(f"penalty kind {self.kind!r} requires a > 0")
        object.__setattr__(self, "a", a)


def _unwrap(x, arr):
    return float(arr) if np.ndim(x) == 0 else arr


def penalty_value(spec: PenaltySpec, x):
    """Evaluate phi(x; a) elementwise. Accepts scalars or arrays."""
    u = np.abs(np.asarray(x, dtype=float))
    a = spec.a
    if spec.kind == "abs" or a == 0.0:
        v = u
    elif spec.kind == "log":
        v = np.log1p(a * u) / a
    elif spec.kind == "atan":
        # exact rewrite of (2/(a*sqrt(3))) * (atan((1+2au)/sqrt(3)) - pi/6)
        # as a single arctangent; avoids cancellation for small a*u
        v = (2.0 / (a * _SQRT3)) * np.arctan(_SQRT3 * a * u / (2.0 + a * u))
    else:  # rat
        v = u / (1.0 + 0.5 * a * u)
    return _unwrap(x, v)


def penalty_deriv(spec: PenaltySpec, x):
    """Evaluate phi'(x; a) elementwise; undefined at x = 0.

    Odd function of x: sign(x) times a value in (0, 1].
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa == 0.0):
        raise ValueError("penalty derivative is undefined at x = 0")
    u = np.abs(xa)
    d = np.sign(xa) * _deriv_abs(spec, u)
    return _unwrap(x, d)


def _deriv_abs(spec: PenaltySpec, u):
    # phi'(u) for u > 0
    a = spec.a
    if spec.kind == "abs" or a == 0.0:
        return np.ones_like(u)
    t = a * u
    if spec.kind == "log":
        return 1.0 / (1.0 + t)
    if spec.kind == "atan":
        return 1.0 / (1.0 + t + t * t)
    return 1.0 / np.square(1.0 + 0.5 * t)


def penalty_second_deriv(spec: PenaltySpec, x):
    """Evaluate phi''(x; a) elementwise; undefined at x = 0. Even, <= 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa == 0.0):
        raise ValueError("penalty second derivative is undefined at x = 0")
    u = np.abs(xa)
    a = spec.a
    if spec.kind == "abs" or a == 0.0:
        s = np.zeros_like(u)
    elif spec.kind == "log":
        s = -a / np.square(1.0 + a * u)
    elif spec.kind == "atan":
        t = a * u
        s = -(a + 2.0 * a * t) / np.square(1.0 + t + t * t)
    else:  # rat
        s = -a / (1.0 + 0.5 * a * u) ** 3
    return _unwrap(x, s)


def penalty_weight(spec: PenaltySpec, u):
    """Evaluate phi'(u)/u for u > 0, the multiplicative-update weight.

    This is the quantity the group updates need at each group norm; it
    blows up like 1/u as u -> 0, which is why callers must keep u > 0.
    """
    ua = np.asarray(u, dtype=float)
    if np.any(ua <= 0.0):
        raise ValueError("penalty weight requires u > 0")
    return _unwrap(u, _deriv_abs(spec, ua) / ua)


def curvature_at_zero(spec: PenaltySpec) -> float:
    """phi''(0+): 0 for abs, -a otherwise."""
    if spec.kind == "abs":
        return 0.0
    return -spec.a


def max_convex_a(lam: float, group_cardinality: int) -> float:
    """Largest ``a`` keeping the denoising cost convex: 1/(cardinality * lambda)."""
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    if group_cardinality < 1:
        raise ValueError("group cardinality must be at least 1")
    return 1.0 / (group_cardinality * lam)


def is_strictly_convex(spec: PenaltySpec, lam: float, group_cardinality: int) -> bool:
    """True when phi''(0+) > -1/(cardinality * lambda), the sufficient bound.

    The boundary value a = 1/(cardinality * lambda) returns False here even
    though the overall cost is still strictly convex for the log, atan and
    rational kinds (their curvature strictly increases away from zero);
    constructors therefore accept the closed bound while this predicate
    keeps the strict inequality.
    """
    return curvature_at_zero(spec) > -max_convex_a(lam, group_cardinality)


def within_convex_bound(spec: PenaltySpec, lam: float, group_cardinality: int) -> bool:
    """Closed-bound variant: phi''(0+) >= -1/(cardinality * lambda)."""
    return curvature_at_zero(spec) >= -max_convex_a(lam, group_cardinality)
