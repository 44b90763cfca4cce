"""Augmented phase space: momentum, thresholds, and the leapfrog-flip map.

The sampler works on states (x, p, a, b): position, momentum, and an ordered
pair of acceptance thresholds in (0, 1). Momenta are Gaussian with a diagonal
precision derived from the preconditioner; the proposal map is one leapfrog
step followed by a momentum flip, which makes it a volume-preserving
involution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .targets import TargetDensity


@dataclass(frozen=True)
class DiagonalMass:
    """Diagonal momentum scale: p_i ~ N(0, inv_sqrt_scale_i^2).

    ``inv_sqrt_scale`` holds the per-coordinate momentum standard deviation
    produced by the preconditioner mixing; ``inv_mass`` caches its inverse
    square, the diagonal of M^-1 used in the leapfrog drift.
    """

    inv_sqrt_scale: np.ndarray
    inv_mass: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.inv_sqrt_scale, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("inv_sqrt_scale must be a non-empty 1-d array")
        if not math.isfinite(float(arr.sum())) or float(arr.min()) <= 0.0:
            raise ValueError("inv_sqrt_scale entries must be positive and finite")
        object.__setattr__(self, "inv_sqrt_scale", arr)
        object.__setattr__(self, "inv_mass", 1.0 / (arr * arr))

    @classmethod
    def identity(cls, d: int) -> "DiagonalMass":
        return cls(np.ones(d))

    @property
    def dim(self) -> int:
        return self.inv_sqrt_scale.size


@dataclass(frozen=True)
class AugmentedState:
    """Position, momentum, and the shared threshold pair 0 < a < b < 1."""

    x: np.ndarray
    p: np.ndarray
    a: float
    b: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if x.shape != p.shape or x.ndim != 1:
            raise ValueError("x and p must be 1-d arrays of equal length")
        if not (math.isfinite(float(x.sum())) and math.isfinite(float(p.sum()))):
            raise ValueError("x and p must be finite")
        if not 0.0 < self.a < self.b < 1.0:
            raise ValueError(f"thresholds must satisfy 0 < a < b < 1, got ({self.a}, {self.b})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)


def sample_momentum(mass: DiagonalMass, rng: np.random.Generator) -> np.ndarray:
    """Draw p with independent N(0, inv_sqrt_scale_i^2) coordinates."""
    return mass.inv_sqrt_scale * rng.standard_normal(mass.dim)


def sample_thresholds(rng: np.random.Generator) -> tuple[float, float]:
    """Draw (a, b) as the order statistics of two independent uniforms."""
    while True:
        u = rng.random(2)
        a = float(min(u[0], u[1]))
        b = float(max(u[0], u[1]))
        # Exact ties or an exact 0 draw have probability ~2^-53; redraw so
        # 0 < a < b < 1 holds unconditionally.
        if 0.0 < a < b < 1.0:
            return a, b


def leapfrog(
    target: TargetDensity,
    mass: DiagonalMass,
    x: np.ndarray,
    p: np.ndarray,
    eps: float,
) -> tuple[np.ndarray, np.ndarray]:
    """One leapfrog step of size ``eps`` followed by the momentum flip.

        p_half = p + (eps/2) grad(x)
        x'     = x + eps M^-1 p_half
        p'     = -(p_half + (eps/2) grad(x'))

    Raises DomainError when the step leaves the region where the gradient is
    defined; callers treat such a trial as having acceptance ratio -inf.
    """
    g1 = target.gradient_fn(x)
    p_half = p + (0.5 * eps) * g1
    x_new = x + eps * (mass.inv_mass * p_half)
    # A sum is finite iff no entry is inf/nan (inf - inf gives nan), so each
    # check is one pass; a non-finite start gradient propagates into x_new.
    if not math.isfinite(float(x_new.sum())):
        raise DomainError(f"leapfrog from {target.name!r} left the representable region")
    g2 = target.gradient_fn(x_new)
    p_new = -(p_half + (0.5 * eps) * g2)
    if not math.isfinite(float(p_new.sum())):
        raise DomainError(f"gradient of {target.name!r} undefined at the proposal point")
    return x_new, p_new


def joint_log_density(
    target: TargetDensity, mass: DiagonalMass, x: np.ndarray, p: np.ndarray
) -> float:
    """Joint log density of (x, p) up to constants: target(x) - p^T M^-1 p / 2.

    The Gaussian normalizing constant of the momentum and the threshold
    indicator are omitted: both are fixed within one transition, so they
    cancel in every ratio the kernels take. Differences of this quantity are
    therefore invariant to the target's additive constant as well.
    """
    # Extreme trial momenta can overflow the quadratic form; the sum is a
    # product of matching signs so it lands at +inf (never NaN), which maps
    # the state to zero joint density.
    with np.errstate(over="ignore"):
        quad = 0.5 * float(p @ (mass.inv_mass * p))
    logp = float(target.log_density_fn(x))
    if logp == -math.inf:
        return -math.inf
    return logp - quad
