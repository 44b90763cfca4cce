"""Target densities with analytic gradients and exact samplers.

A target is an unnormalized differentiable log density on R^d. The built-in
families used by the experiment harness (funnel, banana, iid normal,
anisotropic normal) additionally carry an exact sampler and the moments/CDF
of one known marginal, which the diagnostics use to cross-check chains.

Built-in log densities include their normalizing constants so that golden
values are comparable across implementations; the samplers themselves only
ever use differences. User-defined targets go through the same
``TargetDensity`` record and must supply their own gradient.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.stats import norm

from .errors import DomainError

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class KnownMargin:
    """Known distribution of one coordinate of a target.

    ``index`` is 0-based; ``cdf`` accepts scalars or arrays.
    """

    index: int
    mean: float
    std: float
    cdf: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TargetDensity:
    """A differentiable unnormalized log density over R^d.

    ``log_density_fn`` maps a finite point to a float (-inf allowed, never
    NaN); ``gradient_fn`` maps a point of finite density to a finite R^d
    vector. ``exact_sampler``, when present, maps an RNG to one exact draw.
    Evaluation must be pure: concurrent chains share targets read-only.
    """

    dim: int
    log_density_fn: Callable[[np.ndarray], float]
    gradient_fn: Callable[[np.ndarray], np.ndarray]
    exact_sampler: Optional[Callable[[np.random.Generator], np.ndarray]] = None
    known_margin: Optional[KnownMargin] = None
    name: str = "custom"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"target dimension must be >= 1, got {self.dim}")


def _check_point(target: TargetDensity, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (target.dim,):
        raise ValueError(
            f"point has shape {x.shape}, expected ({target.dim},) for target {target.name!r}"
        )
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite coordinates")
    return x


def log_density(target: TargetDensity, x) -> float:
    """Evaluate log density at ``x`` (up to the target's fixed constant).

    Returns -inf outside the support; never NaN. Raises ValueError on a
    dimension mismatch or non-finite input coordinates.
    """
    x = _check_point(target, x)
    value = float(target.log_density_fn(x))
    if math.isnan(value):
        raise ValueError(f"target {target.name!r} returned NaN log density at {x!r}")
    return value


def grad_log_density(target: TargetDensity, x) -> np.ndarray:
    """Evaluate the gradient of the log density at ``x``.

    Raises DomainError when the gradient is undefined there (in particular
    anywhere the log density is -inf).
    """
    x = _check_point(target, x)
    g = np.asarray(target.gradient_fn(x), dtype=float)
    if g.shape != (target.dim,):
        raise ValueError(
            f"gradient has shape {g.shape}, expected ({target.dim},) for target {target.name!r}"
        )
    if not np.all(np.isfinite(g)):
        raise DomainError(
            f"gradient of {target.name!r} undefined at a point of zero density"
        )
    return g


def make_normal_iid(d: int) -> TargetDensity:
    """d-dimensional standard normal; every coordinate is a known margin."""
    if d < 1:
        raise ValueError(f"normal target requires d >= 1, got {d}")
    const = -0.5 * d * _LOG_2PI

    def logp(x: np.ndarray) -> float:
        return const - 0.5 * float(x @ x)

    def grad(x: np.ndarray) -> np.ndarray:
        return -x

    def sampler(rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(d)

    return TargetDensity(
        dim=d,
        log_density_fn=logp,
        gradient_fn=grad,
        exact_sampler=sampler,
        known_margin=KnownMargin(0, 0.0, 1.0, norm.cdf),
        name=f"normal({d})",
    )


def make_funnel(d: int, beta: float) -> TargetDensity:
    """Funnel: X1 ~ N(0, 9); X2..Xd | X1 iid N(0, exp(x1 / beta)).

    The conditional scale collapses as x1 decreases, so the local geometry
    varies over many orders of magnitude. The first coordinate is the known
    N(0, 9) margin.
    """
    if d < 2:
        raise ValueError(f"funnel target requires d >= 2, got {d}")
    if not beta > 0:
        raise ValueError(f"funnel scale must be positive, got {beta}")
    k = d - 1
    const_head = -0.5 * math.log(18.0 * math.pi)
    # exp() overflows above ~709.78; beyond that the conditional variance is
    # not representable and the density is numerically zero. The gradient
    # guard is tighter (590 + log 1e50 < 709) so the tail products below
    # stay inside the float range without overflow handling.
    _EXP_MAX = 709.0
    _GRAD_T_MAX = 590.0

    def logp(x: np.ndarray) -> float:
        x1 = float(x[0])
        rest = x[1:]
        s = float(rest @ rest)
        out = const_head - x1 * x1 / 18.0 - 0.5 * k * (_LOG_2PI + x1 / beta)
        if s > 0.0:
            # exp(log s - x1/beta) survives scales where exp(-x1/beta)
            # alone overflows; past the float range the density is zero.
            expo = math.log(s) - x1 / beta
            if expo > _EXP_MAX:
                return -math.inf
            out -= 0.5 * math.exp(expo)
        return out

    def grad(x: np.ndarray) -> np.ndarray:
        x1 = float(x[0])
        rest = x[1:]
        s = float(rest @ rest)
        g = np.empty_like(x)
        g0 = -x1 / 9.0 - 0.5 * k / beta
        t = -x1 / beta
        if t <= _GRAD_T_MAX and s <= 1e100:
            scale = math.exp(t)
            if s > 0.0:
                g0 += (0.5 / beta) * s * scale
            g[1:] = rest * (-scale)
        else:
            # Extreme conditional-scale regime: defined only on the ridge
            # where the tail coordinates vanish; off it, callers treat the
            # point as a domain event.
            if s == 0.0:
                g[1:] = 0.0
            else:
                g[1:] = math.inf
                g0 = math.inf
        g[0] = g0
        return g

    def sampler(rng: np.random.Generator) -> np.ndarray:
        x = np.empty(d)
        x[0] = 3.0 * rng.standard_normal()
        x[1:] = math.exp(0.5 * x[0] / beta) * rng.standard_normal(k)
        return x

    return TargetDensity(
        dim=d,
        log_density_fn=logp,
        gradient_fn=grad,
        exact_sampler=sampler,
        known_margin=KnownMargin(0, 0.0, 3.0, lambda v: norm.cdf(v, scale=3.0)),
        name=f"funnel({d},{beta:g})",
    )


def make_banana(d: int, beta: float) -> TargetDensity:
    """Banana: X1 ~ N(0, 10); X2..Xd | X1 iid N(x1^2, beta^2 / 10).

    The conditional mean follows the parabola x1^2, producing a curved
    ridge whose sharpness is controlled by ``beta``. The first coordinate
    is the known N(0, 10) margin.
    """
    if d < 2:
        raise ValueError(f"banana target requires d >= 2, got {d}")
    if not beta > 0:
        raise ValueError(f"banana scale must be positive, got {beta}")
    k = d - 1
    var_c = beta * beta / 10.0
    const = -0.5 * math.log(20.0 * math.pi) - 0.5 * k * math.log(2.0 * math.pi * var_c)

    def logp(x: np.ndarray) -> float:
        x1 = float(x[0])
        dev = x[1:] - x1 * x1
        return const - x1 * x1 / 20.0 - 0.5 * float(dev @ dev) / var_c

    def grad(x: np.ndarray) -> np.ndarray:
        x1 = float(x[0])
        dev = x[1:] - x1 * x1
        g = np.empty_like(x)
        g[0] = -x1 / 10.0 + 2.0 * x1 * float(np.sum(dev)) / var_c
        g[1:] = -dev / var_c
        return g

    def sampler(rng: np.random.Generator) -> np.ndarray:
        x = np.empty(d)
        x[0] = math.sqrt(10.0) * rng.standard_normal()
        x[1:] = x[0] * x[0] + math.sqrt(var_c) * rng.standard_normal(k)
        return x

    return TargetDensity(
        dim=d,
        log_density_fn=logp,
        gradient_fn=grad,
        exact_sampler=sampler,
        known_margin=KnownMargin(
            0, 0.0, math.sqrt(10.0), lambda v: norm.cdf(v, scale=math.sqrt(10.0))
        ),
        name=f"banana({d},{beta:g})",
    )


def make_anisotropic_normal(c: int) -> TargetDensity:
    """2-d zero-mean independent normal with standard deviations (10^-c, 10^c)."""
    if c < 0:
        raise ValueError(f"anisotropy exponent must be >= 0, got {c}")
    stds = np.array([10.0 ** (-c), 10.0 ** c])
    variances = stds * stds
    # The product of the two standard deviations is 1, so the normalizing
    # constant reduces to the isotropic one.
    const = -_LOG_2PI

    def logp(x: np.ndarray) -> float:
        return const - 0.5 * float(np.sum(x * x / variances))

    def grad(x: np.ndarray) -> np.ndarray:
        return -x / variances

    def sampler(rng: np.random.Generator) -> np.ndarray:
        return stds * rng.standard_normal(2)

    s0 = float(stds[0])
    return TargetDensity(
        dim=2,
        log_density_fn=logp,
        gradient_fn=grad,
        exact_sampler=sampler,
        known_margin=KnownMargin(0, 0.0, s0, lambda v: norm.cdf(v, scale=s0)),
        name=f"aniso({c})",
    )


_TARGET_SPEC_RE = re.compile(r"^\s*([a-zA-Z_]+)\s*\(([^)]*)\)\s*$")


def make_target(spec: str) -> TargetDensity:
    """Build a built-in target from a CLI spec string.

    Accepted forms: ``funnel(d,beta)``, ``banana(d,beta)``, ``normal(d)``,
    ``aniso(c)``.
    """
    m = _TARGET_SPEC_RE.match(spec)
    if not m:
        raise ValueError(
            f"cannot parse target spec {spec!r}; expected name(args), "
            "e.g. funnel(2,2) or normal(8)"
        )
    name = m.group(1).lower()
    args = [a.strip() for a in m.group(2).split(",") if a.strip()]

    def _int(s: str) -> int:
        try:
            return int(s)
        except ValueError:
            raise ValueError(f"expected an integer argument in {spec!r}, got {s!r}") from None

    def _float(s: str) -> float:
        try:
            return float(s)
        except ValueError:
            raise ValueError(f"expected a numeric argument in {spec!r}, got {s!r}") from None

    if name == "funnel":
        if len(args) != 2:
            raise ValueError(f"funnel takes (d, beta), got {spec!r}")
        return make_funnel(_int(args[0]), _float(args[1]))
    if name == "banana":
        if len(args) != 2:
            raise ValueError(f"banana takes (d, beta), got {spec!r}")
        return make_banana(_int(args[0]), _float(args[1]))
    if name == "normal":
        if len(args) != 1:
            raise ValueError(f"normal takes (d), got {spec!r}")
        return make_normal_iid(_int(args[0]))
    if name == "aniso":
        if len(args) != 1:
            raise ValueError(f"aniso takes (c), got {spec!r}")
        return make_anisotropic_normal(_int(args[0]))
    raise ValueError(
        f"unknown target family {name!r}; available: funnel, banana, normal, aniso"
    )
