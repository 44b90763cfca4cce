"""Transition kernels: the auto-step transition plus MALA and ULA baselines.

One auto-step transition augments the state with a fresh momentum and
threshold pair, selects a step size forward, then re-runs the selection from
the proposal with the same thresholds. The move can only be accepted when
both searches return the same integer exponent; that check makes the
effective proposal an involution, so the usual accept/reject step preserves
the target exactly despite the per-iteration adaptation.

MALA is the same proposal at a fixed step size without the search, and ULA
is the unadjusted Langevin update. Per-iteration draw order is fixed
(momentum, thresholds, then the acceptance uniform) so traces are
bit-reproducible for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TerminationGuardError
from .phase import (
    AugmentedState,
    DiagonalMass,
    joint_log_density,
    leapfrog,
    sample_momentum,
    sample_thresholds,
)
from .selector import J_MAX_DEFAULT, select_step_size
from .targets import TargetDensity


@dataclass(frozen=True)
class StepResult:
    """Outcome of one adjusted or unadjusted transition.

    ``eps_t`` is the average of the forward and reverse selected step sizes
    and feeds the round-based tuning; ``alpha`` is the Metropolis-Hastings
    acceptance probability, computed every iteration regardless of which
    branch was taken. On rejection ``x_next`` is the previous position,
    bit for bit.
    """

    x_next: np.ndarray
    accepted: bool
    reversibility_ok: bool
    eps_forward: float
    eps_reverse: float
    j_forward: int
    j_reverse: int
    eps_t: float
    alpha: float
    n_leapfrog: int


def acceptance_ratio(
    target: TargetDensity,
    mass: DiagonalMass,
    s: AugmentedState,
    s_prime: AugmentedState,
) -> float:
    """min(1, joint density ratio of s' over s).

    The threshold-pair indicator cancels because both states share (a, b).
    A proposal of zero density yields 0.
    """
    log_joint = joint_log_density(target, mass, s.x, s.p)
    if not math.isfinite(log_joint):
        raise ValueError("acceptance ratio requires a current state of finite joint density")
    log_joint_prime = joint_log_density(target, mass, s_prime.x, s_prime.p)
    return math.exp(min(0.0, log_joint_prime - log_joint))


def automala_step(
    target: TargetDensity,
    mass: DiagonalMass,
    x: np.ndarray,
    eps_init: float,
    unadjusted: bool,
    rng: np.random.Generator,
    j_max: int = J_MAX_DEFAULT,
) -> StepResult:
    """One transition with automatic step-size selection.

    Samples momentum and thresholds, selects the step size forward, forms
    the leapfrog proposal, and re-selects from the proposal under the same
    thresholds. Accepts iff ``unadjusted`` or (the two integer exponents
    match and the acceptance uniform passes).
    """
    p = sample_momentum(mass, rng)
    a, b = sample_thresholds(rng)
    s = AugmentedState(x, p, a, b)
    try:
        fwd = select_step_size(target, mass, s, eps_init, j_max)
        s_prime = AugmentedState(fwd.x_prop, fwd.p_prop, a, b)
        rev = select_step_size(target, mass, s_prime, eps_init, j_max)
    except TerminationGuardError as err:
        err.add_context(f"transition from x={np.asarray(x).tolist()}")
        raise
    alpha = math.exp(min(0.0, fwd.log_joint_prop - fwd.log_joint_start))
    u = rng.random()
    reversibility_ok = fwd.j == rev.j
    if unadjusted or (reversibility_ok and u <= alpha):
        x_next = fwd.x_prop
        accepted = True
    else:
        x_next = x
        accepted = False
    return StepResult(
        x_next=x_next,
        accepted=accepted,
        reversibility_ok=reversibility_ok,
        eps_forward=fwd.eps,
        eps_reverse=rev.eps,
        j_forward=fwd.j,
        j_reverse=rev.j,
        eps_t=0.5 * (fwd.eps + rev.eps),
        alpha=alpha,
        n_leapfrog=fwd.n_leapfrog + rev.n_leapfrog,
    )


def mala_step(
    target: TargetDensity,
    mass: DiagonalMass,
    x: np.ndarray,
    eps: float,
    rng: np.random.Generator,
) -> StepResult:
    """One MALA transition at fixed step size ``eps``.

    Implemented as a single leapfrog proposal on the augmented space, which
    is the same move as the Langevin proposal with variance eps^2 * M^-1.
    """
    if not (eps > 0.0 and math.isfinite(eps)):
        raise ValueError(f"step size must be positive and finite, got {eps}")
    p = sample_momentum(mass, rng)
    log_joint = joint_log_density(target, mass, x, p)
    if not math.isfinite(log_joint):
        raise ValueError("mala_step requires a start of finite density")
    try:
        x_prop, p_prop = leapfrog(target, mass, x, p, eps)
        log_joint_prop = joint_log_density(target, mass, x_prop, p_prop)
    except DomainError:
        x_prop = None
        log_joint_prop = -math.inf
    alpha = math.exp(min(0.0, log_joint_prop - log_joint))
    u = rng.random()
    accepted = u <= alpha and x_prop is not None
    return StepResult(
        x_next=x_prop if accepted else x,
        accepted=accepted,
        reversibility_ok=True,
        eps_forward=eps,
        eps_reverse=eps,
        j_forward=0,
        j_reverse=0,
        eps_t=eps,
        alpha=alpha,
        n_leapfrog=1,
    )


def ula_step(
    target: TargetDensity,
    mass: DiagonalMass,
    x: np.ndarray,
    h: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """One unadjusted Langevin update: N(x + (h/2) C grad(x), h C), C = M^-1."""
    if not (h > 0.0 and math.isfinite(h)):
        raise ValueError(f"step size must be positive and finite, got {h}")
    g = np.asarray(target.gradient_fn(x), dtype=float)
    if not np.all(np.isfinite(g)):
        raise DomainError(f"gradient of {target.name!r} undefined at the current point")
    mean = x + (0.5 * h) * (mass.inv_mass * g)
    noise_std = math.sqrt(h) / mass.inv_sqrt_scale
    return mean + noise_std * rng.standard_normal(mass.dim)
