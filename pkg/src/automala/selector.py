"""Per-iteration step-size search on the power-of-two ladder.

Starting from an initial guess, the selector evaluates the joint-density
ratio of a single leapfrog trial and then doubles or halves the step size
until the ratio crosses the state's threshold pair. Doubling runs overshoot
by construction and return the step one halving back; that asymmetry is what
lets the reverse search reproduce the same integer exponent. All decisions
operate on the exponent ``j`` so that ``eps = eps_init * 2**j`` is exact in
binary floating point and the reversibility comparison is integer-valued.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TerminationGuardError
from .phase import AugmentedState, DiagonalMass, joint_log_density, leapfrog
from .targets import TargetDensity

J_MAX_DEFAULT = 60


@dataclass(frozen=True)
class StepSizeDecision:
    """Outcome of one step-size search.

    ``eps == eps_init * 2**j`` exactly; ``n_leapfrog`` counts the leapfrog
    trials consumed (1 when the initial ratio already fell between the
    thresholds). The leapfrog image of the start state at the selected step
    size is cached (``x_prop``, ``p_prop``, ``log_joint_prop``) so callers
    never re-integrate it.
    """

    eps: float
    j: int
    n_leapfrog: int
    x_prop: np.ndarray
    p_prop: np.ndarray
    log_joint_prop: float
    log_joint_start: float


def initial_direction(ell: float, a: float, b: float) -> int:
    """Direction of the search: +1 to double, -1 to halve, 0 to keep.

    ``ell`` is the log joint-density ratio of the trial at the initial step
    size; -inf yields -1.
    """
    if not 0.0 < a < b < 1.0:
        raise ValueError(f"thresholds must satisfy 0 < a < b < 1, got ({a}, {b})")
    if ell >= math.log(b):
        return 1
    if ell <= math.log(a):
        return -1
    return 0


def step_size_from_exponent(eps_init: float, j: int, j_max: int = J_MAX_DEFAULT) -> float:
    """``eps_init * 2**j`` by exponent manipulation (exact in binary floats)."""
    if abs(j) > j_max:
        raise TerminationGuardError(
            f"step-size exponent {j} exceeds the cap {j_max}", j=j, eps_init=eps_init
        )
    try:
        eps = math.ldexp(eps_init, j)
    except OverflowError:
        eps = math.inf
    if eps == 0.0 or math.isinf(eps):
        raise TerminationGuardError(
            f"step size {eps_init} * 2**{j} left the representable range",
            j=j,
            eps_init=eps_init,
        )
    return eps


def select_step_size(
    target: TargetDensity,
    mass: DiagonalMass,
    state: AugmentedState,
    eps_init: float,
    j_max: int = J_MAX_DEFAULT,
) -> StepSizeDecision:
    """Run the doubling/halving search from ``state`` at guess ``eps_init``.

    The joint density of the start state is evaluated once; every trial is a
    single leapfrog from that same start. A trial that raises DomainError is
    treated as having ratio -inf. Raises TerminationGuardError if more than
    ``j_max`` net doublings or halvings are attempted.
    """
    if not (eps_init > 0.0 and math.isfinite(eps_init)):
        raise ValueError(f"eps_init must be positive and finite, got {eps_init}")
    log_joint_start = joint_log_density(target, mass, state.x, state.p)
    if not math.isfinite(log_joint_start):
        raise ValueError("step-size search requires a start state of finite joint density")
    log_a = math.log(state.a)
    log_b = math.log(state.b)

    def trial(eps: float):
        try:
            x_new, p_new = leapfrog(target, mass, state.x, state.p, eps)
        except DomainError:
            return None, None, -math.inf
        return x_new, p_new, joint_log_density(target, mass, x_new, p_new)

    x_new, p_new, log_joint = trial(eps_init)
    n_leapfrog = 1
    ell = log_joint - log_joint_start
    delta = initial_direction(ell, state.a, state.b)
    if delta == 0:
        return StepSizeDecision(
            eps_init, 0, n_leapfrog, x_new, p_new, log_joint, log_joint_start
        )

    j = 0
    # Holds the most recent trial whose ratio was still >= log(b); only the
    # doubling branch reads it, and delta = +1 guarantees it starts valid.
    prev = (x_new, p_new, log_joint)
    while True:
        j += delta
        if abs(j) > j_max:
            raise TerminationGuardError(
                f"step-size search exceeded {j_max} doublings/halvings "
                f"(eps_init={eps_init}, direction={delta})",
                j=j,
                eps_init=eps_init,
            )
        try:
            eps = math.ldexp(eps_init, j)
        except OverflowError:
            eps = math.inf
        if eps == 0.0 or math.isinf(eps):
            raise TerminationGuardError(
                f"step size {eps_init} * 2**{j} left the representable range",
                j=j,
                eps_init=eps_init,
            )
        x_new, p_new, log_joint = trial(eps)
        n_leapfrog += 1
        ell = log_joint - log_joint_start
        if delta == 1:
            if ell < log_b:
                # Overshot: return the step one halving back, whose trial is
                # the one cached in ``prev``.
                x_b, p_b, log_joint_b = prev
                return StepSizeDecision(
                    math.ldexp(eps_init, j - 1),
                    j - 1,
                    n_leapfrog,
                    x_b,
                    p_b,
                    log_joint_b,
                    log_joint_start,
                )
            prev = (x_new, p_new, log_joint)
        else:
            if ell > log_a:
                return StepSizeDecision(
                    eps, j, n_leapfrog, x_new, p_new, log_joint, log_joint_start
                )
