"""Round-based tuning of the initial step size and diagonal preconditioner.

Round r runs 2^r transitions with a frozen initial step size and variance
estimate; at the round boundary the initial step size is refreshed to the
mean of the per-iteration averaged step sizes, and the preconditioner to the
per-coordinate sample standard deviations of the round's path. Within a
round only the mixing weight eta is redrawn each iteration: the momentum
scale interpolates between the estimated inverse standard deviations (eta=1)
and the identity (eta=0), with eta drawn from a zero-one-inflated Beta so
that both endpoints and the interior all occur.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import ChainTrace
from .errors import TerminationGuardError
from .kernels import automala_step
from .phase import DiagonalMass
from .selector import J_MAX_DEFAULT
from .targets import TargetDensity

VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class EtaDistribution:
    """Zero-one-inflated Beta: Bernoulli(p) with probability m, else Beta(a, b)."""

    alpha: float = 1.0
    beta: float = 1.0
    p: float = 0.5
    m: float = 2.0 / 3.0

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError("Beta shape parameters must be positive")
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.m <= 1.0):
            raise ValueError("p and m must lie in [0, 1]")


# Named presets: "single" always uses the estimated preconditioner, "smooth"
# only interior mixing weights, "mixture" gives the endpoints and the
# interior probability 1/3 each, and "identity" disables preconditioning.
PRECONDITIONER_PRESETS: dict[str, EtaDistribution] = {
    "single": EtaDistribution(1.0, 1.0, 1.0, 1.0),
    "smooth": EtaDistribution(1.0, 1.0, 1.0, 0.0),
    "mixture": EtaDistribution(1.0, 1.0, 0.5, 2.0 / 3.0),
    "identity": EtaDistribution(1.0, 1.0, 0.0, 1.0),
}


@dataclass(frozen=True)
class RoundSchedule:
    """Number of tuning rounds and unadjusted burn-in steps per round."""

    n_rounds: int
    t_unadj: int = 1

    def __post_init__(self):
        if self.n_rounds < 1:
            raise ValueError(f"schedule needs at least one round, got {self.n_rounds}")
        if self.t_unadj < 0:
            raise ValueError(f"t_unadj must be non-negative, got {self.t_unadj}")
        if self.t_unadj > 2:
            raise ValueError(
                f"t_unadj={self.t_unadj} exceeds the first round's 2 iterations"
            )

    def round_length(self, r: int) -> int:
        return 2 ** r


@dataclass(frozen=True)
class PreconditionerEstimate:
    """Per-coordinate standard deviations backing the momentum scale."""

    diag_std: np.ndarray
    source_round: int = 0

    def __post_init__(self):
        arr = np.asarray(self.diag_std, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("diag_std must be a non-empty 1-d array")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
            raise ValueError("diag_std entries must be positive and finite")
        object.__setattr__(self, "diag_std", arr)

    @classmethod
    def identity(cls, d: int) -> "PreconditionerEstimate":
        return cls(np.ones(d), source_round=0)


@dataclass(frozen=True)
class RoundRecord:
    """Tuning state used by one round and the refreshed values it produced."""

    round: int
    n_iterations: int
    eps_init: float
    eps_init_next: float
    diag_std: np.ndarray
    diag_std_next: np.ndarray
    n_leapfrog: int
    accept_rate: float
    mean_alpha: float


@dataclass
class TuningHistory:
    rounds: list[RoundRecord] = field(default_factory=list)

    @property
    def n_leapfrog_total(self) -> int:
        return sum(rec.n_leapfrog for rec in self.rounds)

    def eps_init_by_round(self) -> list[float]:
        return [rec.eps_init for rec in self.rounds]


def sample_eta(
    rng: np.random.Generator,
    alpha_tilde: float = 1.0,
    beta_tilde: float = 1.0,
    p: float = 0.5,
    m: float = 2.0 / 3.0,
) -> float:
    """Draw the preconditioner mixing weight from the zero-one-inflated Beta."""
    if not (alpha_tilde > 0.0 and beta_tilde > 0.0):
        raise ValueError("Beta shape parameters must be positive")
    if not (0.0 <= p <= 1.0 and 0.0 <= m <= 1.0):
        raise ValueError("p and m must lie in [0, 1]")
    if rng.random() < m:
        return 1.0 if rng.random() < p else 0.0
    return float(rng.beta(alpha_tilde, beta_tilde))


def mix_preconditioner(estimate: PreconditionerEstimate, eta: float) -> DiagonalMass:
    """Momentum scale eta / diag_std + (1 - eta), per coordinate."""
    if not (0.0 <= eta <= 1.0) or not math.isfinite(eta):
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    return DiagonalMass(eta / estimate.diag_std + (1.0 - eta))


def estimate_diag_variance(positions) -> np.ndarray:
    """Per-coordinate unbiased sample variance of a position sequence."""
    arr = np.atleast_2d(np.asarray(positions, dtype=float))
    if arr.shape[0] < 2:
        raise ValueError("variance estimation needs at least 2 positions")
    return arr.var(axis=0, ddof=1)


def _floored_std(variances: np.ndarray, round_index: int) -> np.ndarray:
    floored = np.maximum(variances, VARIANCE_FLOOR)
    if np.any(variances < VARIANCE_FLOOR):
        warnings.warn(
            f"round {round_index}: degenerate sample variance floored at {VARIANCE_FLOOR}",
            RuntimeWarning,
            stacklevel=3,
        )
    return np.sqrt(floored)


def run_round(
    target: TargetDensity,
    x0,
    n_iterations: int,
    eps_init: float,
    estimate: PreconditionerEstimate,
    t_unadj: int = 1,
    rng: np.random.Generator = None,
    eta_dist: EtaDistribution = PRECONDITIONER_PRESETS["mixture"],
    j_max: int = J_MAX_DEFAULT,
) -> tuple[ChainTrace, float]:
    """Run one tuning round and return its trace and the refreshed step size.

    Iterations up to ``t_unadj`` skip the reversibility check and rejection.
    Each iteration redraws eta and rebuilds the momentum scale; ``eps_init``
    and ``estimate`` stay frozen for the whole round. The refreshed step
    size is the mean over iterations of (forward + reverse) / 2.

    If the step-size search trips its termination guard, the round aborts
    and the partial trace is attached to the raised error.
    """
    if n_iterations < 1:
        raise ValueError(f"a round needs at least one iteration, got {n_iterations}")
    if rng is None:
        raise ValueError("run_round requires an explicit seeded Generator")
    x = np.array(x0, dtype=float)
    d = target.dim
    positions = np.empty((n_iterations, d))
    eps_t = np.empty(n_iterations)
    accepted = np.empty(n_iterations, dtype=bool)
    reversibility = np.empty(n_iterations, dtype=bool)
    alpha = np.empty(n_iterations)
    n_leapfrog = np.empty(n_iterations, dtype=np.int64)
    params = (eta_dist.alpha, eta_dist.beta, eta_dist.p, eta_dist.m)
    for t in range(1, n_iterations + 1):
        eta = sample_eta(rng, *params)
        mass = mix_preconditioner(estimate, eta)
        try:
            result = automala_step(
                target, mass, x, eps_init, unadjusted=(t <= t_unadj), rng=rng, j_max=j_max
            )
        except TerminationGuardError as err:
            err.add_context(f"round iteration {t}/{n_iterations}")
            err.partial_trace = ChainTrace(
                positions[: t - 1].copy(),
                eps_t[: t - 1].copy(),
                accepted[: t - 1].copy(),
                reversibility[: t - 1].copy(),
                alpha[: t - 1].copy(),
                n_leapfrog[: t - 1].copy(),
            )
            raise
        x = result.x_next
        i = t - 1
        positions[i] = x
        eps_t[i] = result.eps_t
        accepted[i] = result.accepted
        reversibility[i] = result.reversibility_ok
        alpha[i] = result.alpha
        n_leapfrog[i] = result.n_leapfrog
    trace = ChainTrace(positions, eps_t, accepted, reversibility, alpha, n_leapfrog)
    return trace, float(eps_t.mean())


def run_rounds(
    target: TargetDensity,
    x0,
    schedule: RoundSchedule,
    rng: np.random.Generator,
    eta_dist: EtaDistribution = PRECONDITIONER_PRESETS["mixture"],
    j_max: int = J_MAX_DEFAULT,
) -> tuple[ChainTrace, TuningHistory]:
    """Run the full doubling schedule and return the final round's trace.

    Round 1 starts at step size 1 with the identity preconditioner; each
    boundary refreshes the step size, restarts from the last state, and
    re-estimates the per-coordinate standard deviations (floored when a
    coordinate's sample variance degenerates). Intermediate rounds are
    summarized in the returned history, not kept as samples.
    """
    eps_init = 1.0
    estimate = PreconditionerEstimate.identity(target.dim)
    x = np.array(x0, dtype=float)
    history = TuningHistory()
    trace = None
    for r in range(1, schedule.n_rounds + 1):
        n_iter = schedule.round_length(r)
        trace, eps_next = run_round(
            target,
            x,
            n_iter,
            eps_init,
            estimate,
            t_unadj=schedule.t_unadj,
            rng=rng,
            eta_dist=eta_dist,
            j_max=j_max,
        )
        diag_std_next = _floored_std(estimate_diag_variance(trace.positions), r)
        history.rounds.append(
            RoundRecord(
                round=r,
                n_iterations=n_iter,
                eps_init=eps_init,
                eps_init_next=eps_next,
                diag_std=estimate.diag_std.copy(),
                diag_std_next=diag_std_next,
                n_leapfrog=trace.n_leapfrog_total,
                accept_rate=float(trace.accepted.mean()),
                mean_alpha=float(trace.alpha.mean()),
            )
        )
        eps_init = eps_next
        x = trace.positions[-1].copy()
        estimate = PreconditionerEstimate(diag_std_next, source_round=r)
    return trace, history
