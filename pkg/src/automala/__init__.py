"""Gradient-based MCMC with per-iteration automatic step-size selection.

The core transition is a Langevin/one-step-Hamiltonian proposal whose step
size is chosen anew at every iteration by a doubling/halving search on the
acceptance ratio, guarded by a reversibility check that keeps the invariant
distribution exact. Round-based tuning adapts the initial step size and a
diagonal preconditioner. Baseline MALA/ULA kernels, target densities with
exact samplers, effective-sample-size diagnostics, and a CLI experiment
harness round out the package.
"""

from .adaptation import (
    EtaDistribution,
    PRECONDITIONER_PRESETS,
    PreconditionerEstimate,
    RoundSchedule,
    TuningHistory,
    estimate_diag_variance,
    mix_preconditioner,
    run_round,
    run_rounds,
    sample_eta,
)
from .diagnostics import (
    ChainTrace,
    EssReport,
    ess_autocov,
    ess_batch_means,
    ess_known_moments,
    ks_statistic,
    leapfrogs_per_kiloess,
    min_ess,
)
from .errors import DomainError, TerminationGuardError
from .harness import RunConfig, cmd_run, main
from .kernels import StepResult, acceptance_ratio, automala_step, mala_step, ula_step
from .phase import (
    AugmentedState,
    DiagonalMass,
    joint_log_density,
    leapfrog,
    sample_momentum,
    sample_thresholds,
)
from .selector import (
    J_MAX_DEFAULT,
    StepSizeDecision,
    initial_direction,
    select_step_size,
    step_size_from_exponent,
)
from .targets import (
    KnownMargin,
    TargetDensity,
    grad_log_density,
    log_density,
    make_anisotropic_normal,
    make_banana,
    make_funnel,
    make_normal_iid,
    make_target,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentedState",
    "ChainTrace",
    "DiagonalMass",
    "DomainError",
    "EssReport",
    "EtaDistribution",
    "J_MAX_DEFAULT",
    "KnownMargin",
    "PRECONDITIONER_PRESETS",
    "PreconditionerEstimate",
    "RoundSchedule",
    "RunConfig",
    "StepResult",
    "StepSizeDecision",
    "TargetDensity",
    "TerminationGuardError",
    "TuningHistory",
    "acceptance_ratio",
    "automala_step",
    "cmd_run",
    "ess_autocov",
    "ess_batch_means",
    "ess_known_moments",
    "estimate_diag_variance",
    "grad_log_density",
    "initial_direction",
    "joint_log_density",
    "ks_statistic",
    "leapfrog",
    "leapfrogs_per_kiloess",
    "log_density",
    "main",
    "make_anisotropic_normal",
    "make_banana",
    "make_funnel",
    "make_normal_iid",
    "make_target",
    "mala_step",
    "min_ess",
    "mix_preconditioner",
    "run_round",
    "run_rounds",
    "sample_eta",
    "sample_momentum",
    "sample_thresholds",
    "select_step_size",
    "step_size_from_exponent",
    "ula_step",
]
