"""Exception types shared across the sampler modules."""


class DomainError(ValueError):
    """A density or gradient was requested where it is not defined.

    Raised when evaluating the gradient at a point of zero density, or when
    a leapfrog trial leaves the representable/supported region. Kernel-level
    callers map this to a log acceptance ratio of -inf instead of failing.
    """


class TerminationGuardError(RuntimeError):
    """The step-size search exceeded its doubling/halving cap.

    Almost-sure termination can fail on pathological inputs (zero momentum,
    flat plateaus); the guard turns those into a diagnosable failure instead
    of an unbounded loop. ``context`` accumulates call-site annotations as
    the error propagates (chain iteration, round index, ...).
    """

    def __init__(self, message: str, *, j: int, eps_init: float):
        super().__init__(message)
        self.j = j
        self.eps_init = eps_init
        self.context: list[str] = []
        self.partial_trace = None

    def add_context(self, note: str) -> None:
        self.context.append(note)

    def __str__(self) -> str:
        base = super().__str__()
        if self.context:
            return base + " [" + "; ".join(self.context) + "]"
        return base
