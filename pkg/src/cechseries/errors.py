"""Exception types shared across the package.

Exit-code contract used by the CLI: input problems map to 1, failed
verifications to 2, enumeration-budget overruns to 3.
"""


class CechSeriesError(Exception):
    """Base class for all package errors."""


class StructureError(CechSeriesError):
    """An algebraic structure violates its defining laws (bad table,
    non-normal subgroup, non-functorial restriction, ...)."""


class InputError(CechSeriesError):
    """A scenario file or CLI argument could not be interpreted."""


class ResourceLimitError(CechSeriesError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, message: str, estimate: int, budget: int):
        super().__init__(f"{message} (estimated {estimate} candidates, budget {budget})")
        self.estimate = estimate
        self.budget = budget


class CapabilityError(CechSeriesError):
    """The operation is not available for this representation
    (e.g. torsor enumeration over a substitution-only group)."""


class EngineInvariantError(CechSeriesError):
    """A verified theorem's implication failed on a bundled instance.

    This signals a bug in the engine, not a property of the instance;
    suites abort when they see one.
    """
