"""Exception hierarchy shared by all subpackages."""


class TropsandError(Exception):
    pass


class InputError(TropsandError, ValueError):
    """Bad user input: malformed points, duplicates, out-of-range parameters."""


class InvalidSeriesError(InputError):
    """The monomial set does not describe a valid unit-square tropical series."""


class BoundaryPointError(InputError):
    """A point that must lie in the open unit square does not."""


class InternalConsistencyError(TropsandError, RuntimeError):
    """An invariant that the algorithms guarantee was found violated."""


class NonTerminationError(TropsandError, RuntimeError):
    """The sweep did not reach a fixpoint within the pass budget.

    ``partial`` holds the series reached so far and ``trace`` the diagnostics.
    """

    def __init__(self, message, partial=None, trace=None):
        super().__init__(message)
        self.partial = partial
        self.trace = trace


class OracleFailure(TropsandError, RuntimeError):
    """The brute-force oracle found no feasible series within its search window."""
