"""Exception hierarchy shared by all modules."""


class OnAssignError(Exception):
    pass


class InvalidInstance(OnAssignError, ValueError):
    pass


class InvalidDistribution(InvalidInstance):
    pass


class InvalidCertificate(OnAssignError, ValueError):
    pass


class InvalidParameter(OnAssignError, ValueError):
    pass


class InvalidInput(OnAssignError, ValueError):
    pass


class ResourceLimit(OnAssignError):
    """Instance too large for the exhaustive method that was requested."""


class NumericError(OnAssignError, ArithmeticError):
    pass


class InternalConsistencyError(OnAssignError, AssertionError):
    pass


class TrialFailed(OnAssignError):
    """A simulation trial raised; carries what is needed to replay it."""

    def __init__(self, trial: int, seed: int, cause: BaseException):
        super().__init__(f"trial {trial} (seed {seed}) failed: {type(cause).__name__}: {cause}")
        self.trial = trial
        self.seed = seed
        self.cause = cause
