"""Exception types raised across the package."""


class QpomdpError(Exception):
    """Base class for all package errors."""


class CyclicGraph(QpomdpError):
    """The parent structure of a network contains a directed cycle."""


class CptShapeMismatch(QpomdpError):
    """A conditional table's shape disagrees with the variable/parent cardinalities."""


class CptNotNormalized(QpomdpError):
    """A conditional table row is negative or deviates from sum 1 beyond tolerance."""


class JointTooLarge(QpomdpError):
    """The joint assignment space exceeds the configured enumeration limit."""


class ZeroEvidenceProbability(QpomdpError):
    """Conditioning on evidence that has probability zero."""


class RejectionBudgetExceeded(QpomdpError):
    """The rejection sampler hit its attempt cap (evidence effectively impossible)."""


class NotNormalized(QpomdpError):
    """A probability pair does not sum to one."""


class NonBinaryVariable(QpomdpError):
    """Gate-level encoding requested for a network with a non-binary variable."""


class DimensionMismatch(QpomdpError):
    """Amplitude vectors of different dimensions were combined."""


class InvalidProbability(QpomdpError):
    """A probability argument lies outside (0, 1]."""


class UnknownAction(QpomdpError):
    """Action identifier not present in the decision process."""


class ImpossibleObservation(QpomdpError):
    """Belief update conditioned on an observation with probability zero."""


class DegenerateSizes(QpomdpError):
    """Space sizes make a budget formula singular beyond its removable limits."""


class UnattainableEpsilon(QpomdpError):
    """No sample count can reach the requested error at the given horizon."""


class InvalidSigma(QpomdpError):
    """Concentration-bound failure probability outside (0, 2)."""


class EmptyAcceptanceSet(QpomdpError):
    """Complexity summary requested for a ledger with no recorded acceptance probabilities."""


class ModelFormatError(QpomdpError):
    """Model text-format parse error, carrying the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
