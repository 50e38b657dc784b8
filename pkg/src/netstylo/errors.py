"""Exception and warning types shared across the package."""


class NetstyloError(Exception):
    """Base class for all package errors."""


class ParseError(NetstyloError):
    """A structured input file is malformed.  Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingLemmaResource(NetstyloError):
    """A lemma dictionary or lexicon file could not be found."""


class EmptySeries(NetstyloError):
    """Not enough data to form a series (book shorter than one window, or < 2 partitions)."""


class NoFeasibleW(NetstyloError):
    """No window size in the grid satisfies the node-count constraint."""


class CliqueBudgetExceeded(NetstyloError):
    """Maximal-clique enumeration exceeded the configured cap."""


class SeriesTooShort(NetstyloError):
    """Series is shorter than the minimum a stationarity test requires."""


class DegenerateSeries(NetstyloError):
    """Series has zero variance; autocorrelation/stationarity are undefined."""


class SingularRegression(NetstyloError):
    """Design matrix of a test regression is rank-deficient."""


class IncompleteBook(NetstyloError):
    """A book is missing moment vectors for one or more metrics."""

    def __init__(self, book, missing):
        self.book = book
        self.missing = list(missing)
        super().__init__(f"book {book} missing metrics: {', '.join(self.missing)}")


class DisconnectedNeighborGraph(NetstyloError):
    """The k-NN graph fell apart into several components (and bridging was off)."""

    def __init__(self, components):
        self.components = [sorted(c) for c in components]
        super().__init__(
            f"neighbor graph has {len(self.components)} components: {self.components}"
        )


class TooFewInstances(NetstyloError):
    """A class has too few instances for stratified cross-validation."""


class RankDeficientWarning(UserWarning):
    """Requested more components than the numerical rank of the data."""


class ConstantColumnWarning(UserWarning):
    """A feature column is constant and carries no information."""
