"""Exception types shared across the pipeline."""


class PlanrecError(Exception):
    """Base class for all library errors."""


class ParseError(PlanrecError):
    """Malformed SQL. Carries the character offset of the offending token."""

    def __init__(self, position, message):
        self.position = position
        self.message = message
        super().__init__(f"parse error at position {position}: {message}")


class UnsupportedStatement(PlanrecError):
    """The statement is valid SQL but not a SELECT we handle."""


class EmptyQuery(PlanrecError):
    """A query produced no tokens."""


class TaskError(PlanrecError):
    """A user map/reduce function raised inside the engine."""

    def __init__(self, partition, cause, job_index=None):
        self.partition = partition
        self.cause = cause
        self.job_index = job_index
        where = f"partition {partition}"
        if job_index is not None:
            where = f"job {job_index}, {where}"
        super().__init__(f"task failed ({where}): {cause!r}")


class SpillIOError(PlanrecError):
    """Writing or reading shuffle spill files failed."""


class ZeroVector(PlanrecError):
    """A feature vector has zero norm."""


class MissingPair(PlanrecError):
    """A similarity entry required for the distance matrix is absent."""

    def __init__(self, q1, q2):
        self.q1 = q1
        self.q2 = q2
        super().__init__(f"no similarity entry for pair ({q1}, {q2})")


class EmptyInput(PlanrecError):
    """An operation received zero data points."""


class InsufficientData(PlanrecError):
    """Too few queries to build a plan store."""


class DuplicateId(PlanrecError):
    """A query id collides with one already stored."""


class ChecksumMismatch(PlanrecError):
    """A workspace file does not match its manifest checksum."""


class VersionMismatch(PlanrecError):
    """A workspace was written by an incompatible format version."""


class FeaturizeError(PlanrecError):
    """Every query in a batch failed to parse.

    ``failures`` maps query id to the exception raised for it.
    """

    def __init__(self, failures):
        self.failures = failures
        super().__init__(f"all {len(failures)} queries failed to parse")
