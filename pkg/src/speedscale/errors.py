"""Exceptions raised by Speedscale."""


class SpeedScaleError(Exception):
    """Base class for every error raised by the library."""

    pass


class InvalidJob(SpeedScaleError):
    """Raised when a job violates work > 0 or release < deadline."""

    pass


class InvalidInstance(SpeedScaleError):
    """Raised when an instance has m < 1, alpha <= 1 or duplicate job ids."""

    pass


class UnknownJobId(SpeedScaleError):
    """Raised when a schedule piece references a job absent from the instance."""

    pass


class InvalidGamma(SpeedScaleError):
    """Raised when a speed-up factor below 1 is requested."""

    pass


class InfeasibleInstance(SpeedScaleError):
    """Raised when no preemptive schedule exists or it is numerically degenerate."""

    pass


class WrongMachineCount(SpeedScaleError):
    """Raised when a single-machine routine receives m != 1."""

    pass


class SolverError(SpeedScaleError):
    """Raised when a solver cannot certify its result within tolerance."""

    pass


class WrongFamily(SpeedScaleError):
    """Raised when an algorithm is given an instance outside its family."""

    pass


class BadAnchor(SpeedScaleError):
    """Raised when a shrink anchor lies outside a job's active interval."""

    pass


class TooLarge(SpeedScaleError):
    """Raised when the brute-force oracle is asked for more than it can enumerate."""

    pass


class InfeasibleOrder(SpeedScaleError):
    """Raised when a fixed job order admits no window-respecting timing."""

    pass


class GenerationFailure(SpeedScaleError):
    """Raised when resampling cannot produce an instance of the requested family."""

    pass


class ParseError(SpeedScaleError):
    """Raised when an input document is malformed."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        super().__init__(f"{message} ({', '.join(location)})" if location else message)


class ValidationError(SpeedScaleError):
    """Raised when a well-formed document violates a Job or Instance invariant."""

    pass
