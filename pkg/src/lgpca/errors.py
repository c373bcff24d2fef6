"""Exception hierarchy.

Every error raised on purpose by the package derives from ``LgpcaError`` so
the CLI can map it to exit code 1. Errors that describe bad argument values
also derive from ``ValueError``.
"""


class LgpcaError(Exception):
    pass


# frame I/O
class UnreadableFile(LgpcaError, OSError):
    pass


class UnsupportedFormat(LgpcaError, ValueError):
    pass


class DimensionZero(LgpcaError, ValueError):
    pass


class EmptyDirectory(LgpcaError, ValueError):
    pass


class InconsistentDimensions(LgpcaError, ValueError):
    pass


class NumberingGap(LgpcaError, ValueError):
    pass


class BoxOutOfBounds(LgpcaError, ValueError):
    pass


# numerics
class DimensionMismatch(LgpcaError, ValueError):
    pass


class InvalidParams(LgpcaError, ValueError):
    pass


class CenterFrequencyTooHigh(InvalidParams):
    pass


class EmptyResponseList(LgpcaError, ValueError):
    pass


class TooFewSamples(LgpcaError, ValueError):
    pass


class DegenerateData(LgpcaError, ValueError):
    pass


class ZeroVector(LgpcaError, ValueError):
    pass


class TooFewClasses(LgpcaError, ValueError):
    pass


class InvalidThreshold(LgpcaError, ValueError):
    pass


class EmptyLabel(LgpcaError, ValueError):
    pass


# evaluation / pipeline
class EmptyCounts(LgpcaError, ValueError):
    pass


class EmptyList(LgpcaError, ValueError):
    pass


class NoGroundTruth(LgpcaError, ValueError):
    pass


class ModelVersionMismatch(LgpcaError, ValueError):
    pass


class ParseError(LgpcaError, ValueError):
    pass


class UnknownScenario(LgpcaError, ValueError):
    pass
