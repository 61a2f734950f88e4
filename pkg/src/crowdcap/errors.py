"""Exception types shared across the package."""


class CrowdCapError(Exception):
    """Base class for all package errors."""


class ShapeMismatch(CrowdCapError, ValueError):
    pass


class EmptyInput(CrowdCapError, ValueError):
    pass


class LengthMismatch(CrowdCapError, ValueError):
    pass


class NotALabel(CrowdCapError, ValueError):
    """Token sequence is not one of the eight label sentences."""


class UnknownToken(CrowdCapError, KeyError):
    pass


class NonFiniteLoss(CrowdCapError, FloatingPointError):
    pass


class EmptyDataset(CrowdCapError, ValueError):
    pass


class EmptyFeatureSequence(CrowdCapError, ValueError):
    pass


class EmptyCorpus(CrowdCapError, ValueError):
    pass


class ZeroLengthCandidate(CrowdCapError, ValueError):
    pass


class DegenerateCorpus(CrowdCapError, ValueError):
    """CIDEr needs at least two distinct reference documents for IDF."""


class InvalidConfig(CrowdCapError, ValueError):
    pass


class InsufficientRecords(CrowdCapError, ValueError):
    pass


class CorruptFile(CrowdCapError, ValueError):
    """Binary file failed a magic, version, or length check."""


class IoFailure(CrowdCapError, OSError):
    pass


class IncompatibleCheckpoint(CrowdCapError, ValueError):
    """Checkpoint metadata does not match the data or vocabulary in use."""
