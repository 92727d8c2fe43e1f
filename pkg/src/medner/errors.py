"""Exception hierarchy shared across the toolkit.

Every error raised on purpose derives from MednerError so CLI and service
layers can turn failures into structured responses without catching
built-ins.
"""


class MednerError(Exception):
    """Base class for all toolkit errors."""


class UnknownLabel(MednerError):
    pass


class IndexOutOfRange(MednerError):
    pass


class UncoveredWord(MednerError):
    pass


class EmptyVote(MednerError):
    pass


class InvalidVotePolicy(MednerError):
    pass


class LengthMismatch(MednerError):
    pass


class MissingLogits(MednerError):
    pass


class EmptyDataset(MednerError):
    pass


class NonFiniteLoss(MednerError):
    pass


class DimensionMismatch(MednerError):
    pass


class EmptyInput(MednerError):
    pass


class EmptyQuery(MednerError):
    pass


class MalformedRow(MednerError):
    pass


class HeaderMismatch(MednerError):
    pass


class CoverageGap(MednerError):
    pass


class FormatError(MednerError):
    pass
