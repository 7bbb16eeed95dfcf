"""Exception hierarchy shared by every module."""


class ForgeError(Exception):
    """Base class for all library errors."""


class ValidationError(ForgeError, ValueError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class BadControlValue(ValidationError):
    pass


class DuplicateQudit(ValidationError):
    pass


class BadGate(ValidationError):
    pass


class NotInvertible(ForgeError):
    pass


class DimensionMismatch(ValidationError):
    pass


class MeasureInIdealRun(ForgeError):
    pass


class SizeOverflow(ForgeError):
    pass


class NonClassicalGate(ForgeError):
    pass


class UnknownPreset(ForgeError, KeyError):
    pass


class BadControlCount(ValidationError):
    pass


class UnsupportedWidth(ValidationError):
    pass


class UnknownScheme(ForgeError, KeyError):
    pass


class InfeasibleParams(ValidationError):
    pass


class UnknownTopology(ForgeError, KeyError):
    pass


class UnsupportedGate(ForgeError):
    pass


class DisconnectedQubits(ForgeError):
    pass


class TrioNotConnected(ForgeError):
    pass


class BadWidth(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class UnknownGateKind(ParseError):
    pass
