"""Exception types shared across the toolkit."""


class MvcircError(Exception):
    """Base class for all toolkit errors."""


# circuit construction
class CycleDetected(MvcircError):
    pass


class ArityMismatch(MvcircError):
    pass


class IllegalGateForView(MvcircError):
    pass


# netlist / record parsing
class BadHeader(MvcircError):
    pass


class LatchesUnsupported(MvcircError):
    pass


class TruncatedFile(MvcircError):
    pass


class BadToken(MvcircError):
    pass


class IndexOutOfRange(MvcircError):
    pass


class SchemaViolation(MvcircError):
    pass


# simulation
class SupportTooLarge(MvcircError):
    pass


class LengthMismatch(MvcircError):
    pass


class StimulusMismatch(MvcircError):
    pass


# view synthesis
class MissingTemplate(MvcircError):
    pass


# SAT
class PiCountMismatch(MvcircError):
    pass


# neural core
class UnknownGateType(MvcircError):
    pass


class EmptyInput(MvcircError):
    pass


class WidthMismatch(MvcircError):
    pass


class DegeneratePairSet(MvcircError):
    pass


class NonFiniteLoss(MvcircError):
    pass
