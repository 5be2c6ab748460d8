"""Exception hierarchy.

Every domain error carries the CLI exit code it maps to: 2 for domain
errors, 3 for I/O and parse errors.
"""


class EmergenceError(Exception):
    exit_code = 2


class InvalidTpm(EmergenceError, ValueError):
    pass


class NotSquare(InvalidTpm):
    pass


class NegativeEntry(InvalidTpm):
    pass


class NonStochasticRow(InvalidTpm):
    pass


class InvalidLabels(InvalidTpm):
    pass


class InvalidDistribution(EmergenceError, ValueError):
    pass


class NoConvergence(EmergenceError, RuntimeError):
    pass


class IndexOutOfRange(EmergenceError, IndexError):
    pass


class UndefinedConditional(EmergenceError, ValueError):
    pass


class DegenerateSize(EmergenceError, ValueError):
    pass


class SizeMismatch(EmergenceError, ValueError):
    pass


class InvalidPartition(EmergenceError, ValueError):
    pass


class TooLarge(EmergenceError, ValueError):
    pass


class Unreachable(EmergenceError, ValueError):
    pass


class InvalidEndpoint(EmergenceError, ValueError):
    pass


class NoGain(EmergenceError, ValueError):
    pass


class DecompositionFailure(EmergenceError, RuntimeError):
    pass


class BadParams(EmergenceError, ValueError):
    pass


class EmptySpec(BadParams):
    pass


class UnknownExperiment(EmergenceError, ValueError):
    pass


class ParseError(EmergenceError):
    exit_code = 3
