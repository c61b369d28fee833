"""Exception hierarchy.

Every error raised on bad input derives from :class:`GeneratorError`, which
is a ``ValueError`` so callers that only care about "bad parameters" can
catch that.
"""


class GeneratorError(ValueError):
    """Base class for all input/parameter errors."""


class ConfigError(GeneratorError):
    """A generator configuration violates one of its invariants."""


class NonStochasticRow(ConfigError):
    pass


class OutOfRange(ConfigError):
    pass


class BadShape(ConfigError):
    pass


class BadExponent(ConfigError):
    pass


class BadTemperature(GeneratorError):
    pass


class DegenerateRow(GeneratorError):
    pass


class Infeasible(GeneratorError):
    """Parameters that cannot be realized (e.g. fewer nodes than classes)."""


class InfeasibleBudget(Infeasible):
    """Requested edge count exceeds the complete graph."""


class EmptyClass(GeneratorError):
    pass


class AllIsolatedClass(GeneratorError):
    pass


class ZeroColumn(GeneratorError):
    pass


class ZeroExpectedDegree(GeneratorError):
    pass


class EmptySample(GeneratorError):
    pass


class GraphFormatError(GeneratorError):
    """An input graph/labels/attributes file could not be parsed."""
