"""Exception hierarchy.

Every error raised on purpose by this package derives from ``SeadistError``
so the CLI can tell user errors (exit 1) from bugs (exit 2).
"""


class SeadistError(ValueError):
    pass


class DegenerateBox(SeadistError):
    pass


class InvalidValue(SeadistError):
    """A domain value violates its type invariants."""


class InvalidConfig(SeadistError):
    pass


class NegativeDistance(SeadistError):
    pass


class LengthMismatch(SeadistError):
    pass


class EmptyInput(SeadistError):
    pass


class NegativeComponent(SeadistError):
    pass


class NoGroundTruth(SeadistError):
    pass


class NoGroundTruthAnywhere(NoGroundTruth):
    pass


class NoMatches(SeadistError):
    pass


class ZeroTotalConfidence(SeadistError):
    pass


class ZeroGroundTruthDistance(SeadistError):
    pass


class AboveHorizon(SeadistError):
    """The pixel ray never meets the sea plane."""


class NoValidDepth(SeadistError):
    pass


class ParseError(SeadistError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class SchemaVersionMismatch(SeadistError):
    pass
