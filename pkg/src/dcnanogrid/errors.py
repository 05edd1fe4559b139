"""Exception hierarchy.

Every error raised on purpose derives from :class:`NanogridError`. The CLI
maps the three families below onto distinct exit codes.
"""


class NanogridError(Exception):
    pass


class ConfigError(NanogridError):
    """Bad or incomplete run configuration (exit code 2)."""


class DataError(NanogridError, ValueError):
    """Input data or parameters violate a model precondition (exit code 3)."""


class InvariantViolation(NanogridError):
    """An internal consistency check failed (exit code 4). Indicates a bug."""


# configuration
class MissingField(ConfigError):
    def __init__(self, field: str):
        super().__init__(f"missing required field: {field}")
        self.field = field


class InvalidValue(ConfigError):
    def __init__(self, field: str, reason: str):
        super().__init__(f"invalid value for {field}: {reason}")
        self.field = field


class ConfigFileNotFound(ConfigError, FileNotFoundError):
    pass


# profiles
class LengthMismatch(DataError):
    pass


class NegativeValue(DataError):
    pass


class MalformedRow(DataError):
    pass


class ZeroEnergy(DataError):
    pass


# wiring
class CurrentExceedsTable(DataError):
    pass


class EmptyCategory(DataError):
    pass


# converters
class OverNominal(DataError):
    pass


# engine
class ZeroLoadYear(DataError):
    pass


class ConservationViolation(InvariantViolation):
    pass


# sweep
class TooFewPoints(DataError):
    pass


class IoFailure(NanogridError, OSError):
    pass
