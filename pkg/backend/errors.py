"""
Error types shared by the library modules and the CLI
"""


class TuranError(ValueError):
    """Base class for invalid inputs to the toolkit"""


class DomainError(TuranError):
    """A mathematical precondition was violated (index range, divisibility, zero direction)"""


class FeasibilityError(TuranError):
    """A request exceeds what can be computed exactly (enumeration caps)"""


class ConfigError(TuranError):
    """Sampler or command configuration is invalid"""


class FormatError(TuranError):
    """Malformed serialized input (edge lists, hex dumps, support CSV)"""
