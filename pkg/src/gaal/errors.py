"""Error types shared across the package."""


class GaalError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(GaalError, ValueError):
    """Operands have incompatible shapes; the message names both."""


class ContractError(GaalError, ValueError):
    """A call violated an operation's precondition."""


class ConfigError(GaalError, ValueError):
    """A configuration value is invalid; the message names the field."""


class FormatError(GaalError, ValueError):
    """A file payload does not match its declared binary format."""
