class SimDocError(Exception):
    """Base class for errors raised by simdoc."""


class ConfigurationError(SimDocError, ValueError):
    """Invalid configuration or unusable training input."""


class FormatError(SimDocError, ValueError):
    """A model, embedding or dataset file could not be parsed."""


class DataError(SimDocError, ValueError):
    """An evaluation dataset references something that does not exist."""
