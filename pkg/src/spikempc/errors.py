"""Exception hierarchy shared by the whole package."""


class SpikeMpcError(Exception):
    """Base class for all errors raised by spikempc."""


class ConfigurationError(SpikeMpcError):
    """Invalid parameter values, shapes, or configuration keys."""


class ContractViolation(SpikeMpcError):
    """A caller broke an operational contract (e.g. actuating a non-control neuron)."""


class FileFormatError(SpikeMpcError):
    """A network, trace, or config file could not be parsed; message carries the location."""
