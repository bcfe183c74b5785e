"""Exception hierarchy shared by all modules."""


class GroverMachineError(Exception):
    """Base class for domain errors raised by this package."""


class InvalidLayoutError(GroverMachineError, ValueError):
    pass


class MeasurementError(GroverMachineError):
    pass


class NetworkParseError(GroverMachineError, ValueError):
    pass


class InvalidExponentError(GroverMachineError, ValueError):
    pass


class CoordinateError(GroverMachineError, ValueError):
    """Unknown coordinate label or negative coordinate value."""


class NoMovementError(GroverMachineError):
    pass


class ConsistencyError(GroverMachineError):
    pass


class MappingError(GroverMachineError):
    pass


class GateStructureError(GroverMachineError, ValueError):
    pass


class UnsupportedError(GroverMachineError, ValueError):
    pass
