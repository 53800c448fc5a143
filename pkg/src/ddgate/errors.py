"""Exception types raised across the package."""


class DDGateError(Exception):
    """Base class for all package errors."""


class NonHermitianInput(DDGateError, ValueError):
    pass


class DimensionMismatch(DDGateError, ValueError):
    pass


class BadPartition(DDGateError, ValueError):
    pass


class OverlapError(DDGateError, ValueError):
    """Realized pulse windows collide."""


class InconsistentArea(DDGateError, ValueError):
    """Pulse strength and width do not make a pi rotation."""


class OddOrder(DDGateError, ValueError):
    pass


class Unengineerable(DDGateError, ValueError):
    """A toggling frame maps the drive generator outside its family."""


class FloorReached(DDGateError, ValueError):
    """Infidelities sit at the numerical floor; no scaling can be fitted."""


class NotDivisible(DDGateError, ValueError):
    pass


class UnsupportedGate(DDGateError, ValueError):
    pass


class ConfigError(DDGateError, ValueError):
    pass
