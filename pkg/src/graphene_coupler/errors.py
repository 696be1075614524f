"""Exception hierarchy.

Configuration problems derive from :class:`ConfigError` (CLI exit code 2);
physics failures such as a missing bound mode derive from
:class:`PhysicsError` (CLI exit code 3).
"""


class CouplerError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(CouplerError, ValueError):
    pass


class MissingField(ConfigError):
    pass


class NonPositiveWidth(ConfigError):
    pass


class EnergyBelowGate(ConfigError):
    pass


class StepTooLarge(ConfigError):
    pass


class InsufficientPoints(ConfigError):
    pass


class NonPositiveFrequency(ConfigError):
    pass


class PhysicsError(CouplerError):
    pass


class OutOfDomain(PhysicsError, ValueError):
    """Transverse wavevector outside the window where the decay rate is real."""


class NoModesFound(PhysicsError):
    pass


class ModeNotFound(PhysicsError):
    pass


class NonHermitian(PhysicsError):
    pass


class ZeroCoupling(PhysicsError):
    pass
