class TFDensError(Exception):
    """Base class for library errors."""


class ShootingError(TFDensError):
    """Shooting bisection failed; ``bracket`` holds the last interval."""

    def __init__(self, msg, bracket):
        super().__init__(f"{msg}; bracket=({bracket[0]!r}, {bracket[1]!r})")
        self.bracket = bracket


class UnsupportedConfiguration(TFDensError):
    pass


class OrbitalRangeError(TFDensError, ValueError):
    pass


class BoundViolation(TFDensError, ValueError):
    """A caller-asserted pointwise bound fails at a sampled radius."""

    def __init__(self, msg, radius):
        super().__init__(msg)
        self.radius = radius
