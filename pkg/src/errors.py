"""
Exception types shared by the simulator modules
"""


class IcicError(Exception):
    """Base class for all simulator errors"""


class InvalidParameterError(IcicError, ValueError):
    """A parameter or config value is outside its valid domain"""


class InfeasibleOccupancyError(IcicError):
    """Terrestrial UEs cannot be placed under the q-tier reuse constraint"""

    def __init__(self, placed, requested, attempts):
        self.placed = placed
        self.requested = requested
        self.attempts = attempts
        super().__init__(
            f"Could not place UE {placed + 1}/{requested} after {attempts} attempts "
            f"(too many UEs for the RB count, grid size and q)"
        )

    def __reduce__(self):
        # Worker processes send these back to the parent
        return (self.__class__, (self.placed, self.requested, self.attempts))


class InsufficientRBsError(IcicError):
    """Fewer RBs are available at the serving BS than the UAV requested"""

    def __init__(self, available, requested):
        self.available = available
        self.requested = requested
        super().__init__(f"Only {available} RBs available, {requested} requested")

    def __reduce__(self):
        return (self.__class__, (self.available, self.requested))


class RealizationError(IcicError):
    """An error raised inside one Monte Carlo realization"""

    def __init__(self, index, error):
        self.index = index
        self.error = error
        super().__init__(f"Realization {index} failed: {error}")

    def __reduce__(self):
        return (self.__class__, (self.index, self.error))
