"""Exception hierarchy shared by all pathmeter modules."""


class PathMeterError(Exception):
    """Base class for computation errors raised by pathmeter."""


class ZeroNormalization(PathMeterError):
    """The weights of a quasi-distribution sum to (numerically) zero."""


class EnumerationCapExceeded(PathMeterError):
    """Too many Feynman paths to enumerate explicitly."""

    def __init__(self, dimension: int, slices: int, cap: int):
        self.dimension = dimension
        self.slices = slices
        self.cap = cap
        super().__init__(
            f"{dimension}**{slices + 1} paths exceeds the enumeration cap of {cap}"
            f" (d={dimension}, N={slices})"
        )


class VanishingPostSelection(PathMeterError):
    """The post-selected final state is (numerically) never reached."""


class DegenerateFit(PathMeterError):
    """The weak-limit shape constant cannot be identified for this input."""


class ConfigError(Exception):
    """Invalid experiment configuration.  ``field`` names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
