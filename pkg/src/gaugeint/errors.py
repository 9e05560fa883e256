"""Exception types shared across the package."""


class GaugeIntError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(GaugeIntError):
    """Two lattice values of different dimension were combined."""


class BackendMismatchError(GaugeIntError):
    """Exact-rational and float scalars were mixed in one computation."""


class UnsupportedFormError(GaugeIntError):
    """A function form outside the supported catalog was requested."""


class UnsupportedClassError(GaugeIntError):
    """No constructive integration schedule exists for this function."""


class MonotonicityError(GaugeIntError):
    """A sampled violation of componentwise monotonicity was detected."""


class NoConvergenceError(GaugeIntError):
    """Adaptive refinement hit its depth limit before the gap closed."""


class ConfigError(GaugeIntError):
    """Invalid experiment configuration or corpus file."""
