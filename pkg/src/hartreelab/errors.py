"""Exception types shared across the package."""


class GridMismatchError(ValueError):
    """Two objects that must live on the same grid do not."""


class InvalidFieldError(ValueError):
    """Field or spectral data contains NaN/Inf or has the wrong shape."""


class FieldFormatError(ValueError):
    """A field file is malformed (bad magic, truncated payload, ...)."""


class UnsupportedKernelError(ValueError):
    """Operation requires a kernel class it was not given."""


class ConfigError(ValueError):
    """Experiment configuration failed validation."""
