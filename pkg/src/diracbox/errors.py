"""Exception hierarchy; the CLI maps these onto exit-code categories."""


class DiracBoxError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DiracBoxError):
    """Malformed or inconsistent run configuration."""


class WindowError(DiracBoxError):
    """Time outside the declared simulation window, or a wall law that
    violates positivity on it."""


class ResolutionError(DiracBoxError):
    """Requested computation is under-resolved (mode truncation or grid
    too coarse for the initial data)."""
