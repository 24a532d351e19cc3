"""Exception hierarchy shared by every module."""


class FlatKleinError(Exception):
    """Base class for all errors raised by the package."""


class ConfigurationError(FlatKleinError, ValueError):
    """Invalid construction parameters (polygon size, strip height, resolution)."""


class DomainError(FlatKleinError, ValueError):
    """A parameter lies outside the domain of the requested map or curve."""


class ConstructionError(FlatKleinError, RuntimeError):
    """The chained construction failed one of its own closure checks."""


class MeshError(FlatKleinError, ValueError):
    """A mesh is malformed for the requested operation."""


class PolicyError(FlatKleinError, ValueError):
    """A slit policy designates material that does not exist."""
