"""Exception types shared across the package."""


class EitreconError(Exception):
    """Base class for all package errors."""


class ConfigError(EitreconError):
    """Invalid run configuration (bad keys, values, or combinations)."""


class MeshError(EitreconError):
    """Mesh construction or validation failure."""


class GeometryError(EitreconError):
    """Partition or ordering problem (disconnected prefix, unreachable ROI, ...)."""


class ModelError(EitreconError):
    """Conductivity model is incompatible with the forward problem."""


class BasisError(EitreconError):
    """Boundary basis cannot be built at the requested order."""


class DataError(EitreconError):
    """Malformed or inconsistent data file / matrix operands."""
