"""Exception hierarchy shared across the package."""


class EcnnError(Exception):
    """Base class for every error this package raises on purpose."""


class DataError(EcnnError):
    """Input data is malformed, inconsistent, or incompatible with a model."""


class SingularInputError(EcnnError):
    """The fitting input matrix is identically zero, so the projection step
    is undefined."""


class ModelFormatError(EcnnError):
    """A model file is malformed or its format version is unsupported."""
