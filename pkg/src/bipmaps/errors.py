"""Exception hierarchy shared by all modules."""


class BipmapsError(Exception):
    """Base class for library errors."""


class ConfigError(BipmapsError, ValueError):
    """Invalid weight family, run configuration or argument."""

    def __init__(self, message, pointer=None):
        super().__init__(message if pointer is None else f"{pointer}: {message}")
        self.pointer = pointer


class CapacityError(BipmapsError):
    """An explicit size cap was exceeded (enumeration, outgrowth, window)."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class CertificationError(BipmapsError):
    """A truncation is too small to certify the requested quantity."""

    def __init__(self, message, suggestion=None):
        super().__init__(message)
        self.suggestion = suggestion


class StructuralError(BipmapsError, ValueError):
    """An input object violates a structural invariant."""


class EmptySupportError(BipmapsError):
    """The requested conditioned law has zero total mass."""


class ToleranceError(BipmapsError):
    """A numerical procedure failed to reach its tolerance."""


class PhaseError(BipmapsError):
    """Operation not defined in the weight regime of the input."""
