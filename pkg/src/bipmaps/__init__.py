"""Random bipartite planar maps with face weights: exact enumeration,
mobile bijections, local-limit samplers, random walks and resistances."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("bipmaps")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import (BipmapsError, CapacityError, CertificationError, ConfigError, EmptySupportError,
                     PhaseError, StructuralError, ToleranceError)
from .rng import RngStream
from .weights import FaceWeights, laws_for, power_law_with_kappa

__all__ = [
    "__version__", "BipmapsError", "CapacityError", "CertificationError", "ConfigError",
    "EmptySupportError", "PhaseError", "StructuralError", "ToleranceError", "RngStream",
    "FaceWeights", "laws_for", "power_law_with_kappa",
]
