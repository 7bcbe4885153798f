"""Direct and inverse scattering by a dielectric cylinder at oblique incidence."""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, SolverError  # noqa: F401

__version__ = "0.1.0"
