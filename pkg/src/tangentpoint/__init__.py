"""Tangent-point energies, fractional Willmore energies and Gauss-map path lengths of closed curves."""

from .bounds import *  # noqa: F401,F403
from .curves import *  # noqa: F401,F403
from .energies import *  # noqa: F401,F403
from .gaussmap import *  # noqa: F401,F403
from .minimize import *  # noqa: F401,F403
from .quadrature import *  # noqa: F401,F403
from . import bounds, curves, energies, gaussmap, minimize, quadrature

__all__ = (
    bounds.__all__
    + curves.__all__
    + energies.__all__
    + gaussmap.__all__
    + minimize.__all__
    + quadrature.__all__
)
__version__ = "0.1.0"
