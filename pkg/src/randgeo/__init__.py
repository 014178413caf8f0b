"""randgeo: simulation toolkit for two-dimensional random geometry.

Samples uniform quadrangulations through the labeled-tree encoding, builds
discretized versions of the Brownian map and Brownian plane, and provides
the metric, volume and hull statistics used to cross-validate the discrete
and continuum models.
"""

from ._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
