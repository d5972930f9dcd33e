"""Exact computations in the Cartan-type Lie superalgebras X(m, n) and their Hom-structures."""

__version__ = "0.1.0"

from ._kernels import BACKEND  # noqa: E402
from .superpoly import Signature, SuperPoly  # noqa: E402
from .vectorfield import VectorField, bracket, div, div_lambda  # noqa: E402

__all__ = ["BACKEND", "Signature", "SuperPoly", "VectorField", "bracket", "div", "div_lambda", "__version__"]
