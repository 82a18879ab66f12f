"""Verification lab for squared white-noise operators and Meixner-class Jacobi fields.

Subpackages by concern:

* :mod:`swnlab.basespace` -- finite atomic base space and L2 pairing,
* :mod:`swnlab.fockcore` -- truncated symmetric Fock space primitives,
* :mod:`swnlab.jacobimeixner` -- ladder matrices, polynomials, measures,
* :mod:`swnlab.swnrep` -- the squared-noise operators over grid x ladder,
* :mod:`swnlab.extfock` -- the extended Fock space and ladder-field operators,
* :mod:`swnlab.wick` -- symbolic normal ordering with delta renormalization,
* :mod:`swnlab.crosscheck` -- suites tying the three computations together,
* :mod:`swnlab.cli` -- command-line entry point and report emission.
"""

from .basespace import GridFunction, GridSpace, inner, pointwise_product

__all__ = ["GridFunction", "GridSpace", "inner", "pointwise_product"]

__version__ = "0.1.0"
