"""Coherent states of the Poincare group: states, overlaps and phase-space geometry.

Submodules: :mod:`pcs.spinors` (SL(2,C) and null tetrads), :mod:`pcs.su2`
(spin representations), :mod:`pcs.massive` and :mod:`pcs.massless` (the two
families of coherent states), :mod:`pcs.numgeom` (overlap-only numeric
oracles), :mod:`pcs.integrate` (quadrature and Monte Carlo) and
:mod:`pcs.cli`.
"""
from .integrate import Estimate, IntegrationError, MCConfig, QuadratureSpec
from .massive import MassiveLabel, MassiveRep
from .massless import MasslessLabel, MasslessRep

__all__ = [
    "Estimate",
    "IntegrationError",
    "MCConfig",
    "QuadratureSpec",
    "MassiveLabel",
    "MassiveRep",
    "MasslessLabel",
    "MasslessRep",
]
__version__ = "0.1.0"
