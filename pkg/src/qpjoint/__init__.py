"""Joint recovery of position and momentum distributions from covariant
phase-space measurement statistics.

Modules
-------
fock        number-basis operators, Weyl operators, Hermite functions, states
grid        position-grid wavefunctions, momentum densities, double-slit states
phasespace  phase-space densities, marginal moments, coefficient tables
moments     moment recursion, growth verdicts, Hankel test, quadrature surrogate
homodyne    eight-port and finite-LO balanced homodyne simulation
runner      batch experiment runner (``python -m qpjoint run config.yaml``)
"""

from . import fock, grid, homodyne, moments, phasespace
from .containers import Density1D, MomentSequence
from .errors import QPJointError

__version__ = "0.1.0"

__all__ = ["fock", "grid", "homodyne", "moments", "phasespace", "Density1D", "MomentSequence", "QPJointError"]
