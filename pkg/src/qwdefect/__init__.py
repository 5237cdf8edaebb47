"""Quantum walks on the line with a single phase defect at the origin.

Submodules
----------
core      states, coins, evolution, measures, time averages
analytic  closed-form eigenvalues, eigenvectors and stationary measures
sgf       generating-function linear systems and truncated series checks
spectral  truncated evolution matrix, eigen-relation residuals, decay fits
cli       command-line front end
"""

from .analytic import Branch, DecayClass, StationarySolution, build_solution, stationary_measure
from .core import (
    Amplitude,
    Coin,
    CoinField,
    Measure,
    WalkState,
    build_wojcik_coin_field,
    evolve,
    measure,
    step,
    total_norm,
)

__version__ = "0.1.0"

__all__ = [
    "Amplitude",
    "Branch",
    "Coin",
    "CoinField",
    "DecayClass",
    "Measure",
    "StationarySolution",
    "WalkState",
    "build_solution",
    "build_wojcik_coin_field",
    "evolve",
    "measure",
    "stationary_measure",
    "step",
    "total_norm",
]
