"""Low-energy spectral structure of the XXZ spin chain in its N-magnon sectors.

Closed-form droplet and cluster bands, four unitarily related sparse
Hamiltonian representations, eigensolvers, and random-field ensemble
diagnostics.
"""

__version__ = "0.1.0"

from .bethe import Band, BetheSolution, droplet_band, droplet_energy, solve_coefficients
from .hamiltonians import ModelParams, SparseHermitian

__all__ = [
    "Band",
    "BetheSolution",
    "ModelParams",
    "SparseHermitian",
    "droplet_band",
    "droplet_energy",
    "solve_coefficients",
    "__version__",
]
