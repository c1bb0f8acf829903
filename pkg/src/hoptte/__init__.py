"""Exact small-scale verification tools for an asymmetric Hopfield network
on a 3-colored triangular lattice, its equivalent anisotropic 3D Ising
model with face diagonals, and the twisted tetrahedron equation satisfied
by the associated vertex weight matrices.

Everything here is exact (enumeration, sparse integer combinatorics,
double-precision identities); there are no stochastic approximations
except where Monte Carlo is explicitly cross-validated against exact
probabilities.
"""

__version__ = "0.1.0"
