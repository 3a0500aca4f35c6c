"""
randlattice - Rank-1 lattice rules with a random prime number of points

One integer generating vector serves every prime in (n/2, n]; each run draws
the prime (and optionally a shift) at random. The package constructs such
vectors from per-prime good sets, computes their exact worst-case RMS error in
weighted Korobov spaces and evaluates the accompanying bounds.
"""

__version__ = "0.1.0"
__author__ = "randlattice Team"
__description__ = "Rank-1 lattice rules with a random prime number of points"
