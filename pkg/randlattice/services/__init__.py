"""Services implementing the randomized lattice rule and its error analysis."""
