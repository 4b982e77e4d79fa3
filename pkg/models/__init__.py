"""Domain modules: Eisenstein arithmetic, lattices, codes, concatenation and bounds."""
