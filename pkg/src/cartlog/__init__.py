"""Cartesian logic workbench: checked sequent proofs, syntactic categories,
monoid word problems reduced to module theories, finite models and a
finite copresheaf laboratory."""

import sys

# proofs are deep trees; the checker and serializers recurse on them
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

__version__ = "0.1.0"
