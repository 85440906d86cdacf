"""Exact von Neumann dimensions over Bernoulli-shift groupoids.

Measures, traces and kernel dimensions are computed as measure-weighted
sums over finite Schreier diagrams, with certified rational tails.
"""

from fractions import Fraction

__version__ = "0.1.0"

__all__ = ["Fraction", "__version__"]
