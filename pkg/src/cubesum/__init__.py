"""Constructive rational cube sums u^3 + v^3 = p^i for primes p = 4,7 mod 9.

The pipeline builds a CM newform over Q(sqrt(-3)), evaluates its modular
parametrization at explicit CM points, recognizes the algebraic coordinates,
twists and descends to an exactly verified rational point, and converts it to
a cube sum.  Every emitted result is certified by exact arithmetic.
"""

__version__ = "0.1.0"
