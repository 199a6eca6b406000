"""Exact-arithmetic Sperner colorings, lifted instances, and cake-cutting reductions.

The package is organized bottom-up:

- ``numerics``: big rationals plus an algebraic-dyadic scalar (sums of
  rational multiples of 2 raised to rational powers) with exact comparison.
- ``simplex``: geometry of the standard simplex, cut-space conversion, and
  Freudenthal cell location with barycentric weights.
- ``rect2d``: rectangular three-color grid instances with the boundary
  contract, synthetic generators, brute-force solving, and query counting.
- ``base2d``: the continuous triangular coloring that embeds a rectangular
  instance in a core region, with the nearest-switch probe machinery.
- ``shrink``: the symmetric variant of the probe machinery, where horizontal
  distances near the bottom edge are damped by a shrinking factor.
- ``lift``: recursive high-dimensional colorings built from the 2D base,
  with trace exposure, validity checkers, and witness construction.
- ``recovery``: mapping trichromatic triples of a lifted coloring back to a
  verified 2D solution, and from there to a rectangular grid cell.
- ``cake``: utility/preference models over cut vectors induced by a
  symmetric coloring, bundle utilities, and envy-freeness checks.
- ``cli``: command-line front end over all of the above.
"""

from sperner_forge.numerics import AlgebraicDyadic, Rational, rational

__all__ = ["AlgebraicDyadic", "Rational", "rational"]

__version__ = "0.1.0"
