"""Symmetric probe machinery: shrink factor, shrunk quasimetric, converters.

Horizontal distances are damped by a shrinking factor depending only on a
point's third coordinate: 2 raised to ``-20 * (2n - 1) * max(0, 0.05 - z)``.
At the bottom edge the factor is ``2 * eps**2``, which stretches the hot
band of the vertical midline switch across the whole edge and makes the
coordinate converter the identity there; from ``z = 0.05`` up the factor is
one and every quantity coincides with the plain machinery of
:mod:`sperner_forge.base2d`.

Below the ``z = 0.05`` line the base coloring is just the two bottom bands,
so the nearest switch under the shrunk quasimetric has the closed form
``g = shrink_factor(z) * (y2 - 0.5)``: a point is hot or warm exactly when
``|g| < 2 * eps**2``, the shrunk distance to the switch is ``|g|``, and the
neighbor color is the other bottom color.  Every threshold comparison runs
through exact algebraic-dyadic arithmetic; there are no tolerances.
"""

from __future__ import annotations

from fractions import Fraction

from sperner_forge.base2d import (
    COLD,
    HOT,
    WARM,
    BaseInstance,
    SwitchProbe,
    abs_scalar,
    smax,
    summarize_probe,
)
from sperner_forge.numerics import (
    AlgebraicDyadic,
    Scalar,
    compare,
    pow2,
    rational,
    sign,
    simplify,
)
from sperner_forge.simplex import SimplexPoint

_F = Fraction
_HALF = _F(1, 2)
_SHRINK_TOP = _F(1, 20)  # the factor is 1 from here up


class ShrinkContext:
    """Shrunk-quasimetric probes over a base instance."""

    def __init__(self, base: BaseInstance):
        self.base = base
        self.n = base.n
        self.eps = base.eps
        self.eps2 = base.eps2
        self.two_eps2 = base.two_eps2
        self.inv_eps2 = base.inv_eps2
        self._rate = 20 * (2 * self.n - 1)

    def color(self, x: SimplexPoint) -> int:
        return self.base.color(x)

    def neighborhood_palette(self, x: SimplexPoint):
        return self.base.neighborhood_palette(x)

    def shrink_factor(self, z) -> AlgebraicDyadic:
        """Exact ``2**(-20 (2n-1) (0.05 - z)_+)`` as a single term.

        The exponent inherits the denominator of ``z``; a pathological
        denominator beyond the root-order cap is a hard error.
        """
        z = rational(z)
        if not 0 <= z <= 1:
            raise ValueError(f"shrink factor argument {z} outside [0, 1]")
        if z >= _SHRINK_TOP:
            return AlgebraicDyadic.from_rational(1)
        return pow2(-self._rate * (_SHRINK_TOP - z))

    def shrunk_distance(self, x: SimplexPoint, y: SimplexPoint) -> Scalar:
        """Quasimetric max(shrink(x3) * |x2 - y2|, |x3 - y3|); asymmetric in x."""
        factor = self.shrink_factor(x[2])
        return simplify(
            smax(factor * abs_scalar(x[1] - y[1]), abs_scalar(x[2] - y[2]))
        )

    def _low_band_offset(self, x: SimplexPoint) -> Scalar:
        """Signed shrunk offset from the midline switch, for x3 < 0.05."""
        return self.shrink_factor(x[2]) * (x[1] - _HALF)

    def nearest_switch(self, x: SimplexPoint, own: int | None = None) -> SwitchProbe:
        """Nearest differently-colored region under the shrunk quasimetric.

        Above the 0.05 line this is exactly the plain probe.  Below it the
        only switch within reach is the midline: all other colors sit at
        shrunk distance at least 0.05.
        """
        x3 = x[2]
        if compare(x3, _SHRINK_TOP) >= 0:
            return self.base.nearest_switch(x, own)
        offset = self._low_band_offset(x)
        distance = simplify(abs_scalar(offset))
        if own is None:
            own = self.base.color(x)
        neighbor = 2 if own == 1 else 1
        if compare(distance, self.two_eps2) >= 0:
            return SwitchProbe(self.two_eps2, neighbor, COLD, clamped=True)
        temperature = HOT if compare(distance, self.eps2) < 0 else WARM
        return SwitchProbe(distance, neighbor, temperature)

    def probe_summary(self, x: SimplexPoint) -> tuple[int, int, Scalar]:
        """(own color, modified neighbor color, converted coordinate) off one probe."""
        own = self.base.color(x)
        probe = self.nearest_switch(x, own)
        return summarize_probe(self, own, probe)

    def converted_coord(self, x: SimplexPoint) -> Scalar:
        """Converted coordinate under the shrunk quasimetric.

        Identity on the bottom edge; equal to the plain converter from the
        0.05 line up.
        """
        return self.probe_summary(x)[2]

    def modified_neighbor_color(self, x: SimplexPoint) -> int:
        return self.probe_summary(x)[1]
