"""The continuous triangular coloring over the 2-simplex and its probe machinery.

The coloring embeds a rectangular grid instance into a square core region of
the simplex and fills the rest with fixed bands:

- bottom band (third coordinate <= 0.1): color 1 left of the vertical
  midline, color 2 right of it;
- core region (second coordinate in [0.4, 0.6), third in (0.1, 0.3)): each
  rectangular grid point becomes a half-open square cell of side 1.6 * eps,
  colored by one oracle lookup;
- everything else: color 3.

All probe questions reduce to exact max-metric distances from a query point
to the color regions, measured on the second and third coordinates only.
Every region is a union of axis-aligned boxes intersected with the simplex
constraint ``y2 + y3 <= 1``, so distances are computed in closed form; the
only oracle traffic is the block of core cells within probing range.

Distances at or beyond the cold threshold ``2 * eps**2`` are reported
clamped: downstream formulas never need more, and computing the true global
minimum would require scanning the whole core.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from sperner_forge.numerics import Scalar, compare, exact_floor, scalar_to_json, sign, simplify
from sperner_forge.rect2d import QueryCounter, RectInstance
from sperner_forge.simplex import SimplexPoint

HOT = "hot"
WARM = "warm"
COLD = "cold"

_F = Fraction
_TENTH = _F(1, 10)
_HALF = _F(1, 2)
_CORE_LEFT = _F(2, 5)
_CORE_RIGHT = _F(3, 5)
_CORE_TOP = _F(3, 10)


def smin(*values):
    best = values[0]
    for v in values[1:]:
        if compare(v, best) < 0:
            best = v
    return best


def smax(*values):
    best = values[0]
    for v in values[1:]:
        if compare(v, best) > 0:
            best = v
    return best


def metric_d(x: SimplexPoint, y: SimplexPoint) -> Scalar:
    """Max-metric on the second and third coordinates; the first is ignored."""
    return smax(abs_scalar(x[1] - y[1]), abs_scalar(x[2] - y[2]))


def abs_scalar(v: Scalar) -> Scalar:
    return -v if sign(v) < 0 else v


@dataclass(frozen=True)
class SwitchProbe:
    """Outcome of a nearest-switch query.

    ``distance`` is exact for hot and warm points and clamped at
    ``2 * eps**2`` for cold ones (``clamped`` is then True).  The neighbor
    color is the (distance, color)-lexicographic argmin over the other two
    colors; for cold points it is reported but carries no downstream meaning.
    """

    distance: Scalar
    neighbor_color: int
    temperature: str
    clamped: bool = False

    def to_json(self) -> dict:
        return {
            "distance": scalar_to_json(self.distance),
            "neighbor_color": self.neighbor_color,
            "temperature": self.temperature,
            "clamped": self.clamped,
        }


class _Box:
    """Closed axis-aligned box, implicitly intersected with y2 + y3 <= 1."""

    __slots__ = ("lo2", "hi2", "lo3", "hi3")

    def __init__(self, lo2, hi2, lo3, hi3):
        self.lo2, self.hi2, self.lo3, self.hi3 = lo2, hi2, lo3, hi3

    def distance(self, q2, q3) -> Scalar:
        d_plain = smax(
            _F(0),
            self.lo2 - q2,
            q2 - self.hi2,
            self.lo3 - q3,
            q3 - self.hi3,
        )
        p2 = smin(smax(q2, self.lo2), self.hi2)
        p3 = smin(smax(q3, self.lo3), self.hi3)
        if compare(p2 + p3, 1) <= 0:
            return d_plain
        # The diagonal constraint binds: the least radius r at which the box,
        # the ball, and the half-plane intersect satisfies
        # max(lo2, q2-r) + max(lo3, q3-r) <= 1, monotone in r.
        def slack(r):
            return smax(self.lo2, q2 - r) + smax(self.lo3, q3 - r)

        candidates = [
            (q2 + q3 - 1) / 2,
            q3 - (1 - self.lo2),
            q2 - (1 - self.lo3),
            q2 - self.lo2,
            q3 - self.lo3,
        ]
        feasible = [
            r for r in candidates if sign(r) >= 0 and compare(slack(r), 1) <= 0
        ]
        return smax(d_plain, smin(*feasible))


class BaseInstance:
    """Continuous coloring of the 2-simplex around a rectangular core.

    The converter resolution is tied to the embedded instance: a grid of
    ``2**rect.n`` cells of side ``1.6 * 2**-n`` exactly tiles the core, so
    ``n = rect.n + 3``.  The smallest valid rectangular instance has
    ``rect.n = 1``, hence ``n >= 4``.
    """

    def __init__(self, rect: RectInstance, n: int | None = None):
        if n is None:
            n = rect.n + 3
        if n != rect.n + 3:
            raise ValueError(
                f"converter resolution n={n} does not match rect side 2^{rect.n}; "
                f"the core tiles exactly only for n = rect.n + 3"
            )
        if n < 4:
            raise ValueError("need n >= 4 (embedded instance side at least 2)")
        self.rect = rect
        self.n = n
        self.eps = _F(1, 2**n)
        self.eps2 = self.eps * self.eps
        self.two_eps2 = 2 * self.eps2
        self.inv_eps2 = _F(2**n) ** 2
        self.cell = _F(8, 5 * 2**n)  # 1.6 * eps
        self.cells_per_side = 2**rect.n
        # own-oracle tally: every coloring question answered by this instance,
        # including the cell lookups issued while probing switches
        self.counter = QueryCounter()
        # color regions outside the core, as closed boxes in the (y2, y3) plane
        self._bands = {
            1: (_Box(_F(0), _HALF, _F(0), _TENTH),),
            2: (_Box(_HALF, _F(1), _F(0), _TENTH),),
            3: (
                _Box(_F(0), _CORE_LEFT, _TENTH, _F(1)),
                _Box(_CORE_RIGHT, _F(1), _TENTH, _F(1)),
                _Box(_F(0), _F(1), _CORE_TOP, _F(1)),
            ),
        }

    # -- the coloring ----------------------------------------------------

    def color(self, x: SimplexPoint) -> int:
        """One color in {1, 2, 3}; a single rectangle query in the core region."""
        self.counter.increment()
        x2, x3 = x[1], x[2]
        if compare(x3, _TENTH) <= 0:
            return 1 if compare(x2, _HALF) <= 0 else 2
        if (
            compare(x2, _CORE_LEFT) >= 0
            and compare(x2, _CORE_RIGHT) < 0
            and compare(x3, _CORE_TOP) < 0
        ):
            a = exact_floor((x2 - _CORE_LEFT) / self.cell)
            b = exact_floor((x3 - _TENTH) / self.cell)
            return self.rect.color(a, b)
        return 3

    def _cell_color(self, a: int, b: int) -> int:
        """Core cell lookup while probing; tallied like any coloring question."""
        self.counter.increment()
        return self.rect.color(a, b)

    # -- nearest color switch ---------------------------------------------

    def _cells_in_range(self, q2, q3, radius):
        """Core cells whose closed square lies within ``radius`` of the query."""
        M = self.cells_per_side
        a_lo = max(exact_floor((q2 - _CORE_LEFT - radius) / self.cell) - 1, 0)
        a_hi = min(exact_floor((q2 - _CORE_LEFT + radius) / self.cell), M - 1)
        b_lo = max(exact_floor((q3 - _TENTH - radius) / self.cell) - 1, 0)
        b_hi = min(exact_floor((q3 - _TENTH + radius) / self.cell), M - 1)
        for a in range(a_lo, a_hi + 1):
            u = _CORE_LEFT + self.cell * a
            for b in range(b_lo, b_hi + 1):
                v = _TENTH + self.cell * b
                yield a, b, _Box(u, u + self.cell, v, v + self.cell)

    def nearest_switch(self, x: SimplexPoint, own: int | None = None) -> SwitchProbe:
        """Exact distance to the nearest differently-colored region under the
        max-metric, with the temperature band and neighboring color."""
        q2, q3 = x[1], x[2]
        if own is None:
            own = self.color(x)
        dmin = {c: None for c in (1, 2, 3) if c != own}
        for c in dmin:
            for box in self._bands[c]:
                d = box.distance(q2, q3)
                if dmin[c] is None or compare(d, dmin[c]) < 0:
                    dmin[c] = d
        for a, b, box in self._cells_in_range(q2, q3, self.two_eps2):
            c = self._cell_color(a, b)
            if c == own:
                continue
            d = box.distance(q2, q3)
            if compare(d, dmin[c]) < 0:
                dmin[c] = d
        best_color = None
        best = None
        for c in sorted(dmin):
            d = smin(dmin[c], self.two_eps2)
            if best is None or compare(d, best) < 0:
                best, best_color = d, c
        if compare(best, self.two_eps2) >= 0:
            return SwitchProbe(self.two_eps2, best_color, COLD, clamped=True)
        temperature = HOT if compare(best, self.eps2) < 0 else WARM
        return SwitchProbe(simplify(best), best_color, temperature)

    # -- converter ingredients ---------------------------------------------

    def probe_summary(self, x: SimplexPoint) -> tuple[int, int, Scalar]:
        """(own color, modified neighbor color, converted coordinate) off one probe."""
        own = self.color(x)
        probe = self.nearest_switch(x, own)
        return summarize_probe(self, own, probe)

    def converted_coord(self, x: SimplexPoint) -> Scalar:
        """Position in [0, 1] relative to the nearest color switch.

        Hot and warm points interpolate between the lower- and higher-indexed
        side of the switch; cold points snap to 0 (color 1) or 1 (colors 2, 3).
        Values in (0, 1) occur exactly on hot points.
        """
        return self.probe_summary(x)[2]

    def modified_neighbor_color(self, x: SimplexPoint) -> int:
        """Neighbor color for hot/warm points; a fixed fallback when cold.

        The fallback (2 against color 1, otherwise 1) keeps the order relation
        against the point's own color consistent with the converted coordinate.
        """
        return self.probe_summary(x)[1]

    # -- neighborhood palette ------------------------------------------------

    def neighborhood_palette(self, y: SimplexPoint) -> dict[int, SimplexPoint]:
        """Colors present in the closed eps/2-box around ``y``, with witnesses.

        The box is intersected with each color region piece by piece; every
        piece that meets it contributes one exact witness point, re-checked
        through the coloring itself.
        """
        h = self.eps / 2
        q2, q3 = y[1], y[2]
        l2, h2 = smax(_F(0), q2 - h), smin(_F(1), q2 + h)
        l3, h3 = smax(_F(0), q3 - h), smin(_F(1), q3 + h)
        palette: dict[int, SimplexPoint] = {}

        def offer(w2, w3, expected):
            if expected in palette:
                return
            w2, w3 = simplify(w2), simplify(w3)
            point = SimplexPoint((simplify(1 - w2 - w3), w2, w3))
            actual = self.color(point)
            if actual != expected:
                raise RuntimeError(
                    f"palette witness {point!r} expected color {expected}, got {actual}"
                )
            palette[actual] = point

        # bottom band, color 1: lowest corner of the box
        if compare(l2, _HALF) <= 0 and compare(l3, _TENTH) <= 0:
            offer(l2, l3, 1)
        # bottom band, color 2: push right at the lowest admissible height
        if compare(l3, _TENTH) <= 0:
            w2 = smin(h2, 1 - l3)
            if compare(w2, _HALF) > 0:
                offer(w2, l3, 2)
        # color 3, left of the core
        w3 = smin(h3, 1 - l2)
        if compare(l2, _CORE_LEFT) < 0 and compare(w3, _TENTH) > 0:
            offer(l2, w3, 3)
        # color 3, above the core
        if 3 not in palette and compare(w3, _CORE_TOP) >= 0:
            offer(l2, w3, 3)
        # color 3, right of the core (the diagonal constraint can bind here)
        if 3 not in palette:
            w2 = smax(l2, _CORE_RIGHT)
            if compare(w2, h2) <= 0:
                w3r = smin(h3, 1 - w2)
                if compare(w3r, _TENTH) > 0 and compare(w3r, l3) >= 0:
                    offer(w2, w3r, 3)
        # core cells overlapping the box (half-open squares: the top edges and,
        # on the bottom row, the 0.1 line are excluded)
        if len(palette) < 3:
            for a, b, box in self._cells_in_range(q2, q3, h):
                if compare(h2, box.hi2) >= 0:
                    up2, up2_open = box.hi2, True
                else:
                    up2, up2_open = h2, False
                w2 = _pick_interval(smax(l2, box.lo2), False, up2, up2_open)
                if w2 is None:
                    continue
                if b == 0 and compare(l3, _TENTH) <= 0:
                    lo3, lo3_open = _TENTH, True
                else:
                    lo3, lo3_open = smax(l3, box.lo3), False
                if compare(h3, box.hi3) >= 0:
                    up3, up3_open = box.hi3, True
                else:
                    up3, up3_open = h3, False
                w3 = _pick_interval(lo3, lo3_open, up3, up3_open)
                if w3 is None:
                    continue
                c = self._cell_color(a, b)
                if c not in palette:
                    offer(w2, w3, c)
        return palette


def _pick_interval(lo, lo_open, hi, hi_open):
    """A point of the interval with the given end exclusivity, or None."""
    c = compare(lo, hi)
    if c > 0:
        return None
    if c == 0:
        if lo_open or hi_open:
            return None
        return lo
    return (lo + hi) / 2


def summarize_probe(inst, own: int, probe: SwitchProbe) -> tuple[int, int, Scalar]:
    """Shared converter-case analysis for the plain and shrunk machinery."""
    if probe.temperature == COLD:
        modified = 2 if own == 1 else 1
        return own, modified, (_F(0) if own == 1 else _F(1))
    scaled = _HALF * inst.inv_eps2 * probe.distance
    if probe.neighbor_color > own:
        value = simplify(smax(_F(0), _HALF - scaled))
    else:
        value = simplify(smin(_F(1), _HALF + scaled))
    return own, probe.neighbor_color, value
