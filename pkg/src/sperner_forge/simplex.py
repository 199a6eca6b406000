"""Geometry of the standard simplex and its cut-space twin.

A point of the standard ``k``-simplex carries ``k + 1`` exact coordinates
summing to one.  Its cut-space twin lists the ``k`` partial sums
``t_i = x_1 + ... + x_i``, a sorted vector in [0, 1]; piece ``i`` of the unit
interval is ``(t_i, t_{i+1})`` with length ``x_{i+1}``.

Cell location runs in cut space: the domain ``0 <= t_1 <= ... <= t_k <= 1``
is tiled by Kuhn/Freudenthal simplices of the grid with spacing ``1/N``, and
:func:`locate_cell` returns the ``k + 1`` corners of a containing cell along
with exact barycentric weights.  Ties between equal fractional parts are
broken by incrementing the larger coordinate index first, which keeps every
corner sorted (and hence a valid cut vector); a coordinate sitting exactly on
the top of its column is assigned to the cell below it.  Degenerate queries
(points on cell faces) still yield the full corner list, with zero weights on
the unused corners, so interpolation code never branches.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from sperner_forge.numerics import Scalar, rational, scalar_from_json, scalar_to_json, sign


class DimensionTooSmall(ValueError):
    """Raised when more projection steps are requested than dimensions allow."""


class NotPresent(LookupError):
    """Raised when an index lookup misses."""


class SimplexPoint:
    """A point of the standard simplex: nonnegative coordinates summing to 1."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        coords = tuple(coords)
        if len(coords) < 2:
            raise ValueError("a simplex point needs at least two coordinates")
        total = coords[0]
        for c in coords[1:]:
            total = total + c
        if total != Fraction(1):
            raise ValueError(f"coordinates sum to {total!r}, not 1")
        for c in coords:
            if sign(c) < 0:
                raise ValueError(f"negative coordinate {c!r}")
        self.coords = coords

    @property
    def k(self) -> int:
        return len(self.coords) - 1

    def __getitem__(self, i: int):
        return self.coords[i]

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __eq__(self, other):
        return isinstance(other, SimplexPoint) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"SimplexPoint({', '.join(map(str, self.coords))})"

    def to_json(self) -> dict:
        return {"coords": [scalar_to_json(c) for c in self.coords]}

    @classmethod
    def from_json(cls, data: dict) -> "SimplexPoint":
        return cls([scalar_from_json(c) for c in data["coords"]])


class CutVector:
    """Sorted cut positions 0 <= t_1 <= ... <= t_k <= 1 on the unit interval."""

    __slots__ = ("cuts",)

    def __init__(self, cuts):
        cuts = tuple(cuts)
        prev = Fraction(0)
        for t in cuts:
            if t < prev:
                raise ValueError(f"cuts not sorted: {cuts!r}")
            prev = t
        if cuts and cuts[-1] > 1:
            raise ValueError(f"cut beyond the interval: {cuts!r}")
        self.cuts = cuts

    @property
    def k(self) -> int:
        return len(self.cuts)

    def __getitem__(self, i: int):
        return self.cuts[i]

    def __len__(self) -> int:
        return len(self.cuts)

    def __iter__(self):
        return iter(self.cuts)

    def __eq__(self, other):
        return isinstance(other, CutVector) and self.cuts == other.cuts

    def __hash__(self):
        return hash(self.cuts)

    def __repr__(self):
        return f"CutVector({', '.join(map(str, self.cuts))})"

    def piece_lengths(self) -> tuple:
        """Lengths of the k + 1 pieces induced by the cuts."""
        ends = (Fraction(0),) + self.cuts + (Fraction(1),)
        return tuple(ends[i + 1] - ends[i] for i in range(len(ends) - 1))

    def to_json(self) -> dict:
        return {"cuts": [scalar_to_json(t) for t in self.cuts]}

    @classmethod
    def from_json(cls, data: dict) -> "CutVector":
        return cls([scalar_from_json(t) for t in data["cuts"]])


@dataclass(frozen=True)
class GridSpec:
    """Discrete simplex: points with (2**n - 1) * x_i integral."""

    k: int
    n: int

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("need k >= 1 and n >= 1")

    @property
    def denominator(self) -> int:
        return 2**self.n - 1

    def contains(self, x: SimplexPoint) -> bool:
        if x.k != self.k:
            return False
        N = self.denominator
        for c in x.coords:
            c = rational(c) if not isinstance(c, Fraction) else c
            if (c * N).denominator != 1:
                return False
        return True

    def point(self, numerators) -> SimplexPoint:
        N = self.denominator
        return SimplexPoint([Fraction(a, N) for a in numerators])

    def iter_points(self, boundary_only: bool = False):
        """All grid points, as tuples of numerators summing to 2**n - 1."""
        N = self.denominator
        for combo in itertools.combinations(range(N + self.k), self.k):
            prev = -1
            parts = []
            for c in combo:
                parts.append(c - prev - 1)
                prev = c
            parts.append(N + self.k - 1 - prev)
            if boundary_only and all(p > 0 for p in parts):
                continue
            yield self.point(parts)

    def random_point(self, rng: random.Random) -> SimplexPoint:
        N = self.denominator
        combo = sorted(rng.sample(range(N + self.k), self.k))
        prev = -1
        parts = []
        for c in combo:
            parts.append(c - prev - 1)
            prev = c
        parts.append(N + self.k - 1 - prev)
        return self.point(parts)


def project_step(x: SimplexPoint) -> SimplexPoint:
    """Drop the last coordinate and rescale; the apex maps to the lower apex."""
    last = x.coords[-1]
    if last == Fraction(1):
        return SimplexPoint((Fraction(0),) * (len(x.coords) - 2) + (Fraction(1),))
    scale = Fraction(1) - last
    if isinstance(scale, Fraction):
        inv = Fraction(1) / scale
        return SimplexPoint([c * inv for c in x.coords[:-1]])
    return SimplexPoint([c / scale for c in x.coords[:-1]])


def project(x: SimplexPoint, steps: int) -> SimplexPoint:
    """Apply the projection step ``steps`` times (0 <= steps <= k - 1)."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if steps > x.k - 1:
        raise DimensionTooSmall(f"cannot project {steps} times from dimension {x.k}")
    for _ in range(steps):
        x = project_step(x)
    return x


def nontrivial_indices(x: SimplexPoint) -> tuple[int, ...]:
    """Strictly increasing 1-based indices of the positive coordinates."""
    return tuple(i + 1 for i, c in enumerate(x.coords) if sign(c) > 0)


def index_of(array: tuple[int, ...], value: int) -> int:
    """1-based position of ``value`` in an increasing index array."""
    try:
        return array.index(value) + 1
    except ValueError:
        raise NotPresent(f"{value} not in {array}") from None


def first_nonzero_index(x: SimplexPoint) -> int:
    """1-based index of the first positive coordinate."""
    for i, c in enumerate(x.coords):
        if sign(c) > 0:
            return i + 1
    raise ValueError("simplex point has no positive coordinate")


def point_to_cuts(x: SimplexPoint) -> CutVector:
    """Partial sums: piece i of the induced partition has length x_{i+1}."""
    cuts = []
    total = Fraction(0)
    for c in x.coords[:-1]:
        total = total + c
        cuts.append(total)
    return CutVector(cuts)


def cuts_to_point(t: CutVector) -> SimplexPoint:
    return SimplexPoint(t.piece_lengths())


def locate_cell(t: CutVector, N: int) -> tuple[list[CutVector], list[Fraction]]:
    """Containing Freudenthal cell of the cut-space grid with spacing 1/N.

    Returns ``k + 1`` sorted grid cut vectors ``z^(0..k)`` with
    ``z^(i) = z^(0) + sum_{l<=i} e_{pi(l)} / N`` for a permutation ``pi``,
    and nonnegative rational weights summing to one that reproduce ``t``
    exactly as an affine combination of the corners.
    """
    if N < 1:
        raise ValueError("grid resolution must be positive")
    k = t.k
    base = []
    fracs = []
    for ti in t.cuts:
        s = ti * N
        z = s.numerator // s.denominator
        if z == N and s == N:
            # exact top of the column: use the cell below, fraction 1
            base.append(N - 1)
            fracs.append(Fraction(1))
        else:
            base.append(z)
            fracs.append(s - z)
    # descending fractional part; ties increment the larger index first
    order = sorted(range(k), key=lambda i: (-fracs[i], -i))
    corners = [tuple(base)]
    current = list(base)
    for axis in order:
        current[axis] += 1
        corners.append(tuple(current))
    weights = []
    prev = Fraction(1)
    for axis in order:
        weights.append(prev - fracs[axis])
        prev = fracs[axis]
    weights.append(prev)
    corner_cuts = [CutVector([Fraction(c, N) for c in corner]) for corner in corners]
    return corner_cuts, weights
