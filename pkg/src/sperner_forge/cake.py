"""Cake-cutting model induced by a symmetric lifted coloring.

All agents share one utility over pieces of the unit interval cut at ``k``
sorted positions.  On grid cut vectors the pseudo-utility is three-valued:
``1/(2N)`` for the piece the coloring prefers (piece ``color - 1``), zero
for empty pieces, and ``1/(10 k^2 N)`` otherwise.  Between grid points it is
interpolated barycentrically over the containing Freudenthal cell in cut
space.  Equivalent cut vectors (same nonempty pieces, empty pieces slid
around) receive equal piecewise utilities; this is a consequence of the
coloring's zero-insertion symmetry and is certified by tests rather than
assumed.

Envy-freeness is checked additively: an agent is happy when its assigned
bundle is within ``epsilon`` of every bundle's utility.  Because all agents
share one utility, the happy count is the number of bundles within
``epsilon`` of the maximum, independent of the assignment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from sperner_forge.lift import SYMMETRIC, LiftedColoring, ModeMismatch
from sperner_forge.simplex import (
    CutVector,
    GridSpec,
    SimplexPoint,
    cuts_to_point,
    locate_cell,
    point_to_cuts,
)

_F = Fraction


@dataclass(frozen=True)
class Bundling:
    """A partition of the piece indices {0..k} into bundles, plus who gets what.

    ``assignment[d]`` is the bundle index held by agent ``d`` (0-based); it
    must be a permutation of the bundle indices.
    """

    bundles: tuple[tuple[int, ...], ...]
    assignment: tuple[int, ...]

    def __post_init__(self):
        seen = sorted(i for bundle in self.bundles for i in bundle)
        k = len(seen) - 1
        if seen != list(range(k + 1)):
            raise ValueError("bundles must partition the piece indices 0..k")
        if any(not bundle for bundle in self.bundles):
            raise ValueError("bundles must be nonempty as index sets")
        if sorted(self.assignment) != list(range(len(self.bundles))):
            raise ValueError("assignment must be a permutation of the bundles")

    @property
    def agents(self) -> int:
        return len(self.bundles)


def partitions_into(pieces: int, bundles: int):
    """All set partitions of range(pieces) into exactly ``bundles`` blocks."""

    def rec(i, blocks):
        if i == pieces:
            if len(blocks) == bundles:
                yield tuple(tuple(b) for b in blocks)
            return
        if len(blocks) + (pieces - i) < bundles:
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        if len(blocks) < bundles:
            blocks.append([i])
            yield from rec(i + 1, blocks)
            blocks.pop()

    yield from rec(0, [])


def canonical_cut(t: CutVector) -> CutVector:
    """Canonical representative: all empty pieces slid to the front.

    Two cut vectors are equivalent (same nonempty pieces, in order) exactly
    when their canonical forms are equal.
    """
    lengths = [l for l in t.piece_lengths() if l != 0]
    zeros = t.k + 1 - len(lengths)
    cuts = [_F(0)] * zeros
    total = _F(0)
    for l in lengths[:-1]:
        total += l
        cuts.append(total)
    return CutVector(cuts[: t.k])


def equivalent_cuts(a: CutVector, b: CutVector) -> bool:
    return canonical_cut(a) == canonical_cut(b)


class UtilityModel:
    """Shared utility and preference induced by a symmetric coloring.

    ``m`` is the grid exponent for the interpolation grid (``N = 2**m - 1``
    pieces resolution); it defaults to the coloring's guaranteed-recovery
    resolution, so small-scale work should pass an explicit ``m``.
    """

    def __init__(self, coloring: LiftedColoring, m: int | None = None):
        if coloring.mode != SYMMETRIC:
            raise ModeMismatch("cake models need a symmetric coloring")
        self.coloring = coloring
        self.k = coloring.k
        self.m = coloring.side_exponent if m is None else m
        self.N = 2**self.m - 1
        self.grid = GridSpec(self.k, self.m)
        self._pref_cache: dict[tuple, int] = {}
        self._preferred_value = _F(1, 2 * self.N)
        self._other_value = _F(1, 10 * self.k**2 * self.N)

    # -- grid-level definitions -----------------------------------------

    def preference(self, x: SimplexPoint) -> int:
        """Preferred piece index at a grid point: the coloring minus one."""
        if not self.grid.contains(x):
            raise ValueError(f"{x!r} is not on the utility grid")
        key = x.coords
        if key not in self._pref_cache:
            self._pref_cache[key] = self.coloring.color(x) - 1
        return self._pref_cache[key]

    def pseudo_utility(self, x: SimplexPoint, piece: int) -> Fraction:
        """Grid pseudo-utility: preferred, empty, or generic piece value."""
        if not 0 <= piece <= self.k:
            raise ValueError(f"piece index {piece} out of range")
        if x.coords[piece] == 0:
            return _F(0)
        if self.preference(x) == piece:
            return self._preferred_value
        return self._other_value

    # -- interpolated utilities -----------------------------------------

    def utility(self, t: CutVector, piece: int) -> Fraction:
        """Barycentric interpolation of the pseudo-utility over the cell at t."""
        corners, weights = locate_cell(t, self.N)
        total = _F(0)
        for corner, w in zip(corners, weights):
            if w == 0:
                continue
            total += w * self.pseudo_utility(cuts_to_point(corner), piece)
        return total

    def utilities(self, t: CutVector) -> list[Fraction]:
        corners, weights = locate_cell(t, self.N)
        points = [cuts_to_point(c) for c in corners]
        out = []
        for piece in range(self.k + 1):
            total = _F(0)
            for point, w in zip(points, weights):
                if w == 0:
                    continue
                total += w * self.pseudo_utility(point, piece)
            out.append(total)
        return out

    def bundle_utility(self, t: CutVector, bundle) -> Fraction:
        values = self.utilities(t)
        return sum((values[i] for i in bundle), _F(0))

    # -- envy-freeness ----------------------------------------------------

    def check_envy_free(
        self, t: CutVector, bundling: Bundling, epsilon, required: int
    ) -> tuple[bool, frozenset[int]]:
        """Happy agents under additive slack ``epsilon``; satisfied when at
        least ``required`` of them are happy."""
        epsilon = _F(epsilon)
        if epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if not 1 <= required <= bundling.agents:
            raise ValueError("required count out of range")
        values = self.utilities(t)
        bundle_values = [
            sum((values[i] for i in bundle), _F(0)) for bundle in bundling.bundles
        ]
        happy = happy_agents(bundle_values, bundling.assignment, epsilon)
        return len(happy) >= required, happy

    # -- back to the simplex ------------------------------------------------

    def solution_cell(self, t: CutVector) -> tuple[list[SimplexPoint], list[int]]:
        """Corners of the containing cell (as simplex points) and their colors.

        For a cut certified 3-happy at slack at most ``1/(10 N)``, the corner
        colors must span at least three values.
        """
        corners, _ = locate_cell(t, self.N)
        points = [cuts_to_point(c) for c in corners]
        return points, [self.preference(p) + 1 for p in points]


def happy_agents(bundle_values, assignment, epsilon) -> frozenset[int]:
    """Agents whose assigned bundle is within epsilon of every bundle."""
    top = max(bundle_values)
    return frozenset(
        agent
        for agent, bundle_index in enumerate(assignment)
        if bundle_values[bundle_index] + epsilon >= top
    )


def all_bundlings(pieces: int, agents: int):
    """Every (partition, assignment) pair for the given sizes."""
    for partition in partitions_into(pieces, agents):
        for perm in itertools.permutations(range(agents)):
            yield Bundling(partition, tuple(perm))
