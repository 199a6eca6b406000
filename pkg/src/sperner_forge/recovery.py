"""Recovering 2D solutions from trichromatic triples of a lifted coloring.

The recovery replays the lifting chain for each of the three input points.
If some intermediate projection sits in a trichromatic neighborhood, the
neighborhood's witnesses already form a 2D solution (simulation phase).
Otherwise the three final projections are emitted (final phase).  Either
way the candidate triple is re-verified before returning: points that were
not a genuine lifted solution come back as :class:`NotASolution` data, never
an exception.  Early-level neighborhood checks are harmless even when the
projections wander near the apex, so no threshold bookkeeping is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

from fractions import Fraction

from sperner_forge.base2d import BaseInstance, abs_scalar, smax
from sperner_forge.lift import LiftedColoring
from sperner_forge.numerics import compare, exact_floor
from sperner_forge.rect2d import RectSolution
from sperner_forge.simplex import SimplexPoint

_F = Fraction


@dataclass(frozen=True)
class RecoveryOutcome:
    """A verified 2D solution triple.

    ``phase`` records where it came from: ``simulation`` (a trichromatic
    neighborhood at intermediate level ``level``) or ``final`` (the last
    projections).  The triple is pairwise eps-close and trichromatic in the
    base instance, re-checked before construction.
    """

    phase: str
    triple: tuple[SimplexPoint, SimplexPoint, SimplexPoint]
    level: int | None = None

    def to_json(self) -> dict:
        return {
            "phase": self.phase,
            "level": self.level,
            "triple": [p.to_json() for p in self.triple],
        }


@dataclass(frozen=True)
class NotASolution:
    """Recovery rejected the input; carried as data, never raised."""

    reason: str

    def to_json(self) -> dict:
        return {"phase": "not-a-solution", "reason": self.reason}


def verify_base_solution(base: BaseInstance, triple) -> bool:
    """True iff the three points are pairwise eps-close (sup over all three
    coordinates) and trichromatic in the base instance."""
    triple = tuple(triple)
    if len(triple) != 3:
        return False
    for i in range(3):
        for j in range(i + 1, 3):
            dist = smax(
                *[abs_scalar(a - b) for a, b in zip(triple[i].coords, triple[j].coords)]
            )
            if compare(dist, base.eps) > 0:
                return False
    return len({base.color(x) for x in triple}) == 3


def rect_cell_of_triple(base: BaseInstance, triple) -> RectSolution:
    """Map a verified core triple to a trichromatic rectangular cell.

    The three points fall in a 2x2 block of core cells; the block anchor is
    the coordinate-wise minimum cell index, clipped so the block stays in
    range.
    """
    cell = base.cell
    a_vals, b_vals = [], []
    for x in triple:
        a_vals.append(exact_floor((x[1] - _F(2, 5)) / cell))
        b_vals.append(exact_floor((x[2] - _F(1, 10)) / cell))
    top = base.cells_per_side - 1
    if not all(0 <= a <= top for a in a_vals) or not all(0 <= b <= top for b in b_vals):
        raise ValueError("triple does not lie in the core region")
    anchor_a = min(min(a_vals), top - 1)
    anchor_b = min(min(b_vals), top - 1)
    return RectSolution(anchor_a, anchor_b)


def recover(lc: LiftedColoring, triple) -> RecoveryOutcome | NotASolution:
    """Replay the lifting chain and emit a verified 2D solution.

    For each intermediate level and each point, a trichromatic neighborhood
    short-circuits to its witnesses; otherwise the final projections are the
    candidate.  Returns :class:`NotASolution` when verification fails, which
    signals that the input triple was not a genuine lifted solution.
    """
    triple = tuple(triple)
    if len(triple) != 3:
        return NotASolution(f"need 3 points, got {len(triple)}")
    try:
        traces = [lc.trace(x) for x in triple]
    except ValueError as exc:
        return NotASolution(str(exc))
    base = lc.base
    for level in range(2, lc.k):
        for trace in traces:
            palette = base.neighborhood_palette(trace.projection(level))
            if len(palette) >= 3:
                witnesses = tuple(palette[c] for c in sorted(palette)[:3])
                if verify_base_solution(base, witnesses):
                    return RecoveryOutcome("simulation", witnesses, level=level)
                return NotASolution(
                    "trichromatic neighborhood witnesses failed verification"
                )
    candidate = tuple(tr.projection(lc.k) for tr in traces)
    if verify_base_solution(base, candidate):
        return RecoveryOutcome("final", candidate)
    return NotASolution("final projections are not a base solution")
