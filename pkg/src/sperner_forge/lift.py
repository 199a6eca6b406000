"""Recursive high-dimensional colorings built from the 2D base instance.

A lifted coloring maps the standard ``k``-simplex to colors ``1..k+1`` by
repeatedly pasting a standing copy of the base instance over the color
switches of the previous level.  Evaluation walks a chain of intermediate
2-simplex projections ``y(2), ..., y(k)`` and palettes of three candidate
colors; the output is the palette entry selected by the base color of the
final projection.

Two modes share the chain:

- ``warmup``: the first projection is the plain projection of the input to
  the base 2-simplex, and levels use the plain converter.  The chain does
  not satisfy the zero-insertion symmetry.
- ``symmetric``: the input is first projected all the way to the 1-simplex,
  converted through the piecewise-linear bottom map, then recombined with
  the next coordinate; levels use the shrunk converter.  The result is
  symmetric under inserting the zero coordinate at different positions.

Traces (all intermediate projections and palettes) are always materialized:
solution recovery replays them, and their cost is dominated by the probe
work anyway.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from sperner_forge.base2d import BaseInstance
from sperner_forge.numerics import Scalar, compare, scalar_to_json, sign, simplify
from sperner_forge.shrink import ShrinkContext
from sperner_forge.simplex import (
    GridSpec,
    SimplexPoint,
    first_nonzero_index,
    index_of,
    nontrivial_indices,
    project,
)

WARMUP = "warmup"
SYMMETRIC = "symmetric"

_F = Fraction
_HALF = _F(1, 2)
_TENTH = _F(1, 10)


class ModeMismatch(ValueError):
    """Operation requires the other lifting mode."""


class TargetOutOfRange(ValueError):
    """Witness targets violate the inverse construction's validity window."""


@dataclass(frozen=True)
class Trace:
    """Full evaluation state of one lifted-coloring call.

    ``projections[i - 2]`` is the level-``i`` projection ``y(i)`` and
    ``palettes[i - 2]`` its palette, for ``i`` in ``2..k``.  In symmetric
    mode ``first_converted`` records the bottom-map image of the 1-simplex
    projection; it is ``None`` in warm-up mode.
    """

    mode: str
    first_converted: Scalar | None
    projections: tuple[SimplexPoint, ...]
    palettes: tuple[tuple[int, int, int], ...]
    final_color: int

    @property
    def k(self) -> int:
        return len(self.projections) + 1

    def projection(self, i: int) -> SimplexPoint:
        return self.projections[i - 2]

    def palette(self, i: int) -> tuple[int, int, int]:
        return self.palettes[i - 2]

    def first_nonzero(self, i: int) -> int:
        return first_nonzero_index(self.projection(i))

    def to_json(self, x: SimplexPoint | None = None) -> dict:
        data = {
            "mode": self.mode,
            "tilde_y0": None
            if self.first_converted is None
            else scalar_to_json(self.first_converted),
            "projections": [p.to_json() for p in self.projections],
            "palettes": [list(p) for p in self.palettes],
            "color": self.final_color,
        }
        if x is not None:
            data["x"] = x.to_json()
        return data


class LiftedColoring:
    """Coloring of the ``k``-simplex recursively lifted from a base instance."""

    def __init__(self, base: BaseInstance, k: int, mode: str = SYMMETRIC):
        if k < 2:
            raise ValueError("lifted colorings need k >= 2")
        if mode not in (WARMUP, SYMMETRIC):
            raise ValueError(f"unknown mode {mode!r}")
        self.base = base
        self.k = k
        self.mode = mode
        self.converter = ShrinkContext(base) if mode == SYMMETRIC else base
        # side length 2**-side_exponent makes any solution recoverable
        self.side_exponent = (4 if mode == SYMMETRIC else 3) * k * base.n

    def trace(self, x: SimplexPoint) -> Trace:
        if x.k != self.k:
            raise ValueError(f"expected a point of the {self.k}-simplex, got {x.k}")
        k = self.k
        projections = [x]
        for _ in range(k - 1):
            projections.append(project(projections[-1], 1))
        # projections[l] lives on the (k - l)-simplex
        first_converted = None
        if self.mode == WARMUP:
            y = projections[k - 2]
        else:
            y0 = projections[k - 1][1]
            first_converted = _clamp_unit(
                _HALF + _HALF * self.base.inv_eps2 * (y0 - _TENTH)
            )
            z = projections[k - 2][2]
            y = _recombine(first_converted, z)
        chain = [y]
        palettes = [(1, 2, 3)]
        for i in range(3, k + 1):
            z = projections[k - i][i]
            own, modified, converted = self.converter.probe_summary(y)
            j_lo, j_hi = min(own, modified), max(own, modified)
            prev = palettes[-1]
            palettes.append((prev[j_lo - 1], prev[j_hi - 1], i + 1))
            y = _recombine(converted, z)
            chain.append(y)
        final = palettes[-1][self.base.color(y) - 1]
        return Trace(self.mode, first_converted, tuple(chain), tuple(palettes), final)

    def color(self, x: SimplexPoint) -> int:
        return self.trace(x).final_color

    __call__ = color


def _clamp_unit(v):
    if compare(v, 0) < 0:
        return _F(0)
    if compare(v, 1) > 0:
        return _F(1)
    return simplify(v)


def _recombine(converted, z) -> SimplexPoint:
    scale = 1 - z
    return SimplexPoint(
        (simplify(scale * (1 - converted)), simplify(scale * converted), z)
    )


def corrupt_coloring(lc: LiftedColoring):
    """A deliberately broken variant: color k+1 on the face x_{k+1} = 0.

    Violates the containment of the color in the positive support, so
    validators must flag it.
    """

    def broken(x: SimplexPoint) -> int:
        if sign(x[lc.k]) == 0:
            return lc.k + 1
        return lc.color(x)

    return broken


def validate_sperner_condition(
    lc,
    m: int,
    sample: int | None = None,
    seed: int = 0,
    boundary_only: bool = False,
    color_fn=None,
) -> list[dict]:
    """Check color-in-positive-support over grid points of the m-grid.

    Exhaustive when ``sample`` is None, otherwise over ``sample`` random grid
    points.  Violations are returned as data with a witness.
    """
    color_fn = color_fn or lc.color
    grid = GridSpec(lc.k, m)
    if sample is None:
        points = grid.iter_points(boundary_only=boundary_only)
    else:
        rng = random.Random(seed)
        points = (grid.random_point(rng) for _ in range(sample))
    violations = []
    for x in points:
        c = color_fn(x)
        allowed = nontrivial_indices(x)
        if c not in allowed:
            violations.append(
                {"point": x.to_json(), "color": c, "allowed": list(allowed)}
            )
    return violations


def insert_zero(x: SimplexPoint, position: int) -> SimplexPoint:
    """Insert a zero coordinate at the 1-based position."""
    coords = list(x.coords)
    coords.insert(position - 1, _F(0))
    return SimplexPoint(coords)


def symmetry_violations(
    color_fn,
    k: int,
    m: int,
    pairs=None,
    limit: int | None = None,
) -> list[dict]:
    """Zero-insertion symmetry check for an arbitrary k-simplex coloring.

    Enumerates the grid of the (k-1)-simplex; for every insertion pair (i, j)
    the two boundary points must agree on the position of their color within
    their positive support.  A color outside the support is reported too.
    """
    if pairs is None:
        pairs = list(itertools.combinations(range(1, k + 2), 2))
    grid = GridSpec(k - 1, m)
    cache: dict[tuple, int | None] = {}

    def support_position(u: SimplexPoint):
        key = u.coords
        if key not in cache:
            c = color_fn(u)
            allowed = nontrivial_indices(u)
            cache[key] = index_of(allowed, c) if c in allowed else None
        return cache[key]

    violations = []
    for w in grid.iter_points():
        for i, j in pairs:
            u = insert_zero(w, i)
            v = insert_zero(w, j)
            pu, pv = support_position(u), support_position(v)
            if pu is None or pv is None or pu != pv:
                violations.append(
                    {
                        "base_point": w.to_json(),
                        "insertions": [i, j],
                        "positions": [pu, pv],
                    }
                )
                if limit is not None and len(violations) >= limit:
                    return violations
    return violations


def check_symmetry(lc: LiftedColoring, m: int, pairs=None, limit=None) -> list[dict]:
    """Symmetry validator for symmetric-mode colorings (the mode's contract)."""
    if lc.mode != SYMMETRIC:
        raise ModeMismatch("symmetry is only guaranteed in symmetric mode")
    return symmetry_violations(lc.color, lc.k, m, pairs=pairs, limit=limit)


class DiscreteColoring:
    """Restriction of a lifted coloring to the discrete m-grid.

    Grid solutions are solutions of the continuous coloring verbatim.
    """

    def __init__(self, lc: LiftedColoring, m: int):
        self.lifted = lc
        self.grid = GridSpec(lc.k, m)

    def __call__(self, x: SimplexPoint) -> int:
        if not self.grid.contains(x):
            raise ValueError(f"{x!r} is not on the {self.grid.n}-grid")
        return self.lifted.color(x)


def discrete_view(lc: LiftedColoring, m: int) -> DiscreteColoring:
    return DiscreteColoring(lc, m)


def build_witness(lc: LiftedColoring, targets) -> tuple[SimplexPoint, ...]:
    """Preimages of three core-region targets under the lifting chain.

    Each target must lie in the core region; the three must be pairwise
    eps-close in the plane metric and carry three distinct base colors.
    The returned points evaluate to three distinct lifted colors and their
    final projections reproduce the targets exactly (checked before
    returning).
    """
    targets = tuple(targets)
    if len(targets) != 3:
        raise ValueError("need exactly three targets")
    base = lc.base
    colors = [base.color(t) for t in targets]
    if len(set(colors)) != 3:
        raise TargetOutOfRange(f"targets must show 3 distinct colors, got {colors}")
    for t in targets:
        if not (
            compare(t[1], _F(2, 5)) >= 0
            and compare(t[1], _F(3, 5)) < 0
            and compare(t[2], _TENTH) >= 0
            and compare(t[2], _F(3, 10)) < 0
        ):
            raise TargetOutOfRange(f"target {t!r} outside the core region")
    for a, b in itertools.combinations(targets, 2):
        from sperner_forge.base2d import metric_d

        if compare(metric_d(a, b), base.eps) > 0:
            raise TargetOutOfRange("targets are not pairwise eps-close")
    out = []
    for t in targets:
        z = t[2]
        ratio = t[1] / (1 - z)
        if not 0 < ratio < 1:
            raise TargetOutOfRange(f"target {t!r} leaves the inverse's window")
        if lc.mode == WARMUP:
            a = ratio
            for _ in range(lc.k - 2):
                a = _HALF + base.two_eps2 * (a - _HALF)
            head = a
        else:
            head = _TENTH + base.two_eps2 * (ratio - _HALF)
        coords = [(1 - z) * (1 - head), (1 - z) * head]
        coords.extend([_F(0)] * (lc.k - 2))
        coords.append(z)
        out.append(SimplexPoint(coords))
    traces = [lc.trace(x) for x in out]
    for t, tr in zip(targets, traces):
        if tr.projection(lc.k) != t:
            raise TargetOutOfRange(
                f"forward trace lands on {tr.projection(lc.k)!r}, not {t!r}"
            )
    if len({tr.final_color for tr in traces}) != 3:
        raise TargetOutOfRange("witness points do not receive distinct colors")
    return tuple(out)
