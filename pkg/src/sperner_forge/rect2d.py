"""Rectangular three-color grid instances with the Sperner-style boundary contract.

An instance colors the grid ``Q_n^2 = {0..2^n-1}^2`` with colors {1, 2, 3}
subject to the boundary contract:

- bottom row in {1, 2}, pinned ``C(0, 0) = 1`` and ``C(2^n-1, 0) = 2``;
- top row all 3;
- left and right columns all 3 above the bottom row.

A solution is a unit cell whose four corners carry all three colors.  Every
oracle call goes through a counter; results are never cached, since caching
would falsify query accounting.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass
from typing import Callable, Sequence

GENERATOR_KINDS = ("trivial-split", "planted-path")


class NoSolution(Exception):
    """No trichromatic cell found; the boundary contract must be violated."""


@dataclass(frozen=True)
class RectSolution:
    """Cell anchor (x, y); the corners {x, x+1} x {y, y+1} show 3 colors."""

    x: int
    y: int

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y}


class QueryCounter:
    """Lost-update-free tally of oracle invocations."""

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def increment(self) -> None:
        with self._lock:
            self._count += 1

    @property
    def value(self) -> int:
        return self._count

    def reset(self) -> None:
        with self._lock:
            self._count = 0


class RectInstance:
    """Oracle over Q_n^2 with a built-in query counter.

    ``color(x, y)`` is the only read path and increments the tally exactly
    once per call.
    """

    def __init__(
        self,
        n: int,
        oracle: Callable[[int, int], int],
        planted: RectSolution | None = None,
        descriptor: dict | None = None,
    ):
        if n < 1:
            raise ValueError("rect instances need n >= 1")
        self.n = n
        self.side = 2**n
        self._oracle = oracle
        self.counter = QueryCounter()
        self.planted = planted
        self.descriptor = descriptor

    def color(self, x: int, y: int) -> int:
        if not (0 <= x < self.side and 0 <= y < self.side):
            raise IndexError(f"({x}, {y}) outside Q_{self.n}^2")
        self.counter.increment()
        c = self._oracle(x, y)
        if c not in (1, 2, 3):
            raise ValueError(f"oracle returned {c!r} at ({x}, {y})")
        return c

    def cell_colors(self, x: int, y: int) -> set[int]:
        return {
            self.color(x, y),
            self.color(x + 1, y),
            self.color(x, y + 1),
            self.color(x + 1, y + 1),
        }

    def to_json(self) -> dict:
        if self.descriptor is None:
            raise ValueError("instance was not built from a serializable descriptor")
        return dict(self.descriptor)


def with_counter(oracle: Callable[[int, int], int], n: int) -> RectInstance:
    """Wrap a bare color function into a counted instance."""
    return RectInstance(n, oracle)


def validate_boundary(inst: RectInstance) -> list[str]:
    """Exhaustively check the four boundary clauses; violations come back as data."""
    top = inst.side - 1
    violations = []
    for x in range(inst.side):
        c = inst.color(x, 0)
        if c not in (1, 2):
            violations.append(f"bottom row must be 1 or 2: C({x}, 0) = {c}")
        c = inst.color(x, top)
        if c != 3:
            violations.append(f"top row must be 3: C({x}, {top}) = {c}")
    if inst.color(0, 0) != 1:
        violations.append("corner (0,0) must be 1")
    if inst.color(top, 0) != 2:
        violations.append(f"corner ({top},0) must be 2")
    for y in range(1, inst.side):
        c = inst.color(0, y)
        if c != 3:
            violations.append(f"left column must be 3: C(0, {y}) = {c}")
        c = inst.color(top, y)
        if c != 3:
            violations.append(f"right column must be 3: C({top}, {y}) = {c}")
    return violations


def generate(kind: str, n: int, seed: int = 0) -> RectInstance:
    """Synthetic valid instances with a known planted solution.

    ``trivial-split``: bottom row is 1 left of the midpoint and 2 from it on,
    everything above is 3; the planted cell sits at the bottom-row switch.

    ``planted-path``: a width-1 channel of colors 1|2 rises from the bottom
    row through a seed-driven monotone wiggle and stops at a planted row;
    everything else above the bottom row is 3.  The cell at the channel's top
    is trichromatic, and side-steps of the channel may create further ones.
    """
    if n < 2:
        raise ValueError("generators need n >= 2")
    side = 2**n
    if kind == "trivial-split":
        half = side // 2

        def oracle(x: int, y: int) -> int:
            if y == 0:
                return 1 if x < half else 2
            return 3

        planted = RectSolution(half - 1, 0)
    elif kind == "planted-path":
        rng = random.Random(seed)
        split = rng.randint(1, side - 3)
        top_row = rng.randint(1, side - 2)
        channel = [split, split]  # rows 0 and 1 aligned
        for _ in range(2, top_row + 1):
            step = rng.choice((-1, 0, 1))
            channel.append(min(max(channel[-1] + step, 1), side - 3))

        def oracle(x: int, y: int) -> int:
            if y == 0:
                return 1 if x <= channel[0] else 2
            if y <= top_row:
                if x == channel[y]:
                    return 1
                if x == channel[y] + 1:
                    return 2
            return 3

        planted = RectSolution(channel[top_row], top_row)
    else:
        raise ValueError(f"unknown generator kind {kind!r}; expected {GENERATOR_KINDS}")
    return RectInstance(n, oracle, planted, {"kind": kind, "n": n, "seed": seed})


def from_spec(data: dict) -> RectInstance:
    return generate(data["kind"], int(data["n"]), int(data.get("seed", 0)))


def from_table(n: int, colors: Sequence[int]) -> RectInstance:
    """Dense row-major import: colors[y * 2^n + x]."""
    side = 2**n
    if len(colors) != side * side:
        raise ValueError(f"expected {side * side} entries, got {len(colors)}")
    table = tuple(int(c) for c in colors)

    def oracle(x: int, y: int) -> int:
        return table[y * side + x]

    return RectInstance(n, oracle)


def solve_bruteforce(inst: RectInstance) -> RectSolution:
    """Lexicographically first trichromatic cell, by exhaustive scan."""
    top = inst.side - 1
    for x in range(top):
        for y in range(top):
            if len(inst.cell_colors(x, y)) == 3:
                return RectSolution(x, y)
    raise NoSolution("no trichromatic cell; boundary contract must be violated")
