"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Counts and tolerances are fixed here, not configurable.  Conventions:
``n`` for a base instance refers to the converter resolution (the embedded
rectangle has exponent ``n - 3``); recovery and query-accounting settings
quote the rectangle exponent, matching the CLI.
"""

import itertools
import random
from fractions import Fraction

import pytest

from sperner_forge.base2d import BaseInstance, metric_d
from sperner_forge.cake import UtilityModel, all_bundlings, partitions_into
from sperner_forge.lift import (
    SYMMETRIC,
    WARMUP,
    LiftedColoring,
    build_witness,
    check_symmetry,
    insert_zero,
    symmetry_violations,
    validate_sperner_condition,
)
from sperner_forge.recovery import (
    NotASolution,
    RecoveryOutcome,
    recover,
    rect_cell_of_triple,
    verify_base_solution,
)
from sperner_forge.rect2d import RectInstance, generate
from sperner_forge.shrink import ShrinkContext
from sperner_forge.simplex import (
    CutVector,
    GridSpec,
    SimplexPoint,
    cuts_to_point,
    point_to_cuts,
    project,
)

F = Fraction


def _verdict(criterion: str, ok: bool, detail: str = ""):
    suffix = f" ({detail})" if detail else ""
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}{suffix}")
    assert ok, f"{criterion} failed: {detail}"


def plane_pt(y2, y3):
    return SimplexPoint((1 - y2 - y3, y2, y3))


def forced_tiny_rect() -> RectInstance:
    """The unique valid 2x2 rectangular instance (all colors forced)."""
    return RectInstance(1, lambda x, y: (1, 2)[x] if y == 0 else 3)


def base_for_converter_n(n: int, seed: int = 3) -> BaseInstance:
    if n == 4:
        return BaseInstance(forced_tiny_rect())
    return BaseInstance(generate("planted-path", n - 3, seed))


@pytest.fixture(scope="module")
def base6():
    return BaseInstance(generate("trivial-split", 3))


@pytest.fixture(scope="module")
def planted6():
    return BaseInstance(generate("planted-path", 3, seed=5))


def rational_samples(count: int, seed: int, den_bits: int = 10):
    rng = random.Random(seed)
    edge_values = [
        F(0), F(1), F(1, 2), F(1, 10),
        F(1, 2) + F(1, 2**den_bits), F(1, 2) - F(1, 2**den_bits),
        F(1, 10) + F(1, 2**den_bits), F(1, 10) - F(1, 2**den_bits),
    ]
    out = list(edge_values)
    while len(out) < count:
        out.append(F(rng.randrange(0, 2**den_bits + 1), 2**den_bits))
    return out[:count]


def junction_targets(base, jitters=(F(1, 4), F(1, 4))):
    sol = base.rect.planted
    w = base.cell
    jx = F(2, 5) + w * (sol.x + 1)
    jy = F(1, 10) + w * (sol.y + 1)
    dx, dy = w * jitters[0], w * jitters[1]
    chosen = {}
    for a, b, y2, y3 in [
        (sol.x, sol.y, jx - dx, jy - dy),
        (sol.x + 1, sol.y, jx + dx, jy - dy),
        (sol.x, sol.y + 1, jx - dx, jy + dy),
        (sol.x + 1, sol.y + 1, jx + dx, jy + dy),
    ]:
        chosen.setdefault(base.rect.color(a, b), SimplexPoint((1 - y2 - y3, y2, y3)))
    assert len(chosen) == 3
    return tuple(chosen[c] for c in sorted(chosen))


class TestCriterion1:
    def test_boundary_facts_exact(self, base6, planted6):
        bad = 0
        checked = 0
        for base in (base6, planted6):
            for y in rational_samples(1000, seed=101):
                checked += 1
                if base.color(SimplexPoint((1 - y, y, F(0)))) != 1 + (y > F(1, 2)):
                    bad += 1
            for z in rational_samples(1000, seed=102):
                checked += 2
                if base.color(SimplexPoint((1 - z, F(0), z))) != 1 + 2 * (z > F(1, 10)):
                    bad += 1
                if base.color(SimplexPoint((F(0), 1 - z, z))) != 2 + (z > F(1, 10)):
                    bad += 1
        _verdict("C1 boundary-facts", bad == 0, f"{checked} exact checks, {bad} bad")


class TestCriterion2:
    def test_core_confinement_exhaustive(self):
        core = lambda i, j, side: (
            F(2, 5) <= F(i, side) < F(3, 5) and F(1, 10) <= F(j, side) < F(3, 10)
        )
        total_blocks = 0
        escapes = 0
        for n in range(4, 9):
            base = base_for_converter_n(n)
            side = 2**n
            eps = base.eps
            colors = {}
            for i in range(side + 1):
                for j in range(side + 1 - i):
                    colors[(i, j)] = base.color(plane_pt(i * eps, j * eps))
            for i in range(side):
                for j in range(side - i):
                    block = [
                        (i + di, j + dj)
                        for di in (0, 1)
                        for dj in (0, 1)
                        if (i + di, j + dj) in colors
                    ]
                    seen = {}
                    for cell in block:
                        seen.setdefault(colors[cell], cell)
                    if len(seen) >= 3:
                        total_blocks += 1
                        for color, (wi, wj) in seen.items():
                            if not core(wi, wj, side):
                                escapes += 1
        _verdict(
            "C2 core-confinement",
            escapes == 0 and total_blocks > 0,
            f"n=4..8 exhaustive, {total_blocks} trichromatic blocks, {escapes} escapes",
        )


class TestCriterion3:
    def test_converter_closed_forms(self, planted6):
        base = planted6
        ctx = ShrinkContext(base)
        eps2 = base.eps2
        formula = lambda z: min(F(1), max(F(0), F(1, 2) + (z - F(1, 10)) / (2 * eps2)))
        bad = 0
        # left/right boundary sweep across the hot/warm window (open below)
        for j in range(1, 1001):
            z = F(1, 10) - 2 * eps2 + F(j, 250) * eps2
            left = SimplexPoint((1 - z, F(0), z))
            right = SimplexPoint((F(0), 1 - z, z))
            want = formula(z)
            for conv in (base, ctx):
                if conv.converted_coord(left) != want:
                    bad += 1
                if conv.converted_coord(right) != want:
                    bad += 1
        # identity on the bottom edge
        for x2 in rational_samples(1000, seed=103):
            if ctx.converted_coord(SimplexPoint((1 - x2, x2, F(0)))) != x2:
                bad += 1
        # shrink factor endpoints
        n = base.n
        if ctx.shrink_factor(0) != F(1, 2 ** (2 * n - 1)):
            bad += 1
        for z in (F(1, 20), F(1, 10), F(1, 2), F(1)):
            if ctx.shrink_factor(z) != 1:
                bad += 1
        _verdict("C3 converter-closed-forms", bad == 0, f"{bad} mismatches")


class TestCriterion4:
    PAIRS = 10_000

    def _interior_pairs(self, rng, den_bits, scales):
        base_den = 2**den_bits
        while True:
            y2 = F(rng.randrange(0, base_den + 1), base_den)
            y3 = F(rng.randrange(0, base_den + 1), base_den)
            if y2 + y3 > 1:
                continue
            scale = scales[rng.randrange(len(scales))]
            d2 = rng.randrange(-4, 5) * scale
            d3 = rng.randrange(-4, 5) * scale
            if y2 + d2 < 0 or y3 + d3 < 0 or (y2 + d2) + (y3 + d3) > 1:
                continue
            yield plane_pt(y2, y3), plane_pt(y2 + d2, y3 + d3)

    def test_warmup_interior_bound(self, planted6):
        base = planted6
        rng = random.Random(41)
        scales = [base.eps2 / 4, base.eps2, base.eps / 8]
        gen = self._interior_pairs(rng, 10, scales)
        bad = skipped = 0
        for _ in range(self.PAIRS):
            x, xp = next(gen)
            if len(base.neighborhood_palette(x)) >= 3 or len(base.neighborhood_palette(xp)) >= 3:
                skipped += 1
                continue
            rx, rxp = base.converted_coord(x), base.converted_coord(xp)
            if rx in (0, 1) and rxp in (0, 1):
                continue
            dist = metric_d(x, xp)
            dist = max(dist, max(abs(a - b) for a, b in zip(x.coords, xp.coords)))
            if abs(rx - rxp) > base.inv_eps2 * dist:
                bad += 1
        _verdict(
            "C4a warmup-lipschitz", bad == 0, f"{self.PAIRS} pairs, {skipped} trichromatic"
        )

    def test_symmetric_interior_bound(self):
        base = BaseInstance(forced_tiny_rect())  # n = 4 keeps root orders small
        ctx = ShrinkContext(base)
        bound = F(2**base.n) ** 3
        rng = random.Random(43)
        scales = [base.eps**3, base.eps2 / 2, base.eps / 8]
        gen = self._interior_pairs(rng, 8, scales)
        bad = skipped = 0
        for _ in range(self.PAIRS):
            x, xp = next(gen)
            if len(base.neighborhood_palette(x)) >= 3 or len(base.neighborhood_palette(xp)) >= 3:
                skipped += 1
                continue
            rx, rxp = ctx.converted_coord(x), ctx.converted_coord(xp)
            if rx in (0, 1) and rxp in (0, 1):
                continue
            dist = max(abs(a - b) for a, b in zip(x.coords, xp.coords))
            if abs(rx - rxp) > bound * dist:
                bad += 1
        _verdict(
            "C4b symmetric-lipschitz", bad == 0, f"{self.PAIRS} pairs, {skipped} trichromatic"
        )

    def test_boundary_bound(self, planted6):
        base = planted6
        ctx = ShrinkContext(base)
        rng = random.Random(47)
        bad = 0
        for _ in range(self.PAIRS):
            z = F(rng.randrange(0, 2**12 + 1), 2**12)
            step = rng.choice([base.eps2 / 2, base.eps2 * 2, F(1, 2**12)])
            zp = z + rng.randrange(-3, 4) * step
            if not 0 <= zp <= 1:
                continue
            x = SimplexPoint((1 - z, F(0), z)) if rng.random() < 0.5 else SimplexPoint((F(0), 1 - z, z))
            xp = SimplexPoint((1 - zp, F(0), zp)) if rng.random() < 0.5 else SimplexPoint((F(0), 1 - zp, zp))
            for conv in (base, ctx):
                rx, rxp = conv.converted_coord(x), conv.converted_coord(xp)
                if rx in (0, 1) and rxp in (0, 1):
                    continue
                if abs(rx - rxp) > base.inv_eps2 * abs(z - zp):
                    bad += 1
        _verdict("C4c boundary-lipschitz", bad == 0, f"{self.PAIRS} pairs")

    def test_projection_bound(self):
        rng = random.Random(53)
        bad = checked = 0
        while checked < self.PAIRS:
            k = rng.randrange(2, 6)
            grid = GridSpec(k, 10)
            x, xp = grid.random_point(rng), grid.random_point(rng)
            if x[k] > F(9, 10) or xp[k] > F(9, 10):
                continue
            checked += 1
            dist = max(abs(a - b) for a, b in zip(x.coords, xp.coords))
            pdist = max(
                abs(a - b) for a, b in zip(project(x, 1).coords, project(xp, 1).coords)
            )
            if pdist > 110 * dist:
                bad += 1
        _verdict("C4d projection-lipschitz", bad == 0, f"{checked} pairs")

    def test_utility_l1_bound(self, base6):
        model = UtilityModel(LiftedColoring(base6, 3, SYMMETRIC), m=3)
        rng = random.Random(59)
        den = 8 * model.N
        bad = 0
        for _ in range(self.PAIRS):
            a = sorted(F(rng.randrange(0, den + 1), den) for _ in range(model.k))
            b = sorted(F(rng.randrange(0, den + 1), den) for _ in range(model.k))
            ta, tb = CutVector(a), CutVector(b)
            l1 = sum(abs(u - v) for u, v in zip(a, b))
            ua, ub = model.utilities(ta), model.utilities(tb)
            if any(abs(u - v) > l1 for u, v in zip(ua, ub)):
                bad += 1
        _verdict("C4e utility-lipschitz", bad == 0, f"{self.PAIRS} pairs")


class TestCriterion5:
    def test_symmetry_exhaustive_and_warmup_counterexample(self, planted6):
        lc2 = LiftedColoring(planted6, 2, SYMMETRIC)
        v2 = check_symmetry(lc2, m=10)
        lc3 = LiftedColoring(planted6, 3, SYMMETRIC)
        v3 = check_symmetry(lc3, m=6)
        warm = LiftedColoring(planted6, 3, WARMUP)
        counter = symmetry_violations(warm.color, 3, m=6, limit=1)
        detail = (
            f"k=2 m=10: {len(v2)} bad; k=3 m=6 all pairs: {len(v3)} bad; "
            f"warm-up counterexample: {counter[0] if counter else 'none'}"
        )
        _verdict("C5 symmetry", not v2 and not v3 and bool(counter), detail)


class TestCriterion6:
    def test_sperner_condition(self, planted6):
        lc3 = LiftedColoring(planted6, 3, SYMMETRIC)
        face_violations = validate_sperner_condition(lc3, m=6, boundary_only=True)
        interior_bad = 0
        for k in (2, 3, 4, 5):
            lc = LiftedColoring(planted6, k, SYMMETRIC)
            interior_bad += len(
                validate_sperner_condition(lc, m=6, sample=2500, seed=60 + k)
            )
        _verdict(
            "C6 sperner-condition",
            not face_violations and interior_bad == 0,
            f"faces m=6 exhaustive: {len(face_violations)} bad; 10^4 interior: {interior_bad} bad",
        )


class TestCriterion7:
    WITNESSES = 100
    FUZZ = 1000

    def test_recovery(self):
        bad_witness = bad_soundness = bad_rect = 0
        runs = 0
        for k in (3, 4, 5):
            for rect_n in (3, 4):
                base = BaseInstance(generate("planted-path", rect_n, seed=70 + k))
                mode = SYMMETRIC if (k + rect_n) % 2 else WARMUP
                lc_sym = LiftedColoring(base, k, SYMMETRIC)
                lc_alt = LiftedColoring(base, k, mode)
                rng = random.Random(700 + 10 * k + rect_n)
                planted_cell = base.rect.planted
                for i in range(self.WITNESSES):
                    jit = (F(rng.randrange(1, 64), 256), F(rng.randrange(1, 64), 256))
                    targets = junction_targets(base, jit)
                    lc = lc_sym if i % 2 == 0 else lc_alt
                    witnesses = build_witness(lc, targets)
                    outcome = recover(lc, witnesses)
                    runs += 1
                    if not isinstance(outcome, RecoveryOutcome) or not verify_base_solution(
                        base, outcome.triple
                    ):
                        bad_witness += 1
                        continue
                    cell = rect_cell_of_triple(base, outcome.triple)
                    if (
                        len(base.rect.cell_colors(cell.x, cell.y)) != 3
                        or (cell.x, cell.y) != (planted_cell.x, planted_cell.y)
                    ):
                        bad_rect += 1
                grid = GridSpec(k, 7)
                for _ in range(self.FUZZ):
                    anchor = grid.random_point(rng)
                    triple = [anchor]
                    for _ in range(2):
                        coords = list(anchor.coords)
                        i, j = rng.sample(range(k + 1), 2)
                        delta = min(F(rng.randrange(0, 3), grid.denominator), coords[i])
                        coords[i] -= delta
                        coords[j] += delta
                        triple.append(SimplexPoint(coords))
                    outcome = recover(lc_sym, triple)
                    runs += 1
                    if isinstance(outcome, RecoveryOutcome) and not verify_base_solution(
                        base, outcome.triple
                    ):
                        bad_soundness += 1
        _verdict(
            "C7 recovery",
            bad_witness == bad_soundness == bad_rect == 0,
            f"{runs} recoveries over (k, rect_n) in {{3,4,5}}x{{3,4}}; "
            f"witness fails {bad_witness}, soundness fails {bad_soundness}, "
            f"rect mismatches {bad_rect}",
        )


class TestCriterion8:
    def _enumerate_cells(self, model):
        N, k = model.N, model.k
        cells = []
        for s in itertools.product(range(N), repeat=k):
            if list(s) != sorted(s):
                continue
            for perm in itertools.permutations(range(k)):
                corners = [tuple(s)]
                current = list(s)
                ok = True
                for axis in perm:
                    current[axis] += 1
                    if list(current) != sorted(current):
                        ok = False
                        break
                    corners.append(tuple(current))
                if ok:
                    cells.append(corners)
        return cells

    def test_cake_criteria(self, base6):
        model = UtilityModel(LiftedColoring(base6, 3, SYMMETRIC), m=3)
        N, k = model.N, model.k
        # nonnegativity, exhaustive over the grid
        nonneg_bad = 0
        for x in model.grid.iter_points():
            t = point_to_cuts(x)
            for piece in range(k + 1):
                if (model.utility(t, piece) > 0) != (x.coords[piece] > 0):
                    nonneg_bad += 1
        # every at-most-2-colored cell rejects all 3-happy bundlings
        cells = self._enumerate_cells(model)
        assert len(cells) == N**k
        eps_check = F(1, 10 * N)
        bundlings = list(all_bundlings(k + 1, 3))
        assert len(bundlings) == 36
        rng = random.Random(81)
        lemma_bad = 0
        two_colored = 0
        certified = []
        for corners in cells:
            cut_corners = [CutVector([F(c, N) for c in corner]) for corner in corners]
            points = [cuts_to_point(c) for c in cut_corners]
            colors = [model.preference(p) + 1 for p in points]
            distinct = len(set(colors))
            test_points = list(cut_corners)
            blends = []
            for _ in range(2):
                weights = [F(rng.randrange(1, 5), 1) for _ in range(k + 1)]
                total = sum(weights)
                blends.append(
                    CutVector(
                        [
                            sum(w * c.cuts[i] for w, c in zip(weights, cut_corners)) / total
                            for i in range(k)
                        ]
                    )
                )
            centroid = CutVector(
                [
                    sum(c.cuts[i] for c in cut_corners) / (k + 1)
                    for i in range(k)
                ]
            )
            test_points.extend(blends)
            test_points.append(centroid)
            if distinct <= 2:
                two_colored += 1
                for t in test_points:
                    for bundling in bundlings:
                        ok, _ = model.check_envy_free(t, bundling, eps_check, 3)
                        if ok:
                            lemma_bad += 1
            else:
                # search for certified 3-happy cuts to map back
                for t in (blends[0], centroid):
                    for bundling in bundlings:
                        ok, _ = model.check_envy_free(t, bundling, eps_check, 3)
                        if ok:
                            certified.append(t)
                            break
        mapping_bad = 0
        for t in certified:
            _, colors = model.solution_cell(t)
            if len(set(colors)) < 3:
                mapping_bad += 1
        _verdict(
            "C8 cake",
            nonneg_bad == 0 and lemma_bad == 0 and mapping_bad == 0 and certified,
            f"nonneg bad {nonneg_bad}; {two_colored} two-colored cells x 36 bundlings "
            f"x 5 points: {lemma_bad} false-happy; {len(certified)} certified cuts, "
            f"{mapping_bad} mapped to <3 colors",
        )


class TestCriterion9:
    def test_query_accounting(self):
        rect_n = 3
        rows = []
        for k in range(2, 9):
            base = BaseInstance(generate("trivial-split", rect_n))
            lc = LiftedColoring(base, k, SYMMETRIC)
            grid = GridSpec(k, 7)
            rng = random.Random(90 + k)
            counts = []
            for _ in range(60):
                x = grid.random_point(rng)
                base.counter.reset()
                lc.color(x)
                counts.append(base.counter.value)
            rows.append((k, F(sum(counts), len(counts)), max(counts)))
        # least-squares fit, exact arithmetic
        pts = [(k, mean) for k, mean, _ in rows]
        n = len(pts)
        sx = sum(p[0] for p in pts)
        sy = sum(p[1] for p in pts)
        sxx = sum(p[0] * p[0] for p in pts)
        sxy = sum(p[0] * p[1] for p in pts)
        slope = F(n * sxy - sx * sy, n * sxx - sx * sx)
        intercept = (sy - slope * sx) / n
        worst = F(0)
        for k, mean, _ in rows:
            fit = slope * k + intercept
            scale = max(mean, F(1))
            worst = max(worst, abs(mean - fit) / scale)
        fit_ok = worst <= F(1, 10)
        # a single core evaluation costs exactly one rectangle query
        base = BaseInstance(generate("trivial-split", rect_n))
        x2 = F(2, 5) + base.cell / 2
        x3 = F(1, 10) + base.cell / 2
        base.rect.counter.reset()
        base.color(plane_pt(x2, x3))
        single = base.rect.counter.value
        detail = (
            f"means {[float(m) for _, m, _ in rows]}, slope {float(slope):.3f}, "
            f"max rel dev {float(worst):.4f}, core eval rect queries {single}"
        )
        _verdict("C9 query-accounting", fit_ok and single == 1, detail)
