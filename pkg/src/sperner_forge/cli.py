"""Command-line front end.

Subcommands: ``rect gen|validate|solve``, ``base eval|probe``,
``lift eval|trace|check-sperner|check-symmetry``, ``recover``,
``cake check|audit``, ``bench queries``, ``pipeline``, and ``plot``.

Conventions: ``--n`` is always the rectangular instance's resolution
exponent (grid side ``2**n``); the derived continuous machinery runs at
converter resolution ``n + 3``.  All numeric inputs accept exact "p/q"
strings.  Reports are deterministic given the seed: identical configs
produce byte-identical files.  Failures exit nonzero with a JSON error
object on stderr.  The environment variable ``SPERNER_FORGE_ROOT_CAP``
overrides the algebraic root-order cap.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from sperner_forge import base2d, cake, lift, recovery, rect2d
from sperner_forge.numerics import format_rational, rational
from sperner_forge.simplex import CutVector, GridSpec, SimplexPoint

_F = Fraction


def _dump(data, path=None):
    text = json.dumps(data, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_point(text: str) -> SimplexPoint:
    return SimplexPoint([rational(part) for part in text.split(",")])


def _parse_cuts(values) -> CutVector:
    return CutVector([rational(v) for v in values])


def _rect_from_args(args) -> rect2d.RectInstance:
    if getattr(args, "table", None):
        with open(args.table) as fh:
            data = json.load(fh)
        return rect2d.from_table(int(data["n"]), data["colors"])
    return rect2d.generate(args.kind, args.n, args.seed)


def _base_from_args(args) -> base2d.BaseInstance:
    return base2d.BaseInstance(_rect_from_args(args))


def _lifted_from_args(args) -> lift.LiftedColoring:
    return lift.LiftedColoring(_base_from_args(args), args.k, args.mode)


def _add_rect_options(parser, with_table=False):
    parser.add_argument("--kind", choices=rect2d.GENERATOR_KINDS, default="planted-path")
    parser.add_argument("--n", type=int, default=3, help="rect resolution exponent")
    parser.add_argument("--seed", type=int, default=0)
    if with_table:
        parser.add_argument("--table", help="dense JSON table file instead of a generator")


def _add_lift_options(parser):
    _add_rect_options(parser)
    parser.add_argument("--mode", choices=(lift.WARMUP, lift.SYMMETRIC), default=lift.SYMMETRIC)
    parser.add_argument("--k", type=int, default=3)


# -- rect ----------------------------------------------------------------


def cmd_rect_gen(args):
    inst = _rect_from_args(args)
    _dump(
        {
            "kind": args.kind,
            "n": args.n,
            "seed": args.seed,
            "planted": inst.planted.to_json() if inst.planted else None,
            "valid": not rect2d.validate_boundary(inst),
        },
        args.out,
    )
    return 0


def cmd_rect_validate(args):
    inst = _rect_from_args(args)
    violations = rect2d.validate_boundary(inst)
    _dump({"ok": not violations, "violations": violations}, args.out)
    return 0 if not violations else 1


def cmd_rect_solve(args):
    inst = _rect_from_args(args)
    solution = rect2d.solve_bruteforce(inst)
    corners = sorted(inst.cell_colors(solution.x, solution.y))
    _dump({"solution": solution.to_json(), "colors": corners}, args.out)
    return 0


# -- base ----------------------------------------------------------------


def cmd_base_eval(args):
    base = _base_from_args(args)
    _dump({"color": base.color(_parse_point(args.point))}, args.out)
    return 0


def cmd_base_probe(args):
    base = _base_from_args(args)
    x = _parse_point(args.point)
    own, modified, converted = base.probe_summary(x)
    _dump(
        {
            "color": own,
            "probe": base.nearest_switch(x).to_json(),
            "converted_coord": format_rational(_F(converted))
            if isinstance(converted, (int, Fraction))
            else converted.to_json(),
            "modified_neighbor_color": modified,
        },
        args.out,
    )
    return 0


# -- lift ----------------------------------------------------------------


def cmd_lift_eval(args):
    lc = _lifted_from_args(args)
    _dump({"color": lc.color(_parse_point(args.point))}, args.out)
    return 0


def cmd_lift_trace(args):
    lc = _lifted_from_args(args)
    x = _parse_point(args.point)
    _dump(lc.trace(x).to_json(x), args.out)
    return 0


def cmd_lift_check_sperner(args):
    lc = _lifted_from_args(args)
    color_fn = lift.corrupt_coloring(lc) if args.corrupt else None
    violations = lift.validate_sperner_condition(
        lc,
        m=args.m,
        sample=args.samples,
        seed=args.seed,
        boundary_only=args.boundary_only,
        color_fn=color_fn,
    )
    _dump({"ok": not violations, "violations": violations}, args.out)
    return 0 if not violations else 1


def cmd_lift_check_symmetry(args):
    lc = _lifted_from_args(args)
    if args.mode == lift.SYMMETRIC:
        violations = lift.check_symmetry(lc, m=args.m, limit=args.limit)
    else:
        violations = lift.symmetry_violations(lc.color, lc.k, args.m, limit=args.limit)
    _dump({"ok": not violations, "violations": violations}, args.out)
    return 0 if not violations else 1


# -- recover ---------------------------------------------------------------


def cmd_recover(args):
    lc = _lifted_from_args(args)
    if args.triple == "-":
        payload = json.load(sys.stdin)
    else:
        with open(args.triple) as fh:
            payload = json.load(fh)
    triple = [SimplexPoint.from_json(p) for p in payload["triple"]]
    outcome = recovery.recover(lc, triple)
    _dump(outcome.to_json(), args.out)
    return 0


# -- cake ------------------------------------------------------------------


def cmd_cake_check(args):
    model = cake.UtilityModel(_lifted_from_args(args), m=args.m)
    if args.input == "-":
        payload = json.load(sys.stdin)
    else:
        with open(args.input) as fh:
            payload = json.load(fh)
    cuts = _parse_cuts(payload["cuts"])
    bundling = cake.Bundling(
        tuple(tuple(b) for b in payload["bundles"]),
        tuple(payload["assignment"]),
    )
    satisfied, happy = model.check_envy_free(
        cuts, bundling, rational(payload["epsilon"]), int(payload["required"])
    )
    _dump({"satisfied": satisfied, "happy": sorted(happy)}, args.out)
    return 0


def cmd_cake_audit(args):
    model = cake.UtilityModel(_lifted_from_args(args), m=args.m)
    rng = random.Random(args.seed)
    rows = [("check", "cases", "violations")]
    # nonnegativity on grid points
    nonneg_cases = nonneg_bad = 0
    for x in model.grid.iter_points():
        from sperner_forge.simplex import point_to_cuts

        t = point_to_cuts(x)
        for piece in range(model.k + 1):
            nonneg_cases += 1
            if (model.utility(t, piece) > 0) != (x.coords[piece] > 0):
                nonneg_bad += 1
        if nonneg_cases >= args.samples * (model.k + 1):
            break
    rows.append(("nonnegativity", nonneg_cases, nonneg_bad))
    # 1-Lipschitz in l1 over random cut pairs
    lip_cases = lip_bad = 0
    den = model.N * 4
    for _ in range(args.samples):
        a = sorted(_F(rng.randrange(0, den + 1), den) for _ in range(model.k))
        b = sorted(_F(rng.randrange(0, den + 1), den) for _ in range(model.k))
        ta, tb = CutVector(a), CutVector(b)
        l1 = sum(abs(u - v) for u, v in zip(a, b))
        for piece in range(model.k + 1):
            lip_cases += 1
            if abs(model.utility(ta, piece) - model.utility(tb, piece)) > l1:
                lip_bad += 1
    rows.append(("lipschitz_l1", lip_cases, lip_bad))
    # representative independence over equivalent grid cuts
    sym_cases = sym_bad = 0
    for _ in range(args.samples):
        x = model.grid.random_point(rng)
        lengths = list(x.coords)
        solid = [i for i, l in enumerate(lengths) if l > 0]
        if len(solid) == len(lengths):
            continue
        slots = sorted(rng.sample(range(len(lengths)), len(lengths) - len(solid)))
        new_lengths = [_F(0)] * len(lengths)
        free = [i for i in range(len(lengths)) if i not in slots]
        mapping = dict(zip(solid, free))
        for src, dst in mapping.items():
            new_lengths[dst] = lengths[src]
        y = SimplexPoint(new_lengths)
        for src, dst in mapping.items():
            sym_cases += 1
            if model.pseudo_utility(x, src) != model.pseudo_utility(y, dst):
                sym_bad += 1
    rows.append(("symmetry", sym_cases, sym_bad))
    _write_csv(rows, args.csv)
    bad = nonneg_bad + lip_bad + sym_bad
    _dump({"ok": bad == 0, "report": args.csv}, args.out)
    return 0 if bad == 0 else 1


# -- bench -------------------------------------------------------------------


def _measure_queries(args):
    """Base-oracle queries per lifted evaluation, over random grid points.

    Every level of the chain colors its projection and probes its switch
    features, so the count is linear in k with a small slope; rectangle
    queries happen only when a projection engages the core."""
    rows = []
    for k in range(args.k_min, args.k_max + 1):
        base = _base_from_args(args)
        lc = lift.LiftedColoring(base, k, args.mode)
        grid = GridSpec(k, args.grid_m)
        rng = random.Random(args.seed + k)
        counts = []
        for _ in range(args.samples):
            x = grid.random_point(rng)
            base.counter.reset()
            lc.color(x)
            counts.append(base.counter.value)
        mean = _F(sum(counts), len(counts))
        rows.append((k, args.n, mean, max(counts)))
    return rows


def _linear_fit(points):
    """Least-squares line through (x, y) pairs, in exact arithmetic."""
    n = len(points)
    sx = sum(p[0] for p in points)
    sy = sum(p[1] for p in points)
    sxx = sum(p[0] * p[0] for p in points)
    sxy = sum(p[0] * p[1] for p in points)
    denom = _F(n * sxx - sx * sx)
    if denom == 0:
        return _F(0), _F(sy, n)
    slope = _F(n * sxy - sx * sy) / denom
    intercept = (_F(sy) - slope * sx) / n
    return slope, intercept


def cmd_bench_queries(args):
    rows = _measure_queries(args)
    csv_rows = [("k", "n", "queries_per_eval_mean", "queries_per_eval_max")]
    for k, n, mean, peak in rows:
        csv_rows.append((k, n, float(mean), peak))
    if args.csv:
        _write_csv(csv_rows, args.csv)
    slope, intercept = _linear_fit([(k, mean) for k, _, mean, _ in rows])
    tolerance = _F(1, 10)
    ok = True
    worst = _F(0)
    for k, _, mean, _ in rows:
        fit = slope * k + intercept
        err = abs(mean - fit)
        rel = err / mean if mean else _F(0)
        worst = max(worst, rel)
        if rel > tolerance:
            ok = False
    single = _single_core_eval_queries(args)
    _dump(
        {
            "rows": [
                {"k": k, "n": n, "mean": float(mean), "max": peak}
                for k, n, mean, peak in rows
            ],
            "fit": {"slope": float(slope), "intercept": float(intercept)},
            "max_relative_deviation": float(worst),
            "linear_within_tolerance": ok,
            "core_eval_queries": single,
        },
        args.out,
    )
    return 0 if ok and single == 1 else 1


def _single_core_eval_queries(args) -> int:
    base = _base_from_args(args)
    cell = base.cell
    x2 = _F(2, 5) + cell / 2
    x3 = _F(1, 10) + cell / 2
    base.rect.counter.reset()
    base.color(SimplexPoint((1 - x2 - x3, x2, x3)))
    return base.rect.counter.value


# -- pipeline ------------------------------------------------------------------


def _witness_targets(base, rng, spread_num, spread_den):
    sol = base.rect.planted
    w = base.cell
    jx = _F(2, 5) + w * (sol.x + 1)
    jy = _F(1, 10) + w * (sol.y + 1)
    dx = w * spread_num / spread_den
    dy = w * rng.randrange(1, spread_den // 4 + 1) / spread_den
    candidates = [
        (sol.x, sol.y, jx - dx, jy - dy),
        (sol.x + 1, sol.y, jx + dx, jy - dy),
        (sol.x, sol.y + 1, jx - dx, jy + dy),
        (sol.x + 1, sol.y + 1, jx + dx, jy + dy),
    ]
    chosen = {}
    for a, b, y2, y3 in candidates:
        color = base.rect.color(a, b)
        chosen.setdefault(color, SimplexPoint((1 - y2 - y3, y2, y3)))
    if len(chosen) != 3:
        raise RuntimeError("planted junction is not trichromatic")
    return tuple(chosen[c] for c in sorted(chosen))


def cmd_pipeline(args):
    if args.n < 3 or args.k < 2:
        raise ValueError("pipeline configs need n >= 3 and k >= 2")
    base = _base_from_args(args)
    lc = lift.LiftedColoring(base, args.k, args.mode)
    if args.corrupt:
        violations = lift.validate_sperner_condition(
            lc, m=3, boundary_only=True, color_fn=lift.corrupt_coloring(lc)
        )
        _dump({"all_verified": False, "violations": violations}, args.out)
        return 1
    rng = random.Random(args.seed)
    report = {
        "mode": args.mode,
        "k": args.k,
        "n": args.n,
        "kind": args.kind,
        "seed": args.seed,
        "planted_cell": base.rect.planted.to_json(),
        "witness_triples": [],
        "outcomes": [],
    }
    all_verified = True
    for index in range(args.witnesses):
        spread_den = 64
        spread_num = rng.randrange(1, spread_den // 4 + 1)
        targets = _witness_targets(base, rng, spread_num, spread_den)
        witnesses = lift.build_witness(lc, targets)
        outcome = recovery.recover(lc, witnesses)
        entry = outcome.to_json()
        if isinstance(outcome, recovery.RecoveryOutcome):
            verified = recovery.verify_base_solution(base, outcome.triple)
            cell = recovery.rect_cell_of_triple(base, outcome.triple)
            entry["verified"] = verified
            entry["rect_cell"] = cell.to_json()
            entry["rect_cell_trichromatic"] = (
                len(base.rect.cell_colors(cell.x, cell.y)) == 3
            )
            all_verified = all_verified and verified and entry["rect_cell_trichromatic"]
        else:
            all_verified = False
        report["witness_triples"].append([p.to_json() for p in witnesses])
        report["outcomes"].append(entry)
    report["all_verified"] = all_verified
    _dump(report, args.out)
    return 0 if all_verified else 1


# -- plot ---------------------------------------------------------------------


def cmd_plot(args):
    import csv as csv_module

    with open(args.csv) as fh:
        reader = csv_module.reader(fh)
        header = next(reader)
        rows = [row for row in reader]
    xs = [float(row[0]) for row in rows]
    ys = [float(row[2]) for row in rows]
    svg = _line_chart_svg(xs, ys, header[0], header[2])
    with open(args.out, "w") as fh:
        fh.write(svg)
    print(f"wrote {args.out}")
    return 0


def _line_chart_svg(xs, ys, xlabel, ylabel, width=480, height=320, margin=48):
    if not xs:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = 0.0, max(ys) * 1.1 or 1.0
    span_x = (x_hi - x_lo) or 1.0
    span_y = (y_hi - y_lo) or 1.0

    def sx(v):
        return margin + (v - x_lo) / span_x * (width - 2 * margin)

    def sy(v):
        return height - margin - (v - y_lo) / span_y * (height - 2 * margin)

    points = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(xs, ys))
    dots = "".join(
        f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="#2a6"/>'
        for x, y in zip(xs, ys)
    )
    return f"""<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">
<rect width="{width}" height="{height}" fill="white"/>
<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>
<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>
<polyline points="{points}" fill="none" stroke="#2a6" stroke-width="2"/>
{dots}
<text x="{width // 2}" y="{height - 12}" text-anchor="middle" font-size="12">{xlabel}</text>
<text x="14" y="{height // 2}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {height // 2})">{ylabel}</text>
</svg>
"""


def _write_csv(rows, path):
    import csv as csv_module

    with open(path, "w", newline="") as fh:
        writer = csv_module.writer(fh)
        writer.writerows(rows)


# -- parser wiring ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sperner-forge",
        description="Approximate Sperner instances, recovery, and cake-cutting checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rect = sub.add_parser("rect", help="rectangular grid instances").add_subparsers(
        dest="subcommand", required=True
    )
    p = rect.add_parser("gen")
    _add_rect_options(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rect_gen)
    p = rect.add_parser("validate")
    _add_rect_options(p, with_table=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rect_validate)
    p = rect.add_parser("solve")
    _add_rect_options(p, with_table=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rect_solve)

    base = sub.add_parser("base", help="the continuous 2-simplex coloring").add_subparsers(
        dest="subcommand", required=True
    )
    p = base.add_parser("eval")
    _add_rect_options(p)
    p.add_argument("--point", required=True, help='comma list, e.g. "1/2,1/4,1/4"')
    p.add_argument("--out")
    p.set_defaults(func=cmd_base_eval)
    p = base.add_parser("probe")
    _add_rect_options(p)
    p.add_argument("--point", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_base_probe)

    lift_cmd = sub.add_parser("lift", help="lifted high-dimensional colorings").add_subparsers(
        dest="subcommand", required=True
    )
    p = lift_cmd.add_parser("eval")
    _add_lift_options(p)
    p.add_argument("--point", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lift_eval)
    p = lift_cmd.add_parser("trace")
    _add_lift_options(p)
    p.add_argument("--point", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lift_trace)
    p = lift_cmd.add_parser("check-sperner")
    _add_lift_options(p)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--boundary-only", action="store_true")
    p.add_argument("--corrupt", action="store_true", help="plant a bug (self-test)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lift_check_sperner)
    p = lift_cmd.add_parser("check-symmetry")
    _add_lift_options(p)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lift_check_symmetry)

    p = sub.add_parser("recover", help="map a lifted triple back to a 2D solution")
    _add_lift_options(p)
    p.add_argument("--triple", required=True, help='JSON file with {"triple": [...]}, or -')
    p.add_argument("--out")
    p.set_defaults(func=cmd_recover)

    cake_cmd = sub.add_parser("cake", help="cake-cutting checks").add_subparsers(
        dest="subcommand", required=True
    )
    p = cake_cmd.add_parser("check")
    _add_lift_options(p)
    p.add_argument("--m", type=int, default=3, help="utility grid exponent")
    p.add_argument("--input", required=True, help="JSON payload file, or -")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cake_check)
    p = cake_cmd.add_parser("audit")
    _add_lift_options(p)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--csv", default="cake_audit.csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cake_audit)

    bench = sub.add_parser("bench", help="query-count benchmarking").add_subparsers(
        dest="subcommand", required=True
    )
    p = bench.add_parser("queries")
    _add_rect_options(p)
    p.add_argument("--mode", choices=(lift.WARMUP, lift.SYMMETRIC), default=lift.SYMMETRIC)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--samples", type=int, default=40)
    p.add_argument("--grid-m", type=int, default=7)
    p.add_argument("--csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench_queries)

    p = sub.add_parser("pipeline", help="instance -> witnesses -> recovery -> verify")
    _add_lift_options(p)
    p.add_argument("--witnesses", type=int, default=5)
    p.add_argument("--corrupt", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("plot", help="SVG line chart from a benchmark CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # noqa: BLE001 - single reporting funnel
        json.dump(
            {"error": type(exc).__name__, "message": str(exc)},
            sys.stderr,
            sort_keys=True,
        )
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
