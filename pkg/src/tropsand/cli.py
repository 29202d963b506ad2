"""Command-line entry point: ``tropsand {solve,sandpile,compare,experiment,render}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .core.series import TropicalSeries, parse_point
from .errors import InputError, TropsandError

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read_points(args) -> list:
    texts = []
    for chunk in args.points or []:
        texts.extend(t for t in chunk.split(";") if t.strip())
    if args.points_file:
        try:
            lines = Path(args.points_file).read_text().splitlines()
        except OSError as exc:
            raise InputError(f"cannot read points file: {exc}") from exc
        for line in lines:
            line = line.split("#", 1)[0].strip()
            if line:
                texts.append(line.replace(" ", ""))
    return [parse_point(t) for t in texts]


def _emit(args, name: str, payload, binary: bool = False):
    """Write to --out-dir/name if given, else text payloads go to stdout."""
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / name
        if binary:
            path.write_bytes(payload)
        else:
            path.write_text(payload)
    elif not binary:
        sys.stdout.write(payload if payload.endswith("\n") else payload + "\n")


def _cmd_solve(args):
    from .gp import solve_gp
    from .render import RenderSpec, render_svg

    points = _read_points(args)
    f, trace = solve_gp(points, max_passes=args.max_passes)
    if args.format == "svg":
        _emit(args, "curve.svg", render_svg(f, points, RenderSpec(canvas=args.canvas)))
    else:
        _emit(args, "series.json", f.to_json(indent=2))
    if args.verbose:
        sys.stderr.write(json.dumps(trace.to_dict(), indent=2) + "\n")


def _cmd_sandpile(args):
    from .sandpile import compare_with_exact, relax, tropical_state
    from .gp import solve_gp

    points = _read_points(args)
    stable = relax(tropical_state(args.s, points), policy=args.policy)
    if args.out_dir:
        _emit(args, "state.pgm", stable.to_pgm(), binary=True)
        _emit(args, "topplings.u32", stable.topplings_bytes(), binary=True)
    if args.format == "pgm" and not args.out_dir:
        sys.stdout.buffer.write(stable.to_pgm())
        return
    f, _ = solve_gp(points, max_passes=args.max_passes)
    report = compare_with_exact(f, stable, radius=args.radius)
    _emit(args, "deviation.json", report.to_json())


def _cmd_compare(args):
    from .gp import solve_gp
    from .sandpile import compare_with_exact, relax, tropical_state

    points = _read_points(args)
    f, _ = solve_gp(points, max_passes=args.max_passes)
    stable = relax(tropical_state(args.s, points), policy=args.policy)
    _emit(args, "compare.json", compare_with_exact(f, stable, radius=args.radius).to_json())


def _cmd_experiment(args):
    from .experiments import aggregates_to_json, parse_config, records_to_csv, sweep

    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise InputError(f"cannot read config: {exc}") from exc
        cfg = parse_config(text)
    else:
        if args.s is None or args.n is None:
            raise InputError("experiment needs --config or both --s and --n")
        cfg = {"s": [args.s], "n": [args.n], "trials": args.trials or 1}
    trials = args.trials or cfg["trials"]
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    jobs = args.jobs or cfg.get("jobs", 1)
    max_passes = args.max_passes or cfg.get("max_passes")
    timing = args.timing or cfg.get("timing", False)
    grid = [(s, n) for s in cfg["s"] for n in cfg["n"]]
    records, aggregates = sweep(grid, trials, seed, jobs, extended=cfg.get("extended", False),
                                timing=timing, max_passes=max_passes)
    csv_text = records_to_csv(records)
    json_text = aggregates_to_json(aggregates, {"base_seed": seed, "trials": trials})
    if args.out_dir:
        _emit(args, "trials.csv", csv_text)
        _emit(args, "aggregate.json", json_text)
    elif args.format == "json":
        sys.stdout.write(json_text + "\n")
    else:
        sys.stdout.write(csv_text)
    failed = sum(1 for r in records if r.error)
    if failed:
        logging.getLogger(__name__).warning("%d of %d trials failed", failed, len(records))


def _cmd_render(args):
    from .render import RenderSpec, render_svg

    try:
        text = Path(args.series).read_text()
    except OSError as exc:
        raise InputError(f"cannot read series: {exc}") from exc
    f = TropicalSeries.from_json(text)
    points = _read_points(args)
    spec = RenderSpec(canvas=args.canvas, face_mode=args.faces)
    _emit(args, "curve.svg", render_svg(f, points, spec))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tropsand", description=__doc__)
    parser.add_argument("--verbose", action="store_true", help="debug logging and solver traces")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, points=True):
        p.add_argument("--out-dir", help="write output files here instead of stdout")
        p.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)
        p.add_argument("--max-passes", type=int, default=None)
        if points:
            p.add_argument("--points", action="append",
                           help="point 'x,y' with rational coordinates (repeatable, ';'-separated)")
            p.add_argument("--points-file", help="file with one 'x,y' point per line")

    p = sub.add_parser("solve", help="compute G_P 0 for a point set")
    common(p)
    p.add_argument("--format", choices=["json", "svg"], default="json")
    p.add_argument("--canvas", type=int, default=512)
    p.set_defaults(func=_cmd_solve)

    for name, func, helptext in (("sandpile", _cmd_sandpile, "relax 3 + sum of deltas at P"),
                                 ("compare", _cmd_compare, "sandpile vs exact curve report")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--s", type=int, required=True)
        p.add_argument("--policy", choices=["queue", "stack", "parallel", "scan"], default="queue")
        p.add_argument("--radius", type=int, default=3)
        if name == "sandpile":
            p.add_argument("--format", choices=["json", "pgm"], default="json")
        p.set_defaults(func=func)

    p = sub.add_parser("experiment", help="seeded Monte Carlo sweep")
    common(p, points=False)
    p.add_argument("--config")
    p.add_argument("--s", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--timing", action="store_true", help="record wall time per trial (breaks byte-identity)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("render", help="series JSON to SVG")
    common(p)
    p.add_argument("series")
    p.add_argument("--canvas", type=int, default=512)
    p.add_argument("--faces", choices=["none", "exponent", "genus"], default="none")
    p.add_argument("--format", choices=["svg"], default="svg")
    p.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except TropsandError as exc:
        sys.stderr.write(f"solver error: {exc}\n")
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
