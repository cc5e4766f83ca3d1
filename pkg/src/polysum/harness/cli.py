"""``polysum`` command line.

Exit status: 0 on success, 1 when a verification check fails, 2 on usage or
input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .. import polyhedron
from ..errors import PolysumError
from ..polyhedron import StandardFormSystem, adjacency_graph, enumerate_vertices
from ..ratmat import format_rational
from ..threesum import ThreeSumInstance, band_x3, poly_three_sum
from ..twosum import TwoSumInstance, band_x, connect, connect_unit, decompose, poly_two_sum
from . import io as jio
from .campaign import CampaignConfig, jsonl, run_campaign, summarize, summary_csv
from .generate import KINDS, GeneratorConfig, generate
from .verify import failed, verify, verify_walk

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
GLOBAL_DEFAULTS = {"cap": None, "quiet": False, "json": False}


def _system(inst) -> StandardFormSystem:
    return inst if isinstance(inst, StandardFormSystem) else inst.system


class Printer:
    def __init__(self, as_json: bool, quiet: bool):
        self.as_json, self.quiet = as_json, quiet

    def emit(self, doc, text: str) -> None:
        if self.as_json:
            print(json.dumps(doc, indent=2, sort_keys=True))
        elif not self.quiet:
            print(text)


def _vertex(inst, i: int):
    verts = enumerate_vertices(_system(inst))
    if not 0 <= i < len(verts):
        raise PolysumError(f"vertex index {i} out of range (instance has {len(verts)} vertices)")
    return verts[i].coords


def _fmt(point) -> str:
    return "(" + ", ".join(format_rational(v) for v in point) + ")"


def cmd_vertices(args, out: Printer) -> int:
    inst = jio.load_instance(args.file)
    g = adjacency_graph(_system(inst))
    doc = {"vertices": [jio.point_to_json(v.coords) for v in g.vertices],
           "supports": [list(v.support) for v in g.vertices],
           "edges": [list(e) for e in sorted(g.edges)]}
    lines = [f"{i}: {_fmt(v.coords)}" for i, v in enumerate(g.vertices)]
    out.emit(doc, "\n".join(lines + [f"{len(g.vertices)} vertices, {len(g.edges)} edges"]))
    return EXIT_OK


def cmd_diameter(args, out: Printer) -> int:
    inst = jio.load_instance(args.file)
    d = polyhedron.diameter(_system(inst))
    value = None if d == polyhedron.INFINITY else d
    out.emit({"diameter": value}, "disconnected" if value is None else str(value))
    return EXIT_OK


def _write(doc, path, out: Printer, what: str) -> None:
    if path:
        jio.save_json(doc, path)
        if not out.quiet and not out.as_json:
            print(f"wrote {what} to {path}")
    if out.as_json or not path:
        print(json.dumps(doc, indent=2, sort_keys=True))


def _load_system(path) -> StandardFormSystem:
    inst = jio.load_instance(path)
    if not isinstance(inst, StandardFormSystem):
        raise PolysumError(f"{path}: expected a plain system with fields A and b")
    return inst


def cmd_twosum(args, out: Printer) -> int:
    inst = poly_two_sum(_load_system(args.P), _load_system(args.Q))
    _write(jio.two_sum_to_json(inst), args.output, out, "2-sum")
    return EXIT_OK


def cmd_threesum(args, out: Printer) -> int:
    inst = poly_three_sum(_load_system(args.P), _load_system(args.Q))
    _write(jio.three_sum_to_json(inst), args.output, out, "3-sum")
    return EXIT_OK


def cmd_decompose(args, out: Printer) -> int:
    inst = jio.load_instance(args.file)
    if not isinstance(inst, TwoSumInstance):
        raise PolysumError("decompose expects a 2-sum instance")
    P, Q = decompose(inst)
    doc = {"P": jio.system_to_json(P), "Q": jio.system_to_json(Q)}
    if args.output:
        stem = Path(args.output)
        jio.save_json(doc["P"], stem.with_name(stem.name + ".P.json"))
        jio.save_json(doc["Q"], stem.with_name(stem.name + ".Q.json"))
    out.emit(doc, json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_walk(args, out: Printer) -> int:
    inst = jio.load_instance(args.file)
    u, v = _vertex(inst, args.src), _vertex(inst, args.dst)
    doc_extra = {}
    if args.method == "oracle":
        g = adjacency_graph(_system(inst))
        walk = polyhedron.Walk.start(u)
        for k in g.shortest_path(g.index_of(u), g.index_of(v))[1:]:
            walk.push(g.vertices[k].coords, "oracle", "shortest_path")
    elif args.method == "theorem":
        if not isinstance(inst, TwoSumInstance):
            raise PolysumError("--method theorem needs a 2-sum instance")
        walk = connect(inst, u, v)
        if walk.perturbation:
            doc_extra = {"perturbation": format_rational(walk.perturbation),
                         "instance": jio.two_sum_to_json(walk.instance)}
    else:
        row = getattr(inst, "row", None)
        walk = connect_unit(_system(inst), u, v, row)
    doc = {**jio.walk_to_json(walk), **doc_extra}
    if args.output:
        jio.save_json(doc, args.output)
    text = "\n".join([_fmt(s) for s in walk.steps] + [f"length {walk.length}"])
    out.emit(doc, text)
    return EXIT_OK


def cmd_band(args, out: Printer) -> int:
    inst = jio.load_instance(args.file)
    p = _vertex(inst, args.vertex)
    if isinstance(inst, TwoSumInstance):
        band = band_x(inst, inst.split_point(p)[1])
        lo = None if band.lo is None else format_rational(band.lo)
        hi = None if band.hi is None else format_rational(band.hi)
        doc = {"lo": lo, "hi": hi, "support": list(band.support)}
        text = f"[{lo if lo is not None else '-inf'}, {hi if hi is not None else '+inf'}]"
    elif isinstance(inst, ThreeSumInstance):
        poly = band_x3(inst, inst.split_point(p)[1])
        doc = {"polygon": [jio.point_to_json(q) for q in poly.vertices_2d],
               "support": list(poly.support)}
        text = " ".join(_fmt(q) for q in poly.vertices_2d)
    else:
        raise PolysumError("band needs a 2-sum or 3-sum instance")
    out.emit(doc, text)
    return EXIT_OK


def _range(text: str) -> tuple:
    try:
        lo, _, hi = text.partition(":")
        return (int(lo), int(hi or lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def cmd_gen(args, out: Printer) -> int:
    cfg = GeneratorConfig(seed=args.seed, kind=args.kind, n_P=args.n_P, n_Q=args.n_Q,
                          m_P=args.m_P, m_Q=args.m_Q, entry_bound=args.entry_bound,
                          require_simple=not args.allow_degenerate,
                          require_both_categories=args.both_categories)
    inst = generate(cfg)
    doc = jio.instance_to_json(inst)
    if args.output:
        jio.save_json(doc, args.output)
    if out.as_json or not args.output:
        print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_verify(args, out: Printer) -> int:
    inst = jio.load_instance(args.file)
    if args.walk:
        doc = json.loads(Path(args.walk).read_text())
        walk = jio.walk_from_json(doc)
        target = jio.instance_from_json(doc["instance"]) if "instance" in doc else inst
        records = [verify_walk(target, walk)]
    else:
        checks = "all" if args.checks == "all" else [c.strip() for c in args.checks.split(",") if c.strip()]
        try:
            records = verify(inst, checks)
        except ValueError as exc:
            raise PolysumError(str(exc)) from None
    if args.report:
        Path(args.report).write_text(jsonl(records))
    bad = failed(records)
    text = "\n".join(f"{'PASS' if r['passed'] else ('INFO' if r.get('informational') else 'FAIL')} "
                     f"{r['check']} ({r['cases']} cases)" for r in records)
    out.emit(records, text)
    return EXIT_FAIL if bad else EXIT_OK


def cmd_campaign(args, out: Printer) -> int:
    counts = tuple((k, n) for k, n in ((k, getattr(args, k)) for k in KINDS) if n)
    records = run_campaign(CampaignConfig(seed=args.seed, counts=counts, workers=args.workers))
    if args.report:
        Path(args.report).write_text(jsonl(records))
    if args.csv:
        Path(args.csv).write_text(summary_csv(records))
    summary = summarize(records)
    text = "\n".join(f"{name}: {s['instances']} instances, {s['cases']} cases, "
                     f"{s['failed_instances']} failed" + (" (informational)" if s["informational"] else "")
                     for name, s in sorted(summary.items()))
    out.emit(summary, text)
    return EXIT_FAIL if failed(records) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand's copy of a flag from resetting one given earlier
    common.add_argument("--cap", type=int, default=argparse.SUPPRESS,
                        help="vertex enumeration column cap (default 18)")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="suppress normal output")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")

    p = argparse.ArgumentParser(prog="polysum", parents=[common],
                                description="Exact 2-sum / 3-sum polyhedron toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("vertices", parents=[common], help="list vertices and edges")
    s.add_argument("file")
    s.set_defaults(fn=cmd_vertices)

    s = sub.add_parser("diameter", parents=[common], help="combinatorial diameter")
    s.add_argument("file")
    s.set_defaults(fn=cmd_diameter)

    for name, fn in (("twosum", cmd_twosum), ("threesum", cmd_threesum)):
        s = sub.add_parser(name, parents=[common], help=f"build a {name[:-3]}-sum from two systems")
        s.add_argument("P")
        s.add_argument("Q")
        s.add_argument("-o", "--output")
        s.set_defaults(fn=fn)

    s = sub.add_parser("decompose", parents=[common], help="split a 2-sum into its summands")
    s.add_argument("file")
    s.add_argument("-o", "--output", help="write <output>.P.json and <output>.Q.json")
    s.set_defaults(fn=cmd_decompose)

    s = sub.add_parser("walk", parents=[common], help="edge walk between two vertices")
    s.add_argument("file")
    s.add_argument("--from", dest="src", type=int, required=True)
    s.add_argument("--to", dest="dst", type=int, required=True)
    s.add_argument("--method", choices=("oracle", "theorem", "unit"), default="oracle")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_walk)

    s = sub.add_parser("band", parents=[common], help="x-band of a vertex")
    s.add_argument("file")
    s.add_argument("--vertex", type=int, required=True)
    s.set_defaults(fn=cmd_band)

    s = sub.add_parser("gen", parents=[common], help="generate a random instance")
    s.add_argument("--kind", choices=KINDS, default="two_sum")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n-P", dest="n_P", type=_range, default=(3, 4))
    s.add_argument("--n-Q", dest="n_Q", type=_range, default=(3, 4))
    s.add_argument("--m-P", dest="m_P", type=_range, default=(1, 2))
    s.add_argument("--m-Q", dest="m_Q", type=_range, default=(1, 2))
    s.add_argument("--entry-bound", type=int, default=3)
    s.add_argument("--allow-degenerate", action="store_true")
    s.add_argument("--both-categories", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("verify", parents=[common], help="run verification checks")
    s.add_argument("file")
    s.add_argument("--checks", default="all", help="'all' or a comma-separated list")
    s.add_argument("--walk", help="check a walk file instead of running checks")
    s.add_argument("--report", help="write JSON lines here")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("campaign", parents=[common], help="verify many generated instances")
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--workers", type=int, default=1)
    for kind, count in (("two_sum", 200), ("unit_column", 200), ("three_sum", 100), ("product", 50)):
        s.add_argument(f"--{kind.replace('_', '-')}", dest=kind, type=int, default=count)
    s.add_argument("--report")
    s.add_argument("--csv")
    s.set_defaults(fn=cmd_campaign)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # not set_defaults: parent parsers share action objects, which would undo SUPPRESS
    for name, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, value)
    out = Printer(args.json, args.quiet)
    if args.cap is not None:
        polyhedron.set_enumeration_cap(args.cap)
    try:
        return args.fn(args, out)
    except (PolysumError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if args.cap is not None:
            polyhedron.set_enumeration_cap(polyhedron.DEFAULT_CAP)


if __name__ == "__main__":
    sys.exit(main())
