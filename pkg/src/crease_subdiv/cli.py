"""Command-line interface.

Subcommands: subdivide, validate, stats, analyze, trace-valence. Data goes
to files or stdout; progress and diagnostics go to stderr. Exit codes:
0 success, 1 invalid arguments, 2 input parse/validation failure,
3 tag/mesh mismatch, 4 analysis condition failure under --strict.
"""

import argparse
import json
import sys
from collections import Counter

from . import analysis
from .errors import (
    CreaseSubdivError,
    FaceIndexOutOfRange,
    MeshError,
    ParseError,
    TagMeshMismatch,
    TagUnknownEdge,
)
from .io import read_obj, read_obj_arrays, read_tags, write_obj, write_tags
from .mesh import TriMesh, euler_characteristic, validate_manifold
from .schemes import SchemeKind, SharpnessTags, subdivide
from .tagging import classify_edge, classify_vertices_arrays


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _ArgError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="crease-subdiv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("subdivide", help="refine a mesh")
    p.add_argument("--input", required=True)
    p.add_argument("--tags")
    p.add_argument("--scheme", choices=["sqrt3", "loop", "hybrid"], default="hybrid")
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--output", required=True)
    p.add_argument("--emit-tags", dest="emit_tags")
    p.add_argument("--no-boundary-crease", action="store_true")
    p.add_argument("--modified-odd-mask", action="store_true")

    p = sub.add_parser("validate", help="report mesh/tag violations")
    p.add_argument("--input", required=True)
    p.add_argument("--tags")

    p = sub.add_parser("stats", help="mesh statistics")
    p.add_argument("--input", required=True)
    p.add_argument("--tags")
    p.add_argument("--no-boundary-crease", action="store_true")

    p = sub.add_parser("analyze", help="local-matrix spectrum and checks")
    p.add_argument("--scheme", choices=["sqrt3", "loop"], required=True)
    p.add_argument("--valence", type=int, required=True)
    p.add_argument("--steps", type=int, choices=[1, 2])
    p.add_argument("--char-map", dest="char_map", type=int, metavar="R")
    p.add_argument("--char-map-out", dest="char_map_out", metavar="PATH")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("trace-valence", help="valence growth along creases")
    p.add_argument("--input", required=True)
    p.add_argument("--tags", required=True)
    p.add_argument("--levels", type=int, default=3)
    return parser


def _load_tags(path, mesh) -> SharpnessTags:
    if path is None:
        return SharpnessTags()
    return read_tags(path, mesh)


def _cmd_subdivide(args) -> int:
    mesh = read_obj(args.input)
    tags = _load_tags(args.tags, mesh)
    scheme = SchemeKind(args.scheme)
    if scheme is SchemeKind.SQRT3 and not tags.empty:
        print("subdivide: --scheme sqrt3 takes no tags (use hybrid)", file=sys.stderr)
        return 1
    if args.levels < 0:
        print("subdivide: --levels must be >= 0", file=sys.stderr)
        return 1
    records = subdivide(
        mesh,
        tags,
        scheme,
        args.levels,
        boundary_as_crease=not args.no_boundary_crease,
        modified_odd=args.modified_odd_mask,
    )
    final = records[-1]
    write_obj(final.mesh, args.output)
    if args.emit_tags:
        write_tags(final.tags, args.emit_tags)
    print(
        f"level {final.level}: {final.mesh.n_vertices} vertices, "
        f"{final.mesh.n_faces} faces -> {args.output}",
        file=sys.stderr,
    )
    return 0


def _cmd_validate(args) -> int:
    positions, faces = read_obj_arrays(args.input)
    report = validate_manifold(positions, faces)
    if not report.ok:
        for line in report.lines():
            print(line)
        return 2
    mesh = TriMesh(positions, faces)
    if args.tags:
        read_tags(args.tags, mesh)  # raises on mismatch
    print("ok")
    return 0


def _cmd_stats(args) -> int:
    mesh = read_obj(args.input)
    tags = _load_tags(args.tags, mesh)
    bac = not args.no_boundary_crease
    print(f"vertices: {mesh.n_vertices}")
    print(f"edges: {mesh.n_edges}")
    print(f"faces: {mesh.n_faces}")
    print(f"euler-characteristic: {euler_characteristic(mesh)}")
    print(f"boundary-edges: {int(mesh.boundary_edge_mask().sum())}")
    print(f"sharp-edges: {len(tags.sharp_edges)}")
    print(f"sharp-faces: {len(tags.sharp_faces)}")
    deg = mesh.vertex_degrees()
    hist = Counter(int(d) for d in deg)
    for valence in sorted(hist):
        print(f"valence[{valence}]: {hist[valence]}")
    kinds = Counter(k.value for k in classify_vertices_arrays(mesh, tags, bac))
    for name in sorted(kinds):
        print(f"vertex-class[{name}]: {kinds[name]}")
    edge_classes = Counter(
        classify_edge(mesh, tags, (int(a), int(b))).value for a, b in mesh.edges
    )
    for name in sorted(edge_classes):
        print(f"edge-class[{name}]: {edge_classes[name]}")
    n_sharp_faces = len(tags.sharp_faces)
    print(f"face-class[sharp]: {n_sharp_faces}")
    print(f"face-class[smooth]: {mesh.n_faces - n_sharp_faces}")
    return 0


def _cmd_analyze(args) -> int:
    scheme = SchemeKind(args.scheme)
    if scheme is SchemeKind.SQRT3 and args.steps == 1:
        print("analyze: the sqrt3 operator needs --steps 2", file=sys.stderr)
        return 1
    if args.valence < 3:
        print("analyze: --valence must be >= 3", file=sys.stderr)
        return 1
    if args.char_map is not None and args.char_map < 1:
        print("analyze: --char-map must be >= 1", file=sys.stderr)
        return 1
    report = analysis.analyze_scheme(
        scheme, args.valence, args.steps, char_map_resolution=args.char_map
    )
    if args.format == "json":
        print(json.dumps(analysis.report_tree(report), indent=2))
    else:
        print(analysis.report_text(report))
    if args.char_map_out and report.char_map is not None:
        with open(args.char_map_out, "w", encoding="utf-8") as fh:
            analysis.write_char_map_points(report.char_map, fh)
        print(f"char-map points -> {args.char_map_out}", file=sys.stderr)
    if args.strict:
        failed = not (report.ordering_check and report.tangent_check)
        if report.char_map is not None:
            failed = failed or not (report.char_map.regular and report.char_map.injective)
        if failed:
            return 4
    return 0


def _cmd_trace_valence(args) -> int:
    mesh = read_obj(args.input)
    tags = read_tags(args.tags, mesh)
    if not tags.sharp_edges:
        print("trace-valence: no sharp edges tagged", file=sys.stderr)
        return 1
    trace = analysis.valence_trace(mesh, tags, args.levels)
    print(f"levels: {trace.levels}")
    for row in trace.rows:
        vals = ",".join(str(v) for v in row.valences)
        esh = ",".join(str(v) for v in row.sharp_counts)
        res = ",".join(str(v) for v in row.residuals)
        print(
            f"{row.kind} v={row.vertex} first-level={row.first_level} "
            f"valence=[{vals}] sharp-count=[{esh}] residual=[{res}]"
        )
    print(f"max-abs-residual: {trace.max_abs_residual()}")
    return 0


_COMMANDS = {
    "subdivide": _cmd_subdivide,
    "validate": _cmd_validate,
    "stats": _cmd_stats,
    "analyze": _cmd_analyze,
    "trace-valence": _cmd_trace_valence,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgError:
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (TagUnknownEdge, FaceIndexOutOfRange, TagMeshMismatch) as exc:
        print(f"tag/mesh mismatch: {exc}", file=sys.stderr)
        return 3
    except (ParseError, MeshError, OSError, IndexError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except CreaseSubdivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
