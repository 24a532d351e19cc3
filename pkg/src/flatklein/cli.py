"""Command-line entry point.

Exit codes: 0 success, 1 failed verification or runtime error, 2 usage
error, 3 invalid configuration.
"""
from __future__ import annotations

import argparse
import sys

from .analysis.checks import Tolerances
from .analysis.intersections import hausdorff_to_curve, intersection_closed_form, intersection_oracle, split_by_plane
from .analysis.report import verify_all
from .atlas import FigureConfig, build_atlas, exceptional_sets
from .errors import ConfigurationError, FlatKleinError, PolicyError
from .fileio import PatternStyle, write_mesh, write_pattern, write_report
from .meshing import DEFAULT_POLICY, cut_slits, slit_sides, tessellate

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _figure_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=3, help="polygon sides (default 3)")
    p.add_argument("--radius", type=float, default=1.0, help="cylinder radius r (default 1.0)")
    p.add_argument("--strip-height", type=float, default=2.0, help="strip height s (default 2.0)")


def _grid(text: str) -> tuple[int, int]:
    try:
        if "x" in text:
            a, b = text.lower().split("x", 1)
            return int(a), int(b)
        k = int(text)
        return k, k
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be N or NxM, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flatklein", description="Flat Klein bottle and torus figures from folded cylinders.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="triangulate the figure and write an OBJ mesh")
    _figure_args(b)
    b.add_argument("--res-u", type=int, default=64)
    b.add_argument("--res-v", type=int, default=16, help="rows per strip")
    b.add_argument("--slits", nargs="?", const=DEFAULT_POLICY, default=None,
                   help="open slits along the pass-through curves (incoming, outgoing or alternate)")
    b.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="check every geometric property and write a JSON report")
    _figure_args(v)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol-analytic", type=float, default=Tolerances.analytic)
    v.add_argument("--tol-chain", type=float, default=Tolerances.chain)
    v.add_argument("--tol-fd", type=float, default=Tolerances.fd)
    v.add_argument("--report", default=None)
    v.add_argument("--quiet", action="store_true")

    p = sub.add_parser("pattern", help="write the printable crease pattern as SVG")
    _figure_args(p)
    p.add_argument("--scale", type=float, default=30.0, help="document units per unit length")
    p.add_argument("--grid", type=_grid, default=(12, 12), help="grid cells, N or NxM")
    p.add_argument("--slits", default=DEFAULT_POLICY, help="which tube is cut at each joint")
    p.add_argument("--no-glyphs", action="store_true")
    p.add_argument("--out", required=True)

    i = sub.add_parser("intersect", help="pass-through curve of one joint as JSON")
    _figure_args(i)
    i.add_argument("--pair", type=int, default=0)
    i.add_argument("--oracle", action="store_true", help="also run the brute-force oracle")
    i.add_argument("--grid-n", type=int, default=256)
    i.add_argument("--samples", type=int, default=64)
    i.add_argument("--out", required=True)
    return parser


def _config(args) -> FigureConfig:
    return FigureConfig(n=args.n, r=args.radius, s=args.strip_height)


def _cmd_build(args) -> int:
    atlas = build_atlas(_config(args))
    mesh = tessellate(atlas, args.res_u, args.res_v)
    if args.slits is not None:
        curves = [intersection_closed_form(atlas, k) for k in range(atlas.config.n)]
        mesh = cut_slits(mesh, curves, args.slits)
    write_mesh(mesh, args.out)
    print(f"wrote {args.out}: {mesh.n_vertices} vertices, {mesh.n_triangles} triangles, "
          f"{mesh.metadata.get('slits', 0)} slits")
    return EXIT_OK


def _cmd_verify(args) -> int:
    tol = Tolerances(analytic=args.tol_analytic, chain=args.tol_chain, fd=args.tol_fd)
    report = verify_all(_config(args), tol, seed=args.seed)
    if args.report:
        write_report(report, args.report)
    if not args.quiet:
        print(report.summary())
    return EXIT_OK if report.overall_pass else EXIT_FAILED


def _cmd_pattern(args) -> int:
    cfg = _config(args)
    atlas = build_atlas(cfg)
    sides = slit_sides(cfg.n, args.slits)
    cuts = []
    for k in range(cfg.n):
        cuts.extend(intersection_closed_form(atlas, k).arcs(sides[k]))
    style = PatternStyle(scale=args.scale, grid_cells_u=args.grid[0], grid_cells_v=args.grid[1],
                         glyphs=not args.no_glyphs)
    write_pattern(atlas.domain, exceptional_sets(atlas).crease_curves, cuts, style, args.out)
    print(f"wrote {args.out}: {cfg.n} creases, {len(cuts)} cut arcs")
    return EXIT_OK


def _arc_dict(arc) -> dict:
    return {"u_start": arc.u_start, "u_end": arc.u_end, "offset": arc.offset, "amplitude": arc.amplitude}


def _cmd_intersect(args) -> int:
    cfg = _config(args)
    if not 0 <= args.pair < cfg.n:
        raise _UsageError(f"--pair must be in 0..{cfg.n - 1} (adjacent pairs only)")
    atlas = build_atlas(cfg)
    curve = intersection_closed_form(atlas, args.pair)
    out = {
        "config": {"n": cfg.n, "r": cfg.r, "s": cfg.s},
        "pair": args.pair,
        "vertex": curve.vertex.tolist(),
        "plane_normal": curve.plane_normal.tolist(),
        "preimage_amplitude": curve.preimage_amplitude,
        "incoming_arcs": [_arc_dict(a) for a in curve.incoming],
        "outgoing_arcs": [_arc_dict(a) for a in curve.outgoing],
        "image_samples": curve.sample_image(args.samples).tolist(),
    }
    if args.oracle:
        oracle = intersection_oracle(atlas, args.pair, args.grid_n)
        label = split_by_plane(oracle.points, curve.vertex, curve.fold_normal, curve.plane_normal)
        pts = oracle.points[label == 1]
        out["oracle"] = {"grid_n": args.grid_n, "points": int(len(pts)),
                         "hausdorff": hausdorff_to_curve(pts, curve)}
    write_report(out, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


class _UsageError(Exception):
    pass


COMMANDS = {"build": _cmd_build, "verify": _cmd_verify, "pattern": _cmd_pattern, "intersect": _cmd_intersect}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"flatklein: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, PolicyError) as exc:
        print(f"flatklein: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FlatKleinError, OSError) as exc:
        print(f"flatklein: error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
