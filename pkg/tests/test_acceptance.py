"""Acceptance criteria 1-10, each at its stated tolerance.

Run under pytest (one PASS/FAIL line per criterion is written to the
terminal) or directly with ``python3 tests/test_acceptance.py``.
"""
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from conftest import config_for
from parsers import read_json, read_obj, read_svg

from flatklein.analysis import checks
from flatklein.analysis.intersections import intersection_closed_form
from flatklein.analysis.report import verify_all
from flatklein.atlas import FigureConfig, Orientability, build_atlas, exceptional_sets, handedness_flips, orientability
from flatklein.crease import curvature_condition
from flatklein.cli import main as cli_main
from flatklein.fileio import PatternStyle, write_mesh, write_pattern, write_report
from flatklein.meshing import crease_straddles, distortion_series, quotient_topology, tessellate

SCALE = 30.0


def atlas_for(n):
    return build_atlas(config_for(n))


def criterion_1():
    notes = []
    ok = True
    for n in (3, 4, 5):
        atlas = atlas_for(n)
        an = checks.metric_residual(atlas, 10_000, "analytic", tolerance=1e-12)
        fd = checks.metric_residual(atlas, 10_000, "finite_difference", tolerance=1e-6)
        scaled = checks.metric_residual(checks.ScaledMap(atlas, 1.01), 10_000, "analytic", tolerance=1e-12)
        ok &= an.passed and fd.passed and not scaled.passed
        notes.append(f"n={n} analytic {an.max_residual:.1e} fd {fd.max_residual:.1e} scaled {scaled.max_residual:.4f}")
    return ok, "; ".join(notes)


def criterion_2():
    worst_c = worst_b = 0.0
    for n in (3, 4, 5, 6):
        atlas = atlas_for(n)
        worst_c = max(worst_c, checks.crease_continuity(atlas).max_residual)
        worst_b = max(worst_b, checks.strip_boundary_continuity(atlas).max_residual)
    return worst_c < 1e-12 and worst_b < 1e-9, f"crease {worst_c:.1e}, strip boundary {worst_b:.1e}"


def criterion_3():
    ok = True
    notes = []
    for n in (3, 4, 5, 6):
        atlas = atlas_for(n)
        vert = checks.vertical_identification(atlas, tolerance=1e-12)
        horiz = checks.horizontal_identification(atlas, tolerance=1e-9)
        ok &= vert.passed and horiz.passed and horiz.name.endswith("klein" if n % 2 else "torus")
        notes.append(f"n={n} {horiz.name.rsplit('_', 1)[1]} {max(vert.max_residual, horiz.max_residual):.1e}")
    atlas = atlas_for(3)
    dropped = checks.horizontal_identification(atlas, flip=1.0, tolerance=1e-9)
    ok &= not dropped.passed
    notes.append(f"n=3 without mirror {dropped.max_residual:.3f}")
    return ok, "; ".join(notes)


def criterion_4():
    ok = True
    notes = []
    for n in (3, 4, 5, 6):
        flips = handedness_flips(atlas_for(n))
        kind = orientability(config_for(n))
        expected = Orientability.NON_ORIENTABLE if n % 2 else Orientability.ORIENTABLE
        ok &= flips == n and kind is expected
        notes.append(f"n={n} {flips} flips {kind.value}")
    return ok, "; ".join(notes)


def criterion_5():
    cfg = FigureConfig(n=3)
    u = np.linspace(-math.pi * cfg.r, math.pi * cfg.r, 1000)
    k_img, k_dom = curvature_condition(cfg.elbow, u)
    margin = float(np.min(k_img - k_dom))
    return margin > 0.0, f"min(kappa_image - kappa_domain) = {margin:.4f}"


def criterion_6():
    atlas = atlas_for(3)
    scan = checks.injectivity_scan(atlas, 100_000)
    refined = checks.refined_injectivity_scan(atlas, 100_000)
    oracle = checks.intersection_oracle_agreement(atlas, tolerance=1e-6)
    ok = scan.passed and refined.passed and oracle.passed
    return ok, (f"scan: {scan.notes}; refined: {refined.notes}, worst {refined.max_residual:.1e}; "
                f"oracle Hausdorff {oracle.max_residual:.1e}")


def criterion_7():
    ok = True
    notes = []
    for n in (3, 4, 5):
        atlas = atlas_for(n)
        points = exceptional_sets(atlas).inflection_points
        dihedral = max(abs(p.dihedral - math.pi) for p in points)
        cones = checks.cone_angle_checks(atlas, tolerance=1e-4, eps_factor=1e-3)
        ok &= len(points) == 2 * n and dihedral < 1e-9 and all(c.passed for c in cones)
        notes.append(f"n={n} {len(points)} points, dihedral {dihedral:.1e}, cone "
                     f"{max(c.max_residual for c in cones):.1e}")
    return ok, "; ".join(notes)


def criterion_8():
    atlas = atlas_for(3)
    cfg = atlas.config
    crease_amp = exceptional_sets(atlas).crease_curves[0].amplitude / cfg.r
    cut_amp = intersection_closed_form(atlas, 0).preimage_amplitude / cfg.r
    verts = atlas.vertices()
    edges = np.linalg.norm(np.roll(verts, -1, axis=0) - verts, axis=1)
    edge_err = float(np.max(np.abs(edges - cfg.s)))
    ok = abs(crease_amp - 0.577) <= 0.001 and abs(cut_amp - 1.732) <= 0.001 and edge_err < 1e-9
    return ok, f"crease {crease_amp:.4f}, cut {cut_amp:.4f}, triangle edge error {edge_err:.1e}"


def criterion_9():
    atlas = atlas_for(3)
    fine = tessellate(atlas, 256, 64)
    straddles = crease_straddles(fine)
    series = distortion_series(atlas)
    ok = straddles == 0 and series.max_distortion < 1e-3 and all(r >= 3.5 for r in series.ratios)
    notes = [f"straddles {straddles}", "distortion " + ", ".join(f"{d:.1e}" for d in series.series),
             "ratios " + ", ".join(f"{r:.2f}" for r in series.ratios)]
    for n in (3, 4, 5, 6):
        topo = quotient_topology(tessellate(atlas_for(n), 64, 16))
        ok &= topo.euler == 0 and topo.closed and topo.orientable == (n % 2 == 0)
        notes.append(f"n={n} chi {topo.euler} {'orientable' if topo.orientable else 'non-orientable'}")
    return ok, "; ".join(notes)


def criterion_10():
    atlas = atlas_for(3)
    ok = True
    notes = []
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        mesh = tessellate(atlas, 64, 16)
        write_mesh(mesh, tmp / "a.obj")
        write_mesh(tessellate(atlas, 64, 16), tmp / "b.obj")
        report = verify_all(FigureConfig(n=3), scan_samples=20_000)
        write_report(report, tmp / "a.json")
        write_report(verify_all(FigureConfig(n=3), scan_samples=20_000), tmp / "b.json")
        creases = exceptional_sets(atlas).crease_curves
        cuts = [a for k in range(3) for a in intersection_closed_form(atlas, k).incoming]
        style = PatternStyle(scale=SCALE)
        write_pattern(atlas.domain, creases, cuts, style, tmp / "a.svg")
        write_pattern(atlas.domain, creases, cuts, style, tmp / "b.svg")
        same = all((tmp / f"a.{x}").read_bytes() == (tmp / f"b.{x}").read_bytes() for x in ("obj", "json", "svg"))
        ok &= same
        notes.append(f"deterministic {same}")

        verts, _, faces, _ = read_obj(tmp / "a.obj")
        mesh_ok = np.allclose(verts, mesh.vertices, atol=1e-11) and np.array_equal(faces, mesh.triangles)
        data = read_json(tmp / "a.json")
        report_ok = data["overall_pass"] is True and len(data["checks"]) == len(report.checks)
        ok &= mesh_ok and report_ok
        notes.append(f"round trip mesh {mesh_ok} report {report_ok}")

        svg = read_svg(tmp / "a.svg")
        dims = [svg["width"] / (2 * math.pi * SCALE), svg["height"] / (3 * 2.0 * SCALE)]
        crease_amp = max(0.5 * (p[:, 1].max() - p[:, 1].min()) for p in svg["polylines"]["crease"]) / SCALE
        cut_amp = max(np.max(np.abs(p[:, 1] - p[0, 1])) for p in svg["polylines"]["cut"]
                      if abs(p[0, 1] - p[-1, 1]) < 1e-3) / SCALE
        geom = (all(abs(d - 1.0) < 1e-3 for d in dims)
                and abs(crease_amp - 1.0 / math.sqrt(3.0)) < 1e-3 * crease_amp
                and abs(cut_amp - math.sqrt(3.0)) < 1e-3 * cut_amp)
        ok &= geom
        notes.append(f"pattern size ratios {dims[0]:.5f}/{dims[1]:.5f}, crease {crease_amp:.4f}, cut {cut_amp:.4f}")

        codes = {
            "verify": cli_main(["verify", "--quiet"]),
            "usage": cli_main(["frobnicate"]),
            "config": cli_main(["verify", "--n", "2", "--quiet"]),
            "io": cli_main(["build", "--out", str(tmp / "none" / "x.obj")]),
        }
        ok &= codes == {"verify": 0, "usage": 2, "config": 3, "io": 1}
        notes.append("exit codes " + " ".join(f"{k}={v}" for k, v in codes.items()))
    return ok, "; ".join(notes)


CRITERIA = {
    1: ("flatness", criterion_1),
    2: ("continuity", criterion_2),
    3: ("closure and identifications", criterion_3),
    4: ("orientability", criterion_4),
    5: ("curvature condition", criterion_5),
    6: ("injectivity locus", criterion_6),
    7: ("exceptional points", criterion_7),
    8: ("geometry anchors", criterion_8),
    9: ("mesh", criterion_9),
    10: ("i/o", criterion_10),
}


def run(number):
    name, fn = CRITERIA[number]
    ok, detail = fn()
    line = f"criterion {number:>2} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = run(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run(k) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
