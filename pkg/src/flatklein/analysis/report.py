"""Aggregate verification of a figure into a single report."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..atlas import FigureConfig, build_atlas, exceptional_sets, orientability
from . import checks
from .checks import CheckResult, Tolerances

CONE_RADII = (1e-2, 1e-3)


@dataclass(frozen=True)
class PointDiagnostic:
    domain_uv: tuple[float, float]
    image_xyz: tuple[float, float, float]
    dihedral: float
    cone_angle_at: dict

    def as_dict(self) -> dict:
        return {
            "domain_uv": [float(c) for c in self.domain_uv],
            "image_xyz": [float(c) for c in self.image_xyz],
            "dihedral": float(self.dihedral),
            "cone_angle_at": {k: float(v) for k, v in self.cone_angle_at.items()},
        }


@dataclass(frozen=True)
class VerificationReport:
    config: FigureConfig
    seed: int
    checks: list[CheckResult]
    exceptional_points: list[PointDiagnostic]
    orientability: str = ""
    renormalizations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "config": {
                "n": self.config.n,
                "r": float(self.config.r),
                "s": float(self.config.s),
                "seed": int(self.seed),
            },
            "checks": [c.as_dict() for c in self.checks],
            "exceptional_points": [p.as_dict() for p in self.exceptional_points],
            "overall_pass": self.overall_pass,
        }

    def summary(self) -> str:
        lines = [c.line() for c in self.checks]
        verdict = "PASS" if self.overall_pass else "FAIL"
        lines.append(f"overall: {verdict} (n={self.config.n}, {self.orientability})")
        return "\n".join(lines)


def exceptional_point_diagnostics(atlas) -> list[PointDiagnostic]:
    """Fold dihedral and measured cone angles at each inflection point; the
    cone angle there is reported, not asserted."""
    out = []
    r = atlas.config.r
    for p in exceptional_sets(atlas).inflection_points:
        cones = {f"{e:.0e}".replace("e-0", "e-"): checks.cone_angle(atlas, p.domain_uv, e * r) for e in CONE_RADII}
        out.append(PointDiagnostic(p.domain_uv, p.image_xyz, p.dihedral, cones))
    return out


def verify_all(config: FigureConfig | None = None, tolerances: Tolerances | None = None, seed: int = 0,
               n_samples: int = 10_000, scan_samples: int = 100_000, **kwargs) -> VerificationReport:
    """Run every check on one figure.

    ``kwargs`` are forwarded to ``FigureConfig`` when ``config`` is omitted,
    so configuration errors surface before any sampling.
    """
    if config is None:
        config = FigureConfig(**kwargs)
    tol = tolerances or Tolerances()
    atlas = build_atlas(config)
    results = [
        checks.metric_residual(atlas, n_samples, "analytic", seed, tol.analytic),
        checks.metric_residual(atlas, n_samples, "finite_difference", seed, tol.fd),
        checks.scaled_map_sentinel(atlas, n_samples, seed, tol.chain),
        *checks.crease_and_closure_checks(atlas, tol),
        checks.mirror_sentinel(atlas, tol.chain),
        checks.crease_arc_length(atlas, tol.chain),
        checks.curvature_sweep(atlas),
        checks.handedness_check(atlas),
        checks.tube_containment(atlas, n_samples, seed, tol.chain),
        checks.vertex_closure(atlas, tol.chain),
        checks.inflection_dihedral(atlas, tol.chain),
        *checks.cone_angle_checks(atlas, tol.cone),
        checks.intersection_on_axes(atlas, tolerance=tol.chain),
        checks.intersection_oracle_agreement(atlas, tolerance=tol.fd),
        checks.injectivity_scan(atlas, scan_samples, seed=seed),
        checks.refined_injectivity_scan(atlas, scan_samples, seed=seed, tolerance=tol.fd),
    ]
    return VerificationReport(
        config=config,
        seed=seed,
        checks=results,
        exceptional_points=exceptional_point_diagnostics(atlas),
        orientability=orientability(config).value,
        renormalizations=atlas.renormalizations,
        extra={"closure_residual": float(atlas.closure_residual), "vertices": np.asarray(atlas.vertices()).tolist()},
    )
