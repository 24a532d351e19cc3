"""Compare the compiled and numpy kernels on the same batch.

Run with ``python3 benchmarks/bench_kernels.py [--points N] [--repeat R]``.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from flatklein.atlas import build_atlas
from flatklein.kernels import available_backends


def run(points: int, repeat: int, seed: int = 0) -> dict:
    atlas = build_atlas()
    dom = atlas.domain
    rng = np.random.default_rng(seed)
    u = rng.uniform(dom.u_min, dom.u_max, points)
    v = rng.uniform(dom.v_min, dom.v_max, points)
    results = {}
    reference = None
    for name in available_backends():
        strip, upper = atlas.locate(u, v, backend=name)

        def job():
            atlas.locate(u, v, backend=name)
            atlas.evaluate(u, v, strip, upper, backend=name)
            atlas.jacobian(u, v, strip, upper, backend=name)

        best = min(timeit.repeat(job, number=1, repeat=repeat))
        pts = atlas.evaluate(u, v, strip, upper, backend=name)
        if reference is None:
            reference = pts
        results[name] = {"seconds": best, "max_diff": float(np.max(np.abs(pts - reference)))}
    return results


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    res = run(args.points, args.repeat)
    print(f"{args.points} points, best of {args.repeat}")
    for name, r in res.items():
        print(f"  {name:7s} {r['seconds'] * 1e3:9.2f} ms   max |diff| vs first backend {r['max_diff']:.1e}")
    if "cython" in res and "python" in res:
        print(f"  speedup {res['python']['seconds'] / res['cython']['seconds']:.1f}x")


if __name__ == "__main__":
    main()
