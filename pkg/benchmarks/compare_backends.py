"""Timing comparison of the numba and pure-numpy kernel flavors.

Runs every hot kernel on an identical workload and reports per-call times
for both backends.  The package-level backend choice (CIRCINV_NUMBA) does
not matter here: both flavor modules are imported directly.

Usage: python benchmarks/compare_backends.py [--grid 512] [--repeat 5]
"""

import argparse
import time

import numpy as np

import circinv
from circinv.invariant import (NEWTON_MAX_ITER, TOL_ROOT, TANGENCY_TOL,
                               _newton_pair_arrays, _seed_offset)
from circinv.kernels import available_backends
from circinv.quadrature import GL_COUNTS, GL_NODES, GL_TOL, GL_WEIGHTS


def best_of(fn, repeat):
    out = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out = min(out, time.perf_counter() - t0)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=512)
    ap.add_argument("--modes", type=int, default=32)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = available_backends()
    if len(backends) < 2:
        print("only one backend importable:", list(backends))
        return

    rng = np.random.default_rng(0)
    cur = circinv.sample_perturbed_circle(rng, 0.03, n_modes=args.modes,
                                          grid_size=args.grid)
    packed = cur.packed()
    phis = cur.grid
    r = 0.9
    m, p = _newton_pair_arrays(cur, r, phis)
    x0, y0 = cur.grid_xy()
    field = circinv.lift_normal(circinv.PeriodicFn(np.cos(2 * phis)), cur,
                                check_admissible=False)
    fpacked = field.packed_xy()
    fine = np.linspace(0.0, 2 * np.pi, 8 * args.grid, endpoint=False)
    fx, fy = cur.point(fine)
    px, py = cur.point(np.linspace(0.0, 2 * np.pi, 16 * args.grid,
                                   endpoint=False))
    dense = np.linspace(-1.0, 7.0, 20000)

    workloads = {
        "curve_points": lambda k: k.curve_points(*packed, dense),
        "curve_d1": lambda k: k.curve_d1(*packed, dense),
        "pair_continuation": lambda k: k.pair_continuation(
            *packed, r, phis, _seed_offset(cur, r), TOL_ROOT,
            NEWTON_MAX_ITER),
        "chord_quad": lambda k: k.chord_quad(
            *packed, x0, y0, m, p, GL_NODES, GL_WEIGHTS, GL_COUNTS, GL_TOL),
        "field_quad": lambda k: k.field_quad(
            *fpacked, *packed, m, p, GL_NODES, GL_WEIGHTS, GL_COUNTS,
            GL_TOL),
        "trig_moment_quad": lambda k: k.trig_moment_quad(
            *packed, m, p, args.modes, GL_NODES, GL_WEIGHTS, GL_COUNTS,
            GL_TOL),
        "crossing_scan": lambda k: k.crossing_scan(
            *packed, fine, fx, fy, phis, x0, y0, r, TANGENCY_TOL, 45),
        "disk_polygon_areas": lambda k: k.disk_polygon_areas(
            px, py, x0, y0, r),
        "poly_self_intersect": lambda k: k.poly_self_intersect(px, py,
                                                               1e-9),
    }

    # warm both flavors (JIT compile / cache load) before timing
    for mod in backends.values():
        for fn in workloads.values():
            fn(mod)

    print(f"grid={args.grid} modes={args.modes} best of {args.repeat}")
    header = f"{'kernel':<22}" + "".join(f"{n:>12}" for n in backends)
    print(header)
    print("-" * len(header))
    for name, fn in workloads.items():
        times = {n: best_of(lambda: fn(mod), args.repeat)
                 for n, mod in backends.items()}
        row = f"{name:<22}" + "".join(f"{t * 1e3:>10.2f}ms"
                                      for t in times.values())
        if "numpy" in times and "numba" in times and times["numba"] > 0:
            row += f"   x{times['numpy'] / times['numba']:.1f}"
        print(row)


if __name__ == "__main__":
    main()
