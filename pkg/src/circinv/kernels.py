"""Backend dispatch for the hot kernels.

Imports the numba or numpy flavor once at module load, according to
``backend.USE_NUMBA``.  Tests and benchmarks can import both flavors
directly via :func:`available_backends`.
"""

from . import backend

if backend.USE_NUMBA:
    from ._kernels_numba import (
        chord_quad,
        crossing_scan,
        curve_d1,
        curve_d2,
        curve_points,
        disk_polygon_areas,
        eval_series,
        eval_series_d1,
        field_quad,
        pair_continuation,
        poly_self_intersect,
        trig_moment_quad,
    )
else:
    from ._kernels_numpy import (
        chord_quad,
        crossing_scan,
        curve_d1,
        curve_d2,
        curve_points,
        disk_polygon_areas,
        eval_series,
        eval_series_d1,
        field_quad,
        pair_continuation,
        poly_self_intersect,
        trig_moment_quad,
    )

__all__ = [
    "chord_quad",
    "crossing_scan",
    "curve_d1",
    "curve_d2",
    "curve_points",
    "disk_polygon_areas",
    "eval_series",
    "eval_series_d1",
    "field_quad",
    "pair_continuation",
    "poly_self_intersect",
    "trig_moment_quad",
    "available_backends",
]


def available_backends():
    """Name -> kernel module for every importable backend."""
    from . import _kernels_numpy

    out = {"numpy": _kernels_numpy}
    try:
        from . import _kernels_numba

        out["numba"] = _kernels_numba
    except ImportError:
        pass
    return out
