"""Forward evaluation of the circular area invariant.

For a closed embedded curve gamma and radius r, the invariant profile
assigns to each parameter phi the area of B_r(gamma(phi)) intersected
with the region enclosed by the curve.  On the neighborhood where the
disk boundary crosses the curve exactly twice, the area splits into a
chord integral between the two crossing parameters plus a circular
segment, which is what the analytic path evaluates.  The oracle path
clips a fine polygonization of the region against the disk directly and
serves as an independent cross-check.
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .curves import Curve, ensure_embedded, ensure_regular
from .errors import (ConsistencyError, ConvergenceError, DomainError,
                     GeometryError, ParameterError, TangencyWarning,
                     TopologyError)
from .fourier import PeriodicFn, uniform_grid
from .quadrature import GL_COUNTS, GL_NODES, GL_TOL, GL_WEIGHTS

TOL_ROOT = 1e-12      # Newton residual acceptance, relative to r^2
TOL_ARCCOS = 1e-12    # clamp window at the arccos domain boundary
TANGENCY_TOL = 1e-10  # |d dist/d phi| below this flags a tangency
NEWTON_MAX_ITER = 50


def _fmt(x) -> str:
    return repr(float(x))


def theta_circle(r: float, radius: float = 1.0) -> float:
    """Half-opening angle of the crossing pair on a circle of the given
    radius: arccos(1 - r^2/(2*radius^2))."""
    if r <= 0 or radius <= 0:
        raise ParameterError("radii must be positive", operation="invariant.theta_circle")
    if r >= 2.0 * radius:
        raise DomainError(
            "r must be below the circle diameter: for r >= 2R the ball contains "
            "the whole disk and the invariant degenerates to a constant",
            operation="invariant.theta_circle")
    return float(np.arccos(1.0 - r * r / (2.0 * radius * radius)))


def _seed_offset(curve: Curve, r: float) -> float:
    """Crossing-offset seed for Newton, clamped so it exists even when
    the curve is not exactly a circle."""
    c = curve.speed
    arg = 1.0 - r * r / (2.0 * c * c)
    return float(np.arccos(np.clip(arg, -1.0, 1.0))) if arg > -1.0 else np.pi * 0.75


@dataclass
class IntersectionPair:
    """Lifted crossing parameters around phi: m < phi < p."""

    m: float
    p: float


@dataclass
class InvariantProfile:
    r: float
    values: PeriodicFn
    m: np.ndarray
    p: np.ndarray
    curve: Curve

    @property
    def grid(self):
        return self.values.grid

    def range_report(self) -> dict:
        """Check 0 < values < min(pi r^2, enclosed area)."""
        cap = min(np.pi * self.r ** 2, self.curve.signed_area())
        vmin = float(self.values.samples.min())
        vmax = float(self.values.samples.max())
        return {"min": vmin, "max": vmax, "cap": cap,
                "ok": bool(0.0 < vmin and vmax < cap)}

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("phi,I_r,m,p\n")
            for phi, v, mi, pi in zip(self.grid, self.values.samples, self.m, self.p):
                fh.write(f"{_fmt(phi)},{_fmt(v)},{_fmt(mi)},{_fmt(pi)}\n")

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "n_modes": self.curve.n_modes,
            "grid_size": self.curve.grid_size,
            "phi": [float(x) for x in self.grid],
            "values": [float(x) for x in self.values.samples],
            "m": [float(x) for x in self.m],
            "p": [float(x) for x in self.p],
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")


def _newton_pair_arrays(curve: Curve, r: float, phis):
    m, p, status = kernels.pair_continuation(
        *curve.packed(), r, np.ascontiguousarray(phis),
        _seed_offset(curve, r), TOL_ROOT, NEWTON_MAX_ITER)
    bad = np.nonzero(status != 0)[0]
    if bad.size:
        i = int(bad[0])
        phi = float(phis[i])
        if status[i] == 1:
            raise ConvergenceError(
                f"crossing-parameter iteration failed at phi={phi:.6f}",
                operation="invariant.intersection_params")
        raise TopologyError(
            f"crossing parameter left its half-period window at phi={phi:.6f}; "
            "curve is outside the two-crossing neighborhood",
            operation="invariant.intersection_params")
    return m, p


def intersection_params(curve: Curve, r: float, phi: float, hint=None) -> IntersectionPair:
    """Crossing parameters (m, p) of the disk boundary at gamma(phi),
    found by Newton on g(d) = |gamma(d) - gamma(phi)|^2 - r^2."""
    if r <= 0:
        raise ParameterError("r must be positive", operation="invariant.intersection_params")
    phi = float(phi)
    if hint is not None:
        seeds = (float(hint.m), float(hint.p)) if isinstance(hint, IntersectionPair) \
            else (float(hint[0]), float(hint[1]))
    else:
        off = _seed_offset(curve, r)
        seeds = (phi - off, phi + off)
    x0, y0 = curve.point(phi)
    r2 = r * r
    roots = []
    for seed in seeds:
        d = seed
        best, best_g = d, np.inf
        for _ in range(NEWTON_MAX_ITER):
            x, y = curve.point(d)
            dx, dy = curve.d1(d)
            ex, ey = x - x0, y - y0
            g = ex * ex + ey * ey - r2
            if abs(g) < best_g:
                best, best_g = d, abs(g)
            if abs(g) <= 1e-15 * r2:
                break
            gp = 2.0 * (ex * dx + ey * dy)
            if gp == 0.0:
                break
            step = min(max(g / gp, -0.5), 0.5)
            if abs(step) <= 4e-16 * (1.0 + abs(d)):
                break
            d -= step
        if best_g > TOL_ROOT * r2:
            raise ConvergenceError(
                f"no convergence for crossing parameter near seed {seed:.6f}",
                operation="invariant.intersection_params")
        roots.append(best)
    m, p = min(roots), max(roots)
    if not (phi - np.pi < m < phi < p < phi + np.pi):
        raise TopologyError(
            f"crossing parameters ({m:.6f}, {p:.6f}) violate the lifting "
            f"window around phi={phi:.6f}",
            operation="invariant.intersection_params")
    return IntersectionPair(m=m, p=p)


def _count_all(curve: Curve, r: float, phis):
    fphis = uniform_grid(8 * curve.grid_size)
    fx, fy = kernels.curve_points(*curve.packed(), fphis)
    x0, y0 = kernels.curve_points(*curve.packed(), np.ascontiguousarray(phis))
    return kernels.crossing_scan(
        *curve.packed(), fphis, fx, fy, np.ascontiguousarray(phis),
        x0, y0, r, TANGENCY_TOL, 45)


def intersection_count(curve: Curve, r: float, phi: float) -> int:
    """Number of transversal crossings of the disk boundary at gamma(phi)
    with the curve, counted on the 8M fine grid."""
    if r <= 0:
        raise ParameterError("r must be positive", operation="invariant.intersection_count")
    counts, flags = _count_all(curve, r, np.atleast_1d(float(phi)))
    if flags[0]:
        warnings.warn("near-tangential crossing: count may be unreliable",
                      TangencyWarning, stacklevel=2)
    return int(counts[0])


def _validate_neighborhood(curve: Curve, r: float, operation: str):
    counts, flags = _count_all(curve, r, curve.grid)
    if flags.any():
        warnings.warn("near-tangential crossing detected on the grid",
                      TangencyWarning, stacklevel=3)
    bad = np.nonzero(counts != 2)[0]
    if bad.size:
        i = int(bad[0])
        raise TopologyError(
            f"disk boundary crosses the curve {int(counts[i])} times at "
            f"phi={float(curve.grid[i]):.6f} (need exactly 2)",
            operation=operation)


def invariant_analytic(curve: Curve, r: float, *, validate=True) -> InvariantProfile:
    """Invariant profile via the chord-integral decomposition.

    I_r(phi) = 1/2 * Int_m^p <gamma(psi)-gamma(phi), perp(dgamma(psi))> dpsi
               + r^2/2 * arccos(<gamma(p)-gamma(phi), gamma(m)-gamma(phi)>/r^2)
    """
    if r <= 0:
        raise ParameterError("r must be positive", operation="invariant.invariant_analytic")
    if validate:
        ensure_regular(curve, operation="invariant.invariant_analytic")
        ensure_embedded(curve, operation="invariant.invariant_analytic")
        _validate_neighborhood(curve, r, "invariant.invariant_analytic")
    phis = curve.grid
    m, p = _newton_pair_arrays(curve, r, phis)
    x0, y0 = curve.grid_xy()
    qtol = GL_TOL * max(1.0, r * r)
    chord, errs = kernels.chord_quad(*curve.packed(), x0, y0, m, p,
                                     GL_NODES, GL_WEIGHTS, GL_COUNTS, qtol)
    if errs.max() > 1e-10 * max(1.0, r * r):
        raise ConsistencyError("chord quadrature failed to converge",
                               operation="invariant.invariant_analytic")
    xp, yp = kernels.curve_points(*curve.packed(), p)
    xm, ym = kernels.curve_points(*curve.packed(), m)
    u = (xp - x0) * (xm - x0) + (yp - y0) * (ym - y0)
    w = u / (r * r)
    if np.abs(w).max() > 1.0 + TOL_ARCCOS:
        raise ConsistencyError(
            "chord inner product outside the arccos domain: crossing "
            "parameters are inconsistent with the radius",
            operation="invariant.invariant_analytic")
    vals = 0.5 * chord + 0.5 * r * r * np.arccos(np.clip(w, -1.0, 1.0))
    return InvariantProfile(r=float(r), values=PeriodicFn(vals), m=m, p=p, curve=curve)


def _polygon(curve: Curve):
    fphis = uniform_grid(16 * curve.grid_size)
    px, py = kernels.curve_points(*curve.packed(), fphis)
    ex = np.roll(px, -1) - px
    ey = np.roll(py, -1) - py
    if (ex * ex + ey * ey).min() <= (1e-13 * curve.speed) ** 2:
        raise GeometryError("degenerate polygonization (duplicate vertices)",
                            operation="invariant.invariant_oracle")
    area2 = np.sum(px * np.roll(py, -1) - np.roll(px, -1) * py)
    if area2 == 0.0:
        raise GeometryError("degenerate polygonization (zero area)",
                            operation="invariant.invariant_oracle")
    if area2 < 0.0:
        px, py = px[::-1].copy(), py[::-1].copy()
    return np.ascontiguousarray(px), np.ascontiguousarray(py)


def invariant_oracle(curve: Curve, r: float, phi=None):
    """Disk/region intersection area by direct polygon clipping at 16M
    vertices.  Scalar for a single phi, array over the grid for phi=None."""
    if r <= 0:
        raise ParameterError("r must be positive", operation="invariant.invariant_oracle")
    px, py = _polygon(curve)
    if phi is None:
        qx, qy = curve.grid_xy()
        qx = np.ascontiguousarray(qx)
        qy = np.ascontiguousarray(qy)
        return kernels.disk_polygon_areas(px, py, qx, qy, r)
    qx, qy = curve.point(np.atleast_1d(float(phi)))
    return float(kernels.disk_polygon_areas(px, py, np.ascontiguousarray(qx),
                                            np.ascontiguousarray(qy), r)[0])


@dataclass
class InvarianceReport:
    euclidean_dev: float
    shift_dev: float
    scaling_dev: float
    r: float

    @property
    def max_dev(self) -> float:
        return max(self.euclidean_dev, self.shift_dev, self.scaling_dev)

    def to_dict(self) -> dict:
        return {
            "euclidean_dev": self.euclidean_dev,
            "shift_dev": self.shift_dev,
            "scaling_dev": self.scaling_dev,
            "max_dev": self.max_dev,
            "r": self.r,
        }


def invariance_suite(curve: Curve, r: float, *, angle=0.7,
                     translation=(3.0, -2.0), shift_steps=17,
                     scale=2.0, validate=True) -> InvarianceReport:
    """Empirical check of the three structural properties of the
    invariant: rigid-motion invariance, grid-shift equivariance, and the
    scaling law I_r[t*gamma] = t^2 I_{r/t}[gamma]."""
    base = invariant_analytic(curve, r, validate=validate).values
    n = curve.n_modes
    m = curve.grid_size

    ca, sa = np.cos(angle), np.sin(angle)
    rx = ca * curve.coeff_x - sa * curve.coeff_y
    ry = sa * curve.coeff_x + ca * curve.coeff_y
    rx = rx.copy()
    ry = ry.copy()
    rx[n] += translation[0]
    ry[n] += translation[1]
    moved = invariant_analytic(Curve(rx, ry, m), r, validate=False).values
    euclid = float(np.abs(moved.samples - base.samples).max())

    steps = int(shift_steps) % m
    phase = np.exp(1j * np.arange(-n, n + 1) * (2.0 * np.pi * steps / m))
    shifted_curve = Curve(curve.coeff_x * phase, curve.coeff_y * phase, m)
    shifted = invariant_analytic(shifted_curve, r, validate=False).values
    shift_dev = float(np.abs(shifted.samples - base.shift_grid(steps).samples).max())

    t = float(scale)
    scaled_curve = Curve(curve.coeff_x * t, curve.coeff_y * t, m)
    big = invariant_analytic(scaled_curve, r, validate=False).values
    small = invariant_analytic(curve, r / t, validate=False).values
    scaling = float(np.abs(big.samples - t * t * small.samples).max())

    return InvarianceReport(euclidean_dev=euclid, shift_dev=shift_dev,
                            scaling_dev=scaling, r=float(r))
