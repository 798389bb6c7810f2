"""Closed planar curves as truncated Fourier series.

A Curve stores centered complex coefficients (modes -N..N) of both
components, plus a uniform evaluation grid size M >= 4N.  The
normalized representative of a geometric curve has constant speed
c = length/2pi, starts at (c, 0) with velocity (0, c), and runs
counterclockwise; :func:`normalize` maps any regular embedded curve to
that representative.

Tangent fields along a curve are stored in the frame (perp(t), t) of
the velocity t = dgamma/dphi, with perp(v) := (v_y, -v_x), as a pair of
scalar functions (a, b): sigma = a*perp(t) + b*t.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import kernels
from .errors import DegenerateCurveError, DomainError, EmbeddingError, ParameterError
from .fourier import PeriodicFn, trim_packed, uniform_grid

# relative thresholds for curve admissibility checks
MIN_SPEED_REL = 1e-9
SELF_INTERSECT_REL = 1e-9


def _packed_from_centered(coeffs):
    """Packed cos/sin arrays from centered complex coefficients."""
    n = (coeffs.size - 1) // 2
    pos = coeffs[n:]
    c = np.empty(n + 1)
    s = np.zeros(n + 1)
    c[0] = pos[0].real
    c[1:] = 2.0 * pos[1:].real
    s[1:] = -2.0 * pos[1:].imag
    return c, s


class Curve:
    """Closed curve given by centered Fourier coefficients of x and y."""

    __slots__ = ("coeff_x", "coeff_y", "n_modes", "grid_size",
                 "_packed", "_grid_xy", "_grid_d1", "_speed")

    def __init__(self, coeff_x, coeff_y, grid_size):
        cx = np.asarray(coeff_x, dtype=complex)
        cy = np.asarray(coeff_y, dtype=complex)
        if cx.shape != cy.shape or cx.ndim != 1 or cx.size % 2 == 0:
            raise ParameterError("coefficient arrays must share an odd length",
                                 operation="curve_core.Curve")
        n = (cx.size - 1) // 2
        if n < 1:
            raise ParameterError("need at least one mode", operation="curve_core.Curve")
        grid_size = int(grid_size)
        if grid_size < 4 * n:
            raise ParameterError("grid_size must be at least 4*n_modes",
                                 operation="curve_core.Curve")
        # enforce the real-curve (Hermitian) symmetry exactly
        cx = 0.5 * (cx + np.conj(cx[::-1]))
        cy = 0.5 * (cy + np.conj(cy[::-1]))
        cx.setflags(write=False)
        cy.setflags(write=False)
        self.coeff_x = cx
        self.coeff_y = cy
        self.n_modes = n
        self.grid_size = grid_size
        self._packed = None
        self._grid_xy = None
        self._grid_d1 = None
        self._speed = None

    def packed(self):
        if self._packed is None:
            cxc, cxs = _packed_from_centered(self.coeff_x)
            cyc, cys = _packed_from_centered(self.coeff_y)
            self._packed = (cxc, cxs, cyc, cys)
        return self._packed

    @property
    def grid(self):
        return uniform_grid(self.grid_size)

    def grid_xy(self):
        if self._grid_xy is None:
            self._grid_xy = kernels.curve_points(*self.packed(), self.grid)
        return self._grid_xy

    def grid_d1(self):
        if self._grid_d1 is None:
            self._grid_d1 = kernels.curve_d1(*self.packed(), self.grid)
        return self._grid_d1

    @property
    def speed(self) -> float:
        """Mean of |dgamma/dphi| over the grid (the constant c for
        normalized curves)."""
        if self._speed is None:
            dx, dy = self.grid_d1()
            self._speed = float(np.hypot(dx, dy).mean())
        return self._speed

    def point(self, phi):
        phis = np.ascontiguousarray(np.atleast_1d(np.asarray(phi, dtype=float)))
        x, y = kernels.curve_points(*self.packed(), phis)
        if np.ndim(phi) == 0:
            return float(x[0]), float(y[0])
        return x, y

    def d1(self, phi):
        phis = np.ascontiguousarray(np.atleast_1d(np.asarray(phi, dtype=float)))
        dx, dy = kernels.curve_d1(*self.packed(), phis)
        if np.ndim(phi) == 0:
            return float(dx[0]), float(dy[0])
        return dx, dy

    def d2(self, phi):
        phis = np.ascontiguousarray(np.atleast_1d(np.asarray(phi, dtype=float)))
        ddx, ddy = kernels.curve_d2(*self.packed(), phis)
        if np.ndim(phi) == 0:
            return float(ddx[0]), float(ddy[0])
        return ddx, ddy

    def signed_area(self) -> float:
        """Enclosed area, positive for counterclockwise curves."""
        x, y = self.grid_xy()
        dx, dy = self.grid_d1()
        return float(np.pi * np.mean(x * dy - y * dx))

    def with_modes(self, n_modes, grid_size=None):
        """Same curve re-truncated / re-padded to n_modes."""
        n_modes = int(n_modes)
        m = self.grid_size if grid_size is None else int(grid_size)
        return Curve(_pad_centered(self.coeff_x, n_modes),
                     _pad_centered(self.coeff_y, n_modes), m)

    def __repr__(self):
        return (f"Curve(n_modes={self.n_modes}, grid_size={self.grid_size}, "
                f"speed={self.speed:.6g})")


def _pad_centered(coeffs, n_new):
    n = (coeffs.size - 1) // 2
    out = np.zeros(2 * n_new + 1, dtype=complex)
    keep = min(n, n_new)
    out[n_new - keep: n_new + keep + 1] = coeffs[n - keep: n + keep + 1]
    return out


def make_circle(radius=1.0, n_modes=32, grid_size=512) -> Curve:
    """Counterclockwise circle of the given radius about the origin,
    already in normalized form."""
    if radius <= 0:
        raise ParameterError("radius must be positive", operation="curve_core.make_circle")
    cx = np.zeros(2 * n_modes + 1, dtype=complex)
    cy = np.zeros(2 * n_modes + 1, dtype=complex)
    cx[n_modes + 1] = cx[n_modes - 1] = 0.5 * radius
    cy[n_modes + 1] = -0.5j * radius
    cy[n_modes - 1] = 0.5j * radius
    return Curve(cx, cy, grid_size)


def evaluate(curve: Curve, phi):
    return curve.point(phi)


def evaluate_d1(curve: Curve, phi):
    return curve.d1(phi)


def evaluate_d2(curve: Curve, phi):
    return curve.d2(phi)


def curvature(curve: Curve, phi):
    """Signed curvature (positive for counterclockwise convex arcs)."""
    scalar = np.ndim(phi) == 0
    phis = np.ascontiguousarray(np.atleast_1d(np.asarray(phi, dtype=float)))
    dx, dy = kernels.curve_d1(*curve.packed(), phis)
    ddx, ddy = kernels.curve_d2(*curve.packed(), phis)
    sp = np.hypot(dx, dy)
    if np.any(sp == 0.0):
        raise DegenerateCurveError("zero-speed point, curvature undefined",
                                   operation="curve_core.curvature")
    k = (dx * ddy - dy * ddx) / sp ** 3
    return float(k[0]) if scalar else k


def ensure_regular(curve: Curve, operation="curve_core"):
    """Raise if the parameterization has (numerically) a zero-speed point."""
    fphis = uniform_grid(2 * curve.grid_size)
    dx, dy = kernels.curve_d1(*curve.packed(), fphis)
    sp = np.hypot(dx, dy)
    if sp.min() < MIN_SPEED_REL * sp.max():
        raise DegenerateCurveError("curve has a zero-speed point", operation=operation)


def ensure_embedded(curve: Curve, operation="curve_core"):
    """Raise if the curve self-intersects (polygonal test, 2M points)."""
    fphis = uniform_grid(2 * curve.grid_size)
    x, y = kernels.curve_points(*curve.packed(), fphis)
    gap = SELF_INTERSECT_REL * curve.speed
    if kernels.poly_self_intersect(np.ascontiguousarray(x), np.ascontiguousarray(y), gap):
        raise EmbeddingError("curve self-intersects", operation=operation)


def normalization_residuals(curve: Curve) -> dict:
    """How far the curve is from normalized form (relative to its speed)."""
    dx, dy = curve.grid_d1()
    sp = np.hypot(dx, dy)
    c = curve.speed
    x0, y0 = curve.point(0.0)
    tx0, ty0 = curve.d1(0.0)
    return {
        "speed_ripple": float(np.abs(sp - c).max() / c),
        "base_offset": float(np.hypot(x0 - c, y0) / c),
        "tangent_offset": float(np.hypot(tx0, ty0 - c) / c),
        "orientation": 1.0 if curve.signed_area() > 0 else -1.0,
    }


def _reverse(curve: Curve) -> Curve:
    return Curve(curve.coeff_x[::-1], curve.coeff_y[::-1], curve.grid_size)


def _normalize_pass(curve: Curve, n: int, m: int, coarse_seed: bool) -> Curve:
    fine = 8 * m
    fphis = uniform_grid(fine)
    dx, dy = kernels.curve_d1(*curve.packed(), fphis)
    sp = np.hypot(dx, dy)
    if sp.min() <= 0.0:
        raise DegenerateCurveError("curve has a zero-speed point",
                                   operation="curve_core.normalize")
    spfn = PeriodicFn(sp)
    cbar, accum = spfn.cumulative()  # arclength(phi) = cbar*phi + accum(phi)
    targets = cbar * uniform_grid(m)
    if coarse_seed:
        svals = cbar * fphis + accum.samples
        knots_s = np.append(svals, 2.0 * np.pi * cbar)
        knots_phi = np.append(fphis, 2.0 * np.pi)
        phi_t = PchipInterpolator(knots_s, knots_phi)(targets)
    else:
        # already near arclength parameterization (later fixpoint passes)
        phi_t = uniform_grid(m).copy()
    # Newton polish of arclength(phi_t) = targets to machine precision.
    # The remainder series accum is tiny once the curve is near arclength
    # parameterization, so trim it against an absolute floor tied to the
    # mean speed rather than its own (noise-dominated) scale.
    pc, ps = trim_packed(*accum.packed(), floor=1e-13 * cbar)
    sc, ss = trim_packed(*spfn.packed(), floor=1e-13 * cbar)
    for _ in range(4):
        resid = cbar * phi_t + kernels.eval_series(pc, ps, phi_t) - targets
        phi_t = phi_t - resid / kernels.eval_series(sc, ss, phi_t)
    xs, ys = kernels.curve_points(*curve.packed(), np.ascontiguousarray(phi_t))
    ccx = _centered_from_samples(xs, n)
    ccy = _centered_from_samples(ys, n)
    tmp = Curve(ccx, ccy, m)
    # rigid motion: start point to (cbar, 0), start velocity to (0, +)
    tx, ty = tmp.d1(0.0)
    tn = np.hypot(tx, ty)
    g11, g12 = ty / tn, -tx / tn
    g21, g22 = tx / tn, ty / tn
    rx = g11 * tmp.coeff_x + g12 * tmp.coeff_y
    ry = g21 * tmp.coeff_x + g22 * tmp.coeff_y
    px, py = tmp.point(0.0)
    rx = rx.copy()
    ry = ry.copy()
    rx[n] += cbar - (g11 * px + g12 * py)
    ry[n] += -(g21 * px + g22 * py)
    return Curve(rx, ry, m)


def _centered_from_samples(samples, n):
    m = samples.size
    spec = np.fft.rfft(samples) / m
    out = np.zeros(2 * n + 1, dtype=complex)
    top = min(n, m // 2 - 1)
    out[n: n + top + 1] = spec[: top + 1]
    out[n - top: n] = np.conj(spec[1: top + 1][::-1])
    return out


def normalize(curve: Curve, n_modes=None, grid_size=None, *,
              max_passes=8, tol=1e-12, validate=True) -> Curve:
    """Constant-speed counterclockwise representative, pinned at the
    start point.

    Reparameterizes by arclength (spectral cumulative arclength on an
    8M fine grid, monotone cubic inverse seed, Newton polish), projects
    back onto n_modes Fourier modes, applies the pinning rigid motion,
    and repeats until the result is a fixed point of the pass.
    """
    n = curve.n_modes if n_modes is None else int(n_modes)
    m = curve.grid_size if grid_size is None else int(grid_size)
    if m < 4 * n:
        raise ParameterError("grid_size must be at least 4*n_modes",
                             operation="curve_core.normalize")
    cur = curve
    if cur.signed_area() < 0:
        cur = _reverse(cur)
    if validate:
        ensure_regular(cur, operation="curve_core.normalize")
        ensure_embedded(cur, operation="curve_core.normalize")
    # Fixpoint loop. Band-limited fixpoints (e.g. circles) converge to
    # machine precision; generic curves contract until the mode-truncation
    # tail makes further passes wander, at which point we stop and keep
    # the last contracting iterate.
    prev = None
    prev_delta = np.inf
    for npass in range(max_passes):
        nxt = _normalize_pass(cur, n, m, coarse_seed=(npass == 0))
        x, y = nxt.grid_xy()
        if prev is not None:
            delta = max(np.abs(x - prev[0]).max(), np.abs(y - prev[1]).max())
            if delta >= prev_delta and npass >= 2:
                return cur  # stalled at the truncation noise floor
            cur = nxt
            if delta <= tol * max(1.0, cur.speed):
                break
            prev_delta = delta
        else:
            cur = nxt
        prev = (x, y)
    return cur


@dataclass
class TangentField:
    """Vector field along ``base`` in the (perp(t), t) frame:
    sigma = a*perp(t) + b*t with t the velocity."""

    a: PeriodicFn
    b: PeriodicFn
    base: Curve

    def field_samples(self):
        dx, dy = self.base.grid_d1()
        av = self.a.samples
        bv = self.b.samples
        return av * dy + bv * dx, -av * dx + bv * dy

    def field_coeffs(self, n_modes=None):
        """Centered complex coefficients of the field components."""
        sx, sy = self.field_samples()
        m = self.base.grid_size
        n = m // 2 - 1 if n_modes is None else int(n_modes)
        return _centered_from_samples(sx, n), _centered_from_samples(sy, n)

    def packed_xy(self, trim=True):
        sx, sy = self.field_samples()
        m = self.base.grid_size
        fx = PeriodicFn(sx).packed()
        fy = PeriodicFn(sy).packed()
        if trim:
            # common trimmed length so the kernel sees matched arrays
            kx = trim_packed(*fx)[0].size
            ky = trim_packed(*fy)[0].size
            k = max(kx, ky)
            return (fx[0][:k].copy(), fx[1][:k].copy(),
                    fy[0][:k].copy(), fy[1][:k].copy())
        return (*fx, *fy)

    def perturb(self, eps: float, n_modes=None) -> Curve:
        """Curve with coefficients of base + eps*field (exact in the
        Fourier representation up to the mode cap)."""
        m = self.base.grid_size
        sx, sy = self.field_samples()
        if n_modes is None:
            full_x = _centered_from_samples(sx, m // 2 - 1)
            full_y = _centered_from_samples(sy, m // 2 - 1)
            need = _last_mode(full_x, full_y)
            n_modes = min(max(self.base.n_modes, need), m // 4)
        fx = _centered_from_samples(sx, n_modes)
        fy = _centered_from_samples(sy, n_modes)
        return Curve(_pad_centered(self.base.coeff_x, n_modes) + eps * fx,
                     _pad_centered(self.base.coeff_y, n_modes) + eps * fy, m)

    def tangent_residual(self) -> float:
        """Sup of |db/dphi - (db/dphi(0) + a*kappa*|t|)|; zero (up to
        aliasing) when the field is tangent to the constant-speed family."""
        db = self.b.derivative()
        dx, dy = self.base.grid_d1()
        sp = np.hypot(dx, dy)
        kap = curvature(self.base, self.base.grid)
        resid = db.samples - db.samples[0] - (self.a.samples * kap * sp
                                              - self.a.samples[0] * kap[0] * sp[0])
        return float(np.abs(resid).max())


def _last_mode(cx, cy, rel=1e-14):
    n = (cx.size - 1) // 2
    mag = np.maximum(np.abs(cx[n:]), np.abs(cy[n:]))
    scale = mag.max()
    if scale == 0.0:
        return 1
    keep = np.nonzero(mag > rel * scale)[0]
    return max(1, int(keep[-1])) if keep.size else 1


def tangent_decompose(base: Curve, sigma) -> TangentField:
    """Split a sampled vector field (grid_size, 2) into frame components."""
    arr = np.asarray(sigma, dtype=float)
    if arr.shape != (base.grid_size, 2):
        raise ParameterError("field samples must have shape (grid_size, 2)",
                             operation="curve_core.tangent_decompose")
    dx, dy = base.grid_d1()
    sp2 = dx * dx + dy * dy
    if np.any(sp2 == 0.0):
        raise DegenerateCurveError("zero-speed point in base curve",
                                   operation="curve_core.tangent_decompose")
    a = (arr[:, 0] * dy - arr[:, 1] * dx) / sp2
    b = (arr[:, 0] * dx + arr[:, 1] * dy) / sp2
    return TangentField(PeriodicFn(a), PeriodicFn(b), base)


def lift_normal(a, base: Curve = None, *, check_admissible=True) -> TangentField:
    """Complete a normal component ``a`` to a field tangent to the
    normalized-curve family.

    The tangential part solves db/dphi = db/dphi(0) + a*kappa*speed with
    the unique slope db/dphi(0) = -mean(a*kappa*speed) that makes b
    periodic, b(0) = 0.  With ``check_admissible`` the input must
    satisfy a(0) = a'(0) = 0 (tangency to the pinned family); disable it
    to lift plain basis modes for operator assembly.
    """
    if base is None:
        base = make_circle(1.0, max(1, a.grid_size // 4), a.grid_size)
    if a.grid_size != base.grid_size:
        raise ParameterError("field grid must match the base curve grid",
                             operation="curve_core.lift_normal")
    if check_admissible:
        tol = 1e-8 * max(1.0, a.sup())
        a0 = abs(float(a.samples[0]))
        da0 = abs(float(a.derivative().samples[0]))
        if a0 > tol or da0 > tol:
            raise DomainError("normal component must vanish to first order at phi=0",
                              operation="curve_core.lift_normal")
    dx, dy = base.grid_d1()
    sp = np.hypot(dx, dy)
    kap = curvature(base, base.grid)
    g = PeriodicFn(a.samples * kap * sp)
    _, accum = g.cumulative()  # periodic, starts at 0
    return TangentField(a, accum, base)


def sample_perturbed_circle(rng, amplitude, *, min_mode=2, max_mode=8,
                            n_modes=32, grid_size=512, radius=1.0,
                            normalize_curve=True) -> Curve:
    """Random radial perturbation of a circle with sup-amplitude equal to
    ``amplitude``, normalized by default.  Deterministic in ``rng``."""
    if not 1 <= min_mode <= max_mode:
        raise ParameterError("need 1 <= min_mode <= max_mode",
                             operation="curve_core.sample_perturbed_circle")
    phis = uniform_grid(grid_size)
    h = np.zeros(grid_size)
    for j in range(min_mode, max_mode + 1):
        ab = rng.standard_normal(2)
        h += ab[0] * np.cos(j * phis) + ab[1] * np.sin(j * phis)
    suph = np.abs(h).max()
    if suph > 0 and amplitude > 0:
        h *= amplitude / suph
    else:
        h[:] = 0.0
    xs = (radius + h) * np.cos(phis)
    ys = (radius + h) * np.sin(phis)
    cur = Curve(_centered_from_samples(xs, n_modes),
                _centered_from_samples(ys, n_modes), grid_size)
    if normalize_curve:
        cur = normalize(cur)
    return cur


def curve_ck_dist(c1: Curve, c2: Curve, k: int) -> float:
    """Discrete C^k distance: max over derivative orders 0..k of the grid
    sup of the pointwise Euclidean distance between order-j derivatives."""
    if k < 0:
        raise ParameterError("k must be >= 0", operation="curve_core.curve_ck_dist")
    m = max(c1.grid_size, c2.grid_size)
    n = max(c1.n_modes, c2.n_modes)
    dxc = _pad_centered(c1.coeff_x, n) - _pad_centered(c2.coeff_x, n)
    dyc = _pad_centered(c1.coeff_y, n) - _pad_centered(c2.coeff_y, n)
    jj = np.arange(-n, n + 1) * 1j
    out = 0.0
    for order in range(k + 1):
        fac = jj ** order
        ex = PeriodicFn.from_coeffs(dxc * fac, m).samples
        ey = PeriodicFn.from_coeffs(dyc * fac, m).samples
        out = max(out, float(np.hypot(ex, ey).max()))
    return out


def curve_to_dict(curve: Curve) -> dict:
    return {
        "n_modes": curve.n_modes,
        "grid_size": curve.grid_size,
        "coeff_x": [[z.real, z.imag] for z in curve.coeff_x],
        "coeff_y": [[z.real, z.imag] for z in curve.coeff_y],
    }


def curve_from_dict(d: dict) -> Curve:
    try:
        cx = np.array([complex(re, im) for re, im in d["coeff_x"]])
        cy = np.array([complex(re, im) for re, im in d["coeff_y"]])
        n = int(d["n_modes"])
        m = int(d["grid_size"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed curve record: {exc}",
                             operation="curve_core.curve_from_dict") from None
    if cx.size != 2 * n + 1:
        raise ParameterError("coefficient count does not match n_modes",
                             operation="curve_core.curve_from_dict")
    return Curve(cx, cy, m)


def save_curve(curve: Curve, path):
    with open(path, "w") as fh:
        json.dump(curve_to_dict(curve), fh, indent=1)
        fh.write("\n")


def load_curve(path) -> Curve:
    with open(path) as fh:
        return curve_from_dict(json.load(fh))
