"""Directional derivative of the disk-overlap invariant and its
circle-case spectral theory.

The derivative of the invariant profile in a direction sigma combines the
boundary integral term with motion of the two crossing parameters; at the
circle the operator diagonalizes over Fourier modes with eigenvalues d_j,
which this module exposes together with collocation-matrix assembly and
injectivity diagnostics.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from . import kernels
from .curves import Curve, TangentField, ensure_embedded, ensure_regular, lift_normal
from .errors import ConsistencyError, NearSingularError, ParameterError
from .fourier import PeriodicFn, trim_packed, uniform_grid
from .invariant import _fmt, _newton_pair_arrays, _validate_neighborhood
from .quadrature import GL_COUNTS, GL_NODES, GL_TOL, GL_WEIGHTS

NEAR_SINGULAR_REL = 1e-10


def _sigma_packed(sigma, curve):
    """Packed trig series (fcx, fsx, fcy, fsy) and grid samples of the
    perturbation field."""
    if isinstance(sigma, TangentField):
        if sigma.base.grid_size != curve.grid_size:
            raise ParameterError("field grid must match the curve grid",
                                 operation="derivative.frechet_derivative")
        sx, sy = sigma.field_samples()
    else:
        arr = np.asarray(sigma, dtype=float)
        if arr.shape != (curve.grid_size, 2):
            raise ParameterError(
                "sigma must be a TangentField or an array of shape (grid_size, 2)",
                operation="derivative.frechet_derivative")
        sx, sy = arr[:, 0].copy(), arr[:, 1].copy()
    fx = PeriodicFn(sx).packed()
    fy = PeriodicFn(sy).packed()
    kx = trim_packed(*fx)[0].size
    ky = trim_packed(*fy)[0].size
    k = max(kx, ky)
    return (fx[0][:k].copy(), fx[1][:k].copy(),
            fy[0][:k].copy(), fy[1][:k].copy()), sx, sy


def frechet_derivative(curve: Curve, r: float, sigma, *, pairs=None,
                       validate=True) -> PeriodicFn:
    """Derivative of the invariant profile at ``curve`` in direction
    ``sigma``, evaluated on the curve grid.

    Sums the boundary-integral term, the chord endpoint terms, and the
    crossing-parameter motion terms; the crossing-parameter derivatives
    use their closed-form expressions rather than differentiated Newton
    iterates.
    """
    if r <= 0:
        raise ParameterError("r must be positive",
                             operation="derivative.frechet_derivative")
    if validate:
        ensure_regular(curve, operation="derivative.frechet_derivative")
        ensure_embedded(curve, operation="derivative.frechet_derivative")
        _validate_neighborhood(curve, r, "derivative.frechet_derivative")
    phis = curve.grid
    if pairs is None:
        m, p = _newton_pair_arrays(curve, r, phis)
    else:
        m, p = pairs
    (fcx, fsx, fcy, fsy), sigx, sigy = _sigma_packed(sigma, curve)

    x0, y0 = curve.grid_xy()
    xp, yp = kernels.curve_points(*curve.packed(), p)
    xm, ym = kernels.curve_points(*curve.packed(), m)
    dxp, dyp = kernels.curve_d1(*curve.packed(), p)
    dxm, dym = kernels.curve_d1(*curve.packed(), m)
    spx = kernels.eval_series(fcx, fsx, p)
    spy = kernels.eval_series(fcy, fsy, p)
    smx = kernels.eval_series(fcx, fsx, m)
    smy = kernels.eval_series(fcy, fsy, m)

    Px, Py = xp - x0, yp - y0
    Mx, My = xm - x0, ym - y0
    r2 = r * r
    u = Px * Mx + Py * My
    den_p = dxp * Px + dyp * Py
    den_m = dxm * Mx + dym * My
    root2 = r2 * r2 - u * u
    thresh = NEAR_SINGULAR_REL * r2
    if min(np.abs(den_p).min(), np.abs(den_m).min()) < thresh \
            or root2.min() < thresh * thresh:
        raise NearSingularError(
            "chord configuration is nearly tangential: crossing-parameter "
            "derivatives are ill-defined",
            operation="derivative.frechet_derivative")
    root = np.sqrt(root2)

    # crossing-parameter derivatives in direction sigma
    dp = ((sigx - spx) * Px + (sigy - spy) * Py) / den_p
    dm = ((sigx - smx) * Mx + (sigy - smy) * My) / den_m

    sig_sup = max(np.abs(sigx).max(), np.abs(sigy).max())
    scale = max(1.0, r2) * (1.0 + sig_sup)
    t1, errs = kernels.field_quad(fcx, fsx, fcy, fsy, *curve.packed(),
                                  m, p, GL_NODES, GL_WEIGHTS, GL_COUNTS,
                                  GL_TOL * scale)
    if errs.max() > 1e-10 * scale:
        raise ConsistencyError("directional-derivative quadrature failed to converge",
                               operation="derivative.frechet_derivative")
    t1 = 2.0 * t1
    # <sigma, perp(gamma(p) - gamma(m))> with perp(v) = (vy, -vx)
    t2 = -(sigx * (yp - ym) - sigy * (xp - xm))
    t3 = (Px * spy - Py * spx) - (Mx * smy - My * smx)
    t4 = (Px * dyp - Py * dxp) * dp - (Mx * dym - My * dxm) * dm
    bracket = (dp * (dxp * Mx + dyp * My)
               + (spx - sigx) * Mx + (spy - sigy) * My
               + Px * (smx - sigx) + Py * (smy - sigy)
               + dm * (Px * dxm + Py * dym))
    t5 = -(r2 / root) * bracket
    return PeriodicFn(0.5 * (t1 + t2 + t3 + t4 + t5))


def circle_derivative(a: PeriodicFn, theta: float) -> PeriodicFn:
    """Derivative of the invariant at the constant-speed unit circle
    applied to a normal perturbation ``a``: the moving-window integral of
    ``a`` over [phi-theta, phi+theta] minus 2*sin(theta)*a(phi), done
    exactly in Fourier space.
    """
    theta = float(theta)
    if not 0.0 < theta < math.pi:
        raise ParameterError("theta must lie in (0, pi)",
                             operation="derivative.circle_derivative")
    spec = a.spec().copy()
    mwin = spec.size
    mult = np.empty(mwin)
    mult[0] = 2.0 * theta
    j = np.arange(1, mwin)
    mult[1:] = 2.0 * np.sin(j * theta) / j
    out = np.fft.irfft(spec * mult, a.grid_size)
    return PeriodicFn(out - 2.0 * math.sin(theta) * a.samples)


def spectrum_d(j: int, theta: float) -> float:
    """Eigenvalue d_j of the circle-case derivative on Fourier mode j."""
    theta = float(theta)
    if not 0.0 < theta < math.pi:
        raise ParameterError("theta must lie in (0, pi)",
                             operation="derivative.spectrum_d")
    j = abs(int(j))
    if j == 0:
        return 2.0 * (theta - math.sin(theta))
    if j == 1:
        return 0.0
    return 2.0 * math.sin(j * theta) / j - 2.0 * math.sin(theta)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues d_j, |j| <= n_max, of the circle-case derivative."""

    theta: float
    n_max: int
    values: np.ndarray  # values[j] = d_j for 0 <= j <= n_max

    @classmethod
    def build(cls, theta: float, n_max: int) -> "Spectrum":
        if n_max < 0:
            raise ParameterError("n_max must be >= 0",
                                 operation="derivative.Spectrum")
        vals = np.array([spectrum_d(j, theta) for j in range(n_max + 1)])
        vals.flags.writeable = False
        return cls(theta=float(theta), n_max=int(n_max), values=vals)

    def __getitem__(self, j: int) -> float:
        j = abs(int(j))
        if j > self.n_max:
            raise ParameterError("mode index out of range",
                                 operation="derivative.Spectrum")
        return float(self.values[j])

    def as_dict(self) -> dict:
        return {j: float(self.values[abs(j)])
                for j in range(-self.n_max, self.n_max + 1)}

    def diagonal(self) -> np.ndarray:
        """Diagonal in the real-mode ordering 0, 1c, 1s, 2c, 2s, ..."""
        out = np.empty(2 * self.n_max + 1)
        out[0] = self.values[0]
        out[1::2] = self.values[1:]
        out[2::2] = self.values[1:]
        return out

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("j,d_j\n")
            for j in range(self.n_max + 1):
                fh.write(f"{j},{_fmt(self.values[j])}\n")


def sine_inequality_check(theta_grid, j_max: int) -> dict:
    """Check that d_j stays away from zero for 2 <= j <= j_max over a
    theta grid, reporting the minimum |d_j| attained."""
    thetas = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    if thetas.size == 0 or thetas.min() <= 0.0 or thetas.max() >= math.pi:
        raise ParameterError("theta grid must lie strictly inside (0, pi)",
                             operation="derivative.sine_inequality_check")
    j_max = int(j_max)
    if j_max < 2:
        raise ParameterError("j_max must be >= 2",
                             operation="derivative.sine_inequality_check")
    js = np.arange(2, j_max + 1)
    d = 2.0 * np.sin(np.outer(js, thetas)) / js[:, None] \
        - 2.0 * np.sin(thetas)[None, :]
    absd = np.abs(d)
    flat = int(np.argmin(absd))
    ji, ti = np.unravel_index(flat, absd.shape)
    return {
        "all_nonzero": bool(absd.min() > 0.0),
        "min_abs_d": float(absd.min()),
        "j_at_min": int(js[ji]),
        "theta_at_min": float(thetas[ti]),
        "j_max": j_max,
        "n_theta": int(thetas.size),
    }


def real_coeff_vector(fn: PeriodicFn, n: int) -> np.ndarray:
    """Real Fourier coefficients of ``fn`` in the ordering
    [const, 1c, 1s, 2c, 2s, ..., nc, ns]."""
    if n > fn.grid_size // 2 - 1:
        raise ParameterError("requested more modes than the grid resolves",
                             operation="derivative.real_coeff_vector")
    spec = fn.spec() / fn.grid_size
    out = np.empty(2 * n + 1)
    out[0] = spec[0].real
    out[1::2] = 2.0 * spec[1: n + 1].real
    out[2::2] = -2.0 * spec[1: n + 1].imag
    return out


def fn_from_real_coeffs(vec, grid_size: int) -> PeriodicFn:
    """Inverse of real_coeff_vector on a grid of the given size."""
    vec = np.asarray(vec, dtype=float)
    if vec.ndim != 1 or vec.size % 2 == 0:
        raise ParameterError("coefficient vector must have odd length",
                             operation="derivative.fn_from_real_coeffs")
    n = (vec.size - 1) // 2
    if n > grid_size // 2 - 1:
        raise ParameterError("more modes than the grid resolves",
                             operation="derivative.fn_from_real_coeffs")
    spec = np.zeros(grid_size // 2 + 1, dtype=complex)
    spec[0] = vec[0]
    spec[1: n + 1] = 0.5 * (vec[1::2] - 1j * vec[2::2])
    return PeriodicFn(np.fft.irfft(spec * grid_size, grid_size))


def basis_mode_fn(idx: int, grid_size: int) -> PeriodicFn:
    """Real basis function number ``idx`` in the ordering
    [1, cos, sin, cos2, sin2, ...]."""
    phis = uniform_grid(grid_size)
    if idx == 0:
        return PeriodicFn(np.ones(grid_size))
    j = (idx + 1) // 2
    if idx % 2 == 1:
        return PeriodicFn(np.cos(j * phis))
    return PeriodicFn(np.sin(j * phis))


@dataclass(frozen=True)
class OperatorMatrix:
    """Collocation matrix of the invariant derivative.

    Rows are real Fourier coefficients of the output profile, columns are
    input basis fields, both in the ordering 0, 1c, 1s, 2c, 2s, ...
    """

    entries: np.ndarray
    basis: str
    n_modes: int
    r: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.entries)):
            raise ConsistencyError("operator matrix has non-finite entries",
                                   operation="derivative.assemble_operator")
        if self.entries.shape != (2 * self.n_modes + 1, 2 * self.n_modes + 1):
            raise ParameterError("matrix shape inconsistent with mode count",
                                 operation="derivative.assemble_operator")

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.entries, compute_uv=False)

    def write_csv(self, path):
        with open(path, "w") as fh:
            for row in self.entries:
                fh.write(",".join(_fmt(v) for v in row) + "\n")

    def write_json(self, path):
        meta = {
            "basis": self.basis,
            "n_modes": self.n_modes,
            "r": float(self.r),
            "rows": int(self.entries.shape[0]),
            "cols": int(self.entries.shape[1]),
            "ordering": "0,1c,1s,2c,2s,...",
        }
        with open(path, "w") as fh:
            json.dump(meta, fh, indent=1)
            fh.write("\n")


def _trig_table(ts, n):
    """Rows [1, cos t, sin t, cos 2t, sin 2t, ...] sampled at ``ts``."""
    js = np.arange(1, n + 1)
    arg = np.outer(js, ts)
    out = np.empty((2 * n + 1, ts.size))
    out[0] = 1.0
    out[1::2] = np.cos(arg)
    out[2::2] = np.sin(arg)
    return out


def _assemble_columns(curve, r, basis, n, pairs):
    dim = 2 * n + 1
    entries = np.empty((dim, dim))
    zero = PeriodicFn(np.zeros(curve.grid_size))
    for col in range(dim):
        mode = basis_mode_fn(col, curve.grid_size)
        if basis == "normal":
            field = lift_normal(mode, curve, check_admissible=False)
        else:
            field = TangentField(zero, mode, curve)
        out = frechet_derivative(curve, r, field, pairs=pairs, validate=False)
        entries[:, col] = real_coeff_vector(out, n)
    return entries


def _assemble_fast(curve, r, basis, n, pairs):
    """All basis columns in one pass.

    For frame fields sigma = a*perp(t) + b*t the boundary integrand
    <sigma, perp(t)> reduces to a*|t|^2, so every column shares one
    weight function and the integral term becomes a trig moment; the
    pointwise terms are batched over columns.
    """
    from .curves import curvature

    mar, par = pairs
    phis = curve.grid
    mg = curve.grid_size
    x0, y0 = curve.grid_xy()
    dxg, dyg = curve.grid_d1()
    xp, yp = kernels.curve_points(*curve.packed(), par)
    xm, ym = kernels.curve_points(*curve.packed(), mar)
    dxp, dyp = kernels.curve_d1(*curve.packed(), par)
    dxm, dym = kernels.curve_d1(*curve.packed(), mar)
    Px, Py = xp - x0, yp - y0
    Mx, My = xm - x0, ym - y0
    r2 = r * r
    u = Px * Mx + Py * My
    den_p = dxp * Px + dyp * Py
    den_m = dxm * Mx + dym * My
    root2 = r2 * r2 - u * u
    thresh = NEAR_SINGULAR_REL * r2
    if min(np.abs(den_p).min(), np.abs(den_m).min()) < thresh \
            or root2.min() < thresh * thresh:
        raise NearSingularError(
            "chord configuration is nearly tangential: crossing-parameter "
            "derivatives are ill-defined",
            operation="derivative.assemble_operator")
    root = np.sqrt(root2)

    dim = 2 * n + 1
    t_phi = _trig_table(phis, n)
    t_p = _trig_table(par, n)
    t_m = _trig_table(mar, n)
    if basis == "normal":
        a_phi, a_p, a_m = t_phi, t_p, t_m
        # tangential completion: db/dphi = a*kappa*speed - mean, b(0) = 0
        g = t_phi * (curvature(curve, phis) * np.hypot(dxg, dyg))[None, :]
        spec = np.fft.rfft(g, axis=1)
        bspec = np.zeros_like(spec)
        karr = np.arange(1, spec.shape[1])
        bspec[:, 1:] = spec[:, 1:] / (1j * karr)
        if mg % 2 == 0:
            bspec[:, -1] = 0.0
        b_phi = np.fft.irfft(bspec, mg, axis=1)
        b_phi -= b_phi[:, :1]
        # evaluate the b series at the crossing parameters
        mag = np.abs(bspec[:, 1:]).max(axis=0)
        nz = np.nonzero(mag > 1e-15 * max(mag.max(), 1e-300))[0]
        keff = karr[: (int(nz[-1]) + 1)] if nz.size else karr[:1]
        bc = bspec[:, keff]
        offset = -(2.0 / mg) * bc.sum(axis=1).real
        b_p = (2.0 / mg) * (bc @ np.exp(1j * np.outer(keff, par))).real \
            + offset[:, None]
        b_m = (2.0 / mg) * (bc @ np.exp(1j * np.outer(keff, mar))).real \
            + offset[:, None]
        wsup = float((dxg * dxg + dyg * dyg).max())
        scale = max(1.0, r2) * (1.0 + wsup)
        cmom, smom, errs = kernels.trig_moment_quad(
            *curve.packed(), mar, par, n,
            GL_NODES, GL_WEIGHTS, GL_COUNTS, GL_TOL * scale)
        if errs.max() > 1e-10 * scale:
            raise ConsistencyError(
                "moment quadrature failed to converge",
                operation="derivative.assemble_operator")
        t1 = np.empty((dim, mg))
        t1[0] = 2.0 * cmom[:, 0]
        t1[1::2] = 2.0 * cmom[:, 1:].T
        t1[2::2] = 2.0 * smom[:, 1:].T
    else:
        zero = np.zeros((dim, mg))
        a_phi = a_p = a_m = zero
        b_phi, b_p, b_m = t_phi, t_p, t_m
        t1 = 0.0

    # frame fields at phi and at the crossing parameters
    sx_phi = a_phi * dyg + b_phi * dxg
    sy_phi = -a_phi * dxg + b_phi * dyg
    sx_p = a_p * dyp + b_p * dxp
    sy_p = -a_p * dxp + b_p * dyp
    sx_m = a_m * dym + b_m * dxm
    sy_m = -a_m * dxm + b_m * dym

    dp = ((sx_phi - sx_p) * Px + (sy_phi - sy_p) * Py) / den_p
    dm = ((sx_phi - sx_m) * Mx + (sy_phi - sy_m) * My) / den_m
    t2 = -(sx_phi * (yp - ym) - sy_phi * (xp - xm))
    t3 = (Px * sy_p - Py * sx_p) - (Mx * sy_m - My * sx_m)
    t4 = (Px * dyp - Py * dxp) * dp - (Mx * dym - My * dxm) * dm
    bracket = (dp * (dxp * Mx + dyp * My)
               + (sx_p - sx_phi) * Mx + (sy_p - sy_phi) * My
               + Px * (sx_m - sx_phi) + Py * (sy_m - sy_phi)
               + dm * (Px * dxm + Py * dym))
    t5 = -(r2 / root) * bracket
    profiles = 0.5 * (t1 + t2 + t3 + t4 + t5)

    spec_out = np.fft.rfft(profiles, axis=1) / mg
    entries = np.empty((dim, dim))
    entries[0] = spec_out[:, 0].real
    entries[1::2] = 2.0 * spec_out[:, 1: n + 1].real.T
    entries[2::2] = -2.0 * spec_out[:, 1: n + 1].imag.T
    return entries


def assemble_operator(curve: Curve, r: float, basis: str = "normal", *,
                      n_modes=None, validate=True,
                      method: str = "fast") -> OperatorMatrix:
    """Collocation matrix of the invariant derivative at ``curve``.

    basis "normal": columns are Fourier modes of the normal component,
    completed to fields tangent to the constant-speed family via
    lift_normal.  basis "tangent": columns are Fourier modes multiplying
    the velocity (purely tangential motions).  ``method`` "fast" batches
    all columns through shared trig moments; "columns" applies
    frechet_derivative per column (reference path).
    """
    if basis not in ("normal", "tangent"):
        raise ParameterError("basis must be 'normal' or 'tangent'",
                             operation="derivative.assemble_operator")
    if method not in ("fast", "columns"):
        raise ParameterError("method must be 'fast' or 'columns'",
                             operation="derivative.assemble_operator")
    if r <= 0:
        raise ParameterError("r must be positive",
                             operation="derivative.assemble_operator")
    n = curve.n_modes if n_modes is None else int(n_modes)
    if n > curve.grid_size // 2 - 1:
        raise ParameterError("more modes than the curve grid resolves",
                             operation="derivative.assemble_operator")
    if validate:
        ensure_regular(curve, operation="derivative.assemble_operator")
        ensure_embedded(curve, operation="derivative.assemble_operator")
        _validate_neighborhood(curve, r, "derivative.assemble_operator")
    pairs = _newton_pair_arrays(curve, r, curve.grid)
    if method == "fast":
        entries = _assemble_fast(curve, r, basis, n, pairs)
    else:
        entries = _assemble_columns(curve, r, basis, n, pairs)
    return OperatorMatrix(entries=entries, basis=basis, n_modes=n, r=float(r))


def constraint_rows(n: int) -> np.ndarray:
    """Rows expressing a(0) = 0 and a'(0) = 0 in the real-mode ordering."""
    c = np.zeros((2, 2 * n + 1))
    c[0, 0] = 1.0
    c[0, 1::2] = 1.0                  # cos modes at phi=0
    c[1, 2::2] = np.arange(1, n + 1)  # d/dphi of sin modes at phi=0
    return c


def injectivity_margin(matrix, constrained: bool = True) -> float:
    """Smallest singular value of the operator, after restricting to the
    subspace a(0) = a'(0) = 0 when ``constrained``."""
    a = matrix.entries if isinstance(matrix, OperatorMatrix) else np.asarray(matrix)
    if a.ndim != 2 or a.shape[1] % 2 == 0:
        raise ParameterError("need a matrix with an odd number of columns",
                             operation="derivative.injectivity_margin")
    if not constrained:
        return float(np.linalg.svd(a, compute_uv=False)[-1])
    n = (a.shape[1] - 1) // 2
    z = null_space(constraint_rows(n))
    return float(np.linalg.svd(a @ z, compute_uv=False)[-1])
