"""Periodic scalar functions on [0, 2pi) with spectral operations.

A PeriodicFn is stored as uniform samples; derivatives, antiderivatives
and off-grid evaluation go through the FFT.  Off-grid evaluation uses
the standard symmetric trigonometric interpolant (Nyquist cosine kept at
half weight), which reproduces the samples exactly and is spectrally
accurate for smooth data.
"""

from functools import lru_cache

import numpy as np

from . import kernels
from .errors import ParameterError


@lru_cache(maxsize=64)
def uniform_grid(m: int) -> np.ndarray:
    g = 2.0 * np.pi * np.arange(m) / m
    g.setflags(write=False)
    return g


def packed_from_rfft(spec, m):
    """Cos/sin coefficient arrays of the trig interpolant from an rfft."""
    half = m // 2
    c = np.zeros(half + 1)
    s = np.zeros(half + 1)
    c[0] = spec[0].real / m
    c[1:half] = 2.0 * spec[1:half].real / m
    s[1:half] = -2.0 * spec[1:half].imag / m
    if m % 2 == 0:
        c[half] = spec[half].real / m
    else:
        c[half] = 2.0 * spec[half].real / m
        s[half] = -2.0 * spec[half].imag / m
    return c, s


def trim_packed(c, s, rel=1e-13, floor=0.0):
    """Drop trailing modes whose summed magnitude is below the threshold
    max(rel*scale, floor).

    Internal speed knob for kernel calls: the dropped tail perturbs
    evaluations by at most the threshold in absolute value, while cutting
    FFT-roundoff noise modes that would otherwise dominate the cost.  The
    absolute ``floor`` matters for series that are themselves tiny relative
    to the quantity they feed into (a relative cut alone would keep their
    noise modes)."""
    mag = np.abs(c) + np.abs(s)
    scale = mag.max()
    thresh = max(rel * scale, floor)
    if scale == 0.0 or thresh <= 0.0:
        return np.ascontiguousarray(c[:1]), np.ascontiguousarray(s[:1])
    tail = np.cumsum(mag[::-1])[::-1]
    keep = np.nonzero(tail > thresh)[0]
    last = int(keep[-1]) if keep.size else 0
    return np.ascontiguousarray(c[: last + 1]), np.ascontiguousarray(s[: last + 1])


class PeriodicFn:
    """Real function on the circle held as uniform grid samples."""

    __slots__ = ("samples", "_spec", "_packed")

    def __init__(self, samples):
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 1 or arr.size < 4:
            raise ParameterError("need a 1-d sample array of length >= 4",
                                 operation="fourier.PeriodicFn")
        self.samples = arr
        self._spec = None
        self._packed = None

    @classmethod
    def from_callable(cls, f, grid_size):
        return cls(f(uniform_grid(grid_size)))

    @classmethod
    def from_coeffs(cls, coeffs, grid_size):
        """Build from centered complex coefficients (modes -N..N)."""
        coeffs = np.asarray(coeffs, dtype=complex)
        n = (coeffs.size - 1) // 2
        if coeffs.size != 2 * n + 1:
            raise ParameterError("centered coefficient array must have odd length",
                                 operation="fourier.PeriodicFn.from_coeffs")
        if grid_size < 2 * n + 2:
            raise ParameterError("grid size too small for the given modes",
                                 operation="fourier.PeriodicFn.from_coeffs")
        spec = np.zeros(grid_size // 2 + 1, dtype=complex)
        spec[: n + 1] = coeffs[n:] * grid_size
        return cls(np.fft.irfft(spec, grid_size))

    @property
    def grid_size(self) -> int:
        return self.samples.size

    @property
    def grid(self) -> np.ndarray:
        return uniform_grid(self.samples.size)

    def spec(self):
        if self._spec is None:
            self._spec = np.fft.rfft(self.samples)
        return self._spec

    def packed(self):
        if self._packed is None:
            self._packed = packed_from_rfft(self.spec(), self.samples.size)
        return self._packed

    def coeffs(self, n_modes=None):
        """Centered complex coefficients, modes -N..N."""
        m = self.samples.size
        nmax = (m - 1) // 2
        n = nmax if n_modes is None else int(n_modes)
        if n > m // 2:
            raise ParameterError("requested more modes than the grid resolves",
                                 operation="fourier.PeriodicFn.coeffs")
        spec = self.spec()
        top = min(n, m // 2 - 1) if m % 2 == 0 else min(n, nmax)
        pos = np.zeros(n + 1, dtype=complex)
        pos[: top + 1] = spec[: top + 1] / m
        out = np.empty(2 * n + 1, dtype=complex)
        out[n:] = pos
        out[:n] = np.conj(pos[1:][::-1])
        return out

    def eval(self, phi):
        phis = np.atleast_1d(np.asarray(phi, dtype=float))
        c, s = self.packed()
        vals = kernels.eval_series(c, s, np.ascontiguousarray(phis))
        return vals[0] if np.isscalar(phi) or np.ndim(phi) == 0 else vals

    def derivative(self, order=1):
        m = self.samples.size
        spec = self.spec().copy()
        j = np.arange(spec.size)
        spec *= (1j * j) ** order
        if m % 2 == 0 and order % 2 == 1:
            spec[-1] = 0.0
        return PeriodicFn(np.fft.irfft(spec, m))

    def cumulative(self):
        """(mean, P) with P' = f - mean, P periodic and P(0) = 0."""
        m = self.samples.size
        spec = self.spec()
        mean = spec[0].real / m
        anti = np.zeros_like(spec)
        j = np.arange(1, spec.size)
        anti[1:] = spec[1:] / (1j * j)
        if m % 2 == 0:
            anti[-1] = 0.0
        p = np.fft.irfft(anti, m)
        return mean, PeriodicFn(p - p[0])

    def mean(self) -> float:
        return float(self.samples.mean())

    def sup(self) -> float:
        return float(np.abs(self.samples).max())

    def ck_norm(self, k: int) -> float:
        if k < 0:
            raise ParameterError("order must be >= 0", operation="fourier.PeriodicFn.ck_norm")
        out = self.sup()
        f = self
        for _ in range(k):
            f = f.derivative()
            out = max(out, f.sup())
        return out

    def shift_grid(self, steps: int):
        """g with g(phi) = f(phi + steps*2pi/M)."""
        return PeriodicFn(np.roll(self.samples, -steps))

    def __add__(self, other):
        if isinstance(other, PeriodicFn):
            return PeriodicFn(self.samples + other.samples)
        return PeriodicFn(self.samples + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, PeriodicFn):
            return PeriodicFn(self.samples - other.samples)
        return PeriodicFn(self.samples - other)

    def __mul__(self, other):
        if isinstance(other, PeriodicFn):
            return PeriodicFn(self.samples * other.samples)
        return PeriodicFn(self.samples * other)

    __rmul__ = __mul__

    def __neg__(self):
        return PeriodicFn(-self.samples)
