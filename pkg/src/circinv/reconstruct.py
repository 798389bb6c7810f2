"""Gauss-Newton inversion of the invariant profile near the circle and an
empirical estimate of the stability constant.

The forward map is inverted in normal-field coordinates: each step solves
the collocation linear system for a normal perturbation subject to the
pinning constraints a(0) = a'(0) = 0, lifts it to a field tangent to the
constant-speed family, and renormalizes.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from .curves import (Curve, curve_ck_dist, lift_normal, make_circle, normalize,
                     sample_perturbed_circle)
from .derivative import (assemble_operator, constraint_rows, fn_from_real_coeffs,
                         real_coeff_vector, spectrum_d)
from .errors import ConvergenceError, ParameterError, TopologyError
from .fourier import PeriodicFn
from .invariant import InvariantProfile, _fmt, invariant_analytic, theta_circle

MAX_HALVINGS = 5
STAGNATION_RATIO = 0.99
STAGNATION_STEPS = 5


@dataclass
class ReconstructionProblem:
    """Inputs of one inversion run.

    target: profile to invert; r: disk radius; init: starting curve
    (unit circle on the target grid by default); damping in (0, 1].
    """

    target: InvariantProfile
    r: float
    init: Curve = None
    max_iter: int = 50
    tol_residual: float = 1e-10
    damping: float = 1.0

    def __post_init__(self):
        if self.r <= 0:
            raise ParameterError("r must be positive",
                                 operation="reconstruct.reconstruct")
        if not 0.0 < self.damping <= 1.0:
            raise ParameterError("damping must lie in (0, 1]",
                                 operation="reconstruct.reconstruct")
        if self.max_iter < 1:
            raise ParameterError("max_iter must be >= 1",
                                 operation="reconstruct.reconstruct")
        if self.init is None:
            m = self.target.values.grid_size
            self.init = make_circle(1.0, max(4, m // 16), m)
        if self.target.values.grid_size != self.init.grid_size:
            raise ParameterError("target profile length must match the grid",
                                 operation="reconstruct.reconstruct")


def _constrained_nullspace(n: int, scale: np.ndarray) -> np.ndarray:
    """Map from reduced coordinates to coefficient vectors satisfying
    a(0) = a'(0) = 0, with diagonal column scaling folded in."""
    dinv = np.diag(1.0 / scale)
    z = null_space(constraint_rows(n) @ dinv)
    return dinv @ z


def _step_scaling(n: int, r: float) -> np.ndarray:
    """Diagonal preconditioner: the circle-operator eigenvalues in the
    real-mode ordering, with the kernel modes replaced by the tail value."""
    theta = theta_circle(r)
    tail = 2.0 * abs(np.sin(theta))
    diag = np.empty(2 * n + 1)
    diag[0] = spectrum_d(0, theta)
    for j in range(1, n + 1):
        dj = spectrum_d(j, theta)
        diag[2 * j - 1] = dj
        diag[2 * j] = dj
    small = np.abs(diag) < 1e-3 * tail
    diag[small] = tail
    return np.abs(diag)


def reconstruct(problem: ReconstructionProblem):
    """Damped Gauss-Newton inversion of the invariant profile.

    Returns (curve, trace) where trace is a list of
    {"iter", "residual", "step_norm"} records, one per accepted iterate.
    Raises a non-convergence error on residual stagnation and a topology
    error if an iterate leaves the two-crossing neighborhood; both carry
    the last valid iterate.
    """
    r = float(problem.r)
    n = problem.init.n_modes
    m = problem.init.grid_size
    cur = normalize(problem.init, validate=True)
    target = problem.target.values.samples
    trace = []
    stall = 0

    def profile_of(curve, last_valid):
        try:
            return invariant_analytic(curve, r, validate=True)
        except TopologyError as exc:
            raise TopologyError(
                "iterate left the two-crossing neighborhood",
                operation="reconstruct.reconstruct",
                last_valid=last_valid) from exc

    prof = profile_of(cur, None)
    res = float(np.abs(target - prof.values.samples).max())
    trace.append({"iter": 0, "residual": res, "step_norm": 0.0})
    zmap = _constrained_nullspace(n, _step_scaling(n, r))

    for it in range(1, problem.max_iter + 1):
        if res <= problem.tol_residual:
            break
        op = assemble_operator(cur, r, basis="normal", n_modes=n, validate=False)
        rhs = real_coeff_vector(PeriodicFn(target - prof.values.samples), n)
        t, *_ = np.linalg.lstsq(op.entries @ zmap, rhs, rcond=None)
        a_fn = fn_from_real_coeffs(zmap @ t, m)
        step_field = lift_normal(a_fn, cur, check_admissible=False)

        damp = problem.damping
        accepted = None
        for _ in range(MAX_HALVINGS + 1):
            trial = normalize(step_field.perturb(damp), n_modes=n,
                              grid_size=m, validate=False)
            trial_prof = profile_of(trial, cur)
            trial_res = float(np.abs(target - trial_prof.values.samples).max())
            if trial_res <= res:
                accepted = (trial, trial_prof, trial_res, damp)
                break
            damp *= 0.5
        if accepted is None:
            # no damped step improves the residual: the iteration has hit
            # the discretization floor, keep the current iterate
            break
        cur, prof, new_res, damp = accepted
        sx, sy = step_field.field_samples()
        trace.append({
            "iter": it,
            "residual": new_res,
            "step_norm": float(damp * np.hypot(sx, sy).max()),
        })
        stall = stall + 1 if new_res > STAGNATION_RATIO * res else 0
        res = new_res
        if stall >= STAGNATION_STEPS:
            raise ConvergenceError(
                f"residual stagnated at {res:.3e} after {it} iterations",
                operation="reconstruct.reconstruct",
                last_valid=cur, trace=trace)
    return cur, trace


def write_trace(trace, path):
    with open(path, "w") as fh:
        json.dump(trace, fh, indent=1)
        fh.write("\n")


@dataclass(frozen=True)
class StabilityReport:
    """Empirical lower-bound data for the stability inequality
    ||I[gamma] - I[gamma~]||_k >= c * ||gamma - gamma~||_k."""

    pairs: list  # (dI_k, dgamma_k) tuples
    c_hat: float
    k: int
    r: float
    amplitude: float
    seed: int
    grid_size: int

    def to_dict(self) -> dict:
        return {
            "c_hat": self.c_hat,
            "k": self.k,
            "n_pairs": len(self.pairs),
            "r": self.r,
            "amplitude": self.amplitude,
            "seed": self.seed,
            "grid_size": self.grid_size,
        }

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("dI_k,dgamma_k\n")
            for di, dg in self.pairs:
                fh.write(f"{_fmt(di)},{_fmt(dg)}\n")

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")


def stability_estimate(n_pairs: int, amplitude: float, r: float, k: int, *,
                       seed: int = 0, n_modes: int = 32, grid_size: int = 512,
                       min_dist: float = 1e-8,
                       max_retries: int = 50) -> StabilityReport:
    """Minimum ratio ||dI||_k / ||dgamma||_k over random pairs of
    normalized perturbed circles; a strictly positive value is the
    empirical stability constant.

    Pairs closer than ``min_dist`` in C^k, and curves outside the
    two-crossing neighborhood, are resampled (bounded retries).
    """
    if n_pairs < 1:
        raise ParameterError("n_pairs must be >= 1",
                             operation="reconstruct.stability_estimate")
    if k < 0:
        raise ParameterError("k must be >= 0",
                             operation="reconstruct.stability_estimate")
    rng = np.random.default_rng(seed)
    retries = 0

    def draw():
        nonlocal retries
        while True:
            cur = sample_perturbed_circle(rng, amplitude, n_modes=n_modes,
                                          grid_size=grid_size)
            try:
                return cur, invariant_analytic(cur, r, validate=True)
            except TopologyError:
                retries += 1
                if retries > max_retries:
                    raise

    pairs = []
    while len(pairs) < n_pairs:
        ca, pa = draw()
        cb, pb = draw()
        dg = curve_ck_dist(ca, cb, k)
        if dg < min_dist:
            retries += 1
            if retries > max_retries:
                raise ConvergenceError(
                    "could not sample enough distinct curve pairs",
                    operation="reconstruct.stability_estimate")
            continue
        di = (pa.values - pb.values).ck_norm(k)
        pairs.append((float(di), float(dg)))
    c_hat = min(di / dg for di, dg in pairs)
    return StabilityReport(pairs=pairs, c_hat=float(c_hat), k=int(k),
                           r=float(r), amplitude=float(amplitude),
                           seed=int(seed), grid_size=int(grid_size))
