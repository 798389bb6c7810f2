"""Acceptance gate: the nine headline guarantees, one test (and one
pass/fail line under ``pytest -v``) each, at their stated tolerances.

Each test prints a one-line measurement summary; run with ``-s`` (or look
at captured output on failure) to see the numbers.
"""

import time

import numpy as np
import pytest
from click.testing import CliRunner

import circinv
from circinv import (PeriodicFn, Spectrum, assemble_operator,
                     injectivity_margin, invariance_suite, invariant_analytic,
                     invariant_oracle, lift_normal, make_circle,
                     sample_perturbed_circle, sine_inequality_check,
                     stability_estimate)
from circinv.cli import main as cli_main
from circinv.reconstruct import ReconstructionProblem, reconstruct

THETA = np.pi / 3


def test_criterion_1_oracle_equivalence():
    # 50 random admissible curves, r in {0.5, 1.0, 1.5}:
    # analytic formula and disk/polygon oracle agree to 1e-6 * r^2
    t0 = time.time()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        amp = rng.uniform(0.01, 0.05)
        cur = sample_perturbed_circle(rng, amp, n_modes=32, grid_size=512)
        for r in (0.5, 1.0, 1.5):
            prof = invariant_analytic(cur, r)
            oracle = invariant_oracle(cur, r)
            dev = np.abs(prof.values.samples - oracle).max() / (r * r)
            worst = max(worst, dev)
    elapsed = time.time() - t0
    print(f"\ncriterion 1: max |analytic - oracle|/r^2 = {worst:.3e} "
          f"(tol 1e-6), runtime {elapsed:.1f}s (limit 60s)")
    assert worst <= 1e-6
    assert elapsed <= 60.0


def test_criterion_2_circle_closed_form():
    # unit circle at r=1: constant profile equal to the classical
    # two-disk lens area 2*pi/3 - sqrt(3)/2
    want = 2 * np.pi / 3 - np.sqrt(3) / 2
    circle = make_circle(1.0, 32, 512)
    vals = invariant_analytic(circle, 1.0).values.samples
    dev_analytic = np.abs(vals - want).max()
    dev_oracle = np.abs(invariant_oracle(circle, 1.0) - want).max()
    print(f"\ncriterion 2: |analytic - lens| = {dev_analytic:.3e}, "
          f"|oracle - lens| = {dev_oracle:.3e} (tol 1e-8 / 1e-6)")
    assert dev_analytic <= 1e-8
    assert dev_oracle <= 1e-6


def test_criterion_3_derivative_finite_differences():
    # 20 random (curve, field): central differences of the invariant
    # reproduce the derivative at second order in eps
    rng = np.random.default_rng(7)
    slopes, errs4 = [], []
    for _ in range(20):
        cur = sample_perturbed_circle(rng, 0.02, n_modes=16, grid_size=256)
        g = cur.grid
        a = np.zeros(cur.grid_size)
        for j in range(2, 9):
            c = rng.standard_normal(2)
            a += c[0] * np.cos(j * g) + c[1] * np.sin(j * g)
        a /= np.abs(a).max()
        field = lift_normal(PeriodicFn(a), cur, check_admissible=False)
        der = circinv.frechet_derivative(cur, 1.0, field)
        sup = np.abs(der.samples).max()
        errs = []
        for eps in (1e-2, 1e-3, 1e-4):
            ip = invariant_analytic(field.perturb(+eps), 1.0, validate=False)
            im = invariant_analytic(field.perturb(-eps), 1.0, validate=False)
            fd = (ip.values.samples - im.values.samples) / (2 * eps)
            errs.append(np.abs(fd - der.samples).max() / sup)
        slopes.append(np.log10(errs[0] / errs[1]))
        errs4.append(errs[2])
    print(f"\ncriterion 3: slope range [{min(slopes):.3f}, {max(slopes):.3f}] "
          f"(want 2.0 +- 0.1), max rel err at eps=1e-4 = {max(errs4):.2e} "
          f"(tol 1e-6)")
    assert all(abs(s - 2.0) <= 0.1 for s in slopes)
    assert max(errs4) <= 1e-6


def test_criterion_4_spectral_diagonalization():
    # collocation matrix at the unit circle is diag(d_j) entrywise to
    # 1e-8 for |j| <= 32; tangential directions are annihilated
    circle = make_circle(1.0, 32, 512)
    op = assemble_operator(circle, 1.0)
    want = np.diag(Spectrum.build(THETA, 32).diagonal())
    dev = np.abs(op.entries - want).max()
    tangent = assemble_operator(circle, 1.0, basis="tangent")
    tdev = np.abs(tangent.entries).max()
    print(f"\ncriterion 4: |matrix - diag(d_j)| = {dev:.3e} (tol 1e-8), "
          f"tangential response = {tdev:.3e} (tol 1e-9)")
    assert dev <= 1e-8
    assert tdev <= 1e-9


def test_criterion_5_kernel_and_injectivity():
    # exactly the two translation modes are flat; with a(0) = a'(0) = 0
    # imposed the operator is uniformly injective; d_j stays away from 0
    circle = make_circle(1.0, 32, 512)
    op = assemble_operator(circle, 1.0)
    n_flat = int((op.singular_values() < 1e-8).sum())
    margin = injectivity_margin(op)
    sine = sine_inequality_check(np.linspace(0.05, np.pi - 0.05, 100), 64)
    print(f"\ncriterion 5: flat singular values = {n_flat} (want 2), "
          f"constrained margin = {margin:.4f} (need >= 0.01), "
          f"min |d_j| over grid = {sine['min_abs_d']:.3e} (> 0)")
    assert n_flat == 2
    assert margin >= 0.01
    assert sine["all_nonzero"]


def test_criterion_6_stability_constant():
    # 200 pairs, amplitude 0.02, r=1, k=1: positive c_hat, stable across
    # grid resolutions, inside the runtime budget
    t0 = time.time()
    rep_lo = stability_estimate(200, 0.02, 1.0, 1, seed=2024, n_modes=16,
                                grid_size=256)
    rep_hi = stability_estimate(200, 0.02, 1.0, 1, seed=2024, n_modes=32,
                                grid_size=512)
    elapsed = time.time() - t0
    spread = abs(rep_hi.c_hat - rep_lo.c_hat) / rep_hi.c_hat
    print(f"\ncriterion 6: c_hat = {rep_lo.c_hat:.5f} (M=256) / "
          f"{rep_hi.c_hat:.5f} (M=512), spread {100 * spread:.2f}% "
          f"(< 50%), runtime {elapsed:.1f}s (limit 120s)")
    assert rep_lo.c_hat > 0
    assert rep_hi.c_hat > 0
    assert spread < 0.5
    assert elapsed <= 120.0


def test_criterion_7_reconstruction_round_trip():
    # 20 synthetic targets (amplitude 0.02, modes <= 8, r cycling over
    # {0.8, 1.0, 1.2}) recovered to 1e-6 sup-norm within 50 iterations
    rng = np.random.default_rng(99)
    radii = (0.8, 1.0, 1.2)
    worst_dev, worst_iters = 0.0, 0
    for i in range(20):
        r = radii[i % 3]
        gstar = sample_perturbed_circle(rng, 0.02, n_modes=32, grid_size=512)
        target = invariant_analytic(gstar, r)
        rec, trace = reconstruct(ReconstructionProblem(
            target=target, r=r, tol_residual=3e-8))
        worst_dev = max(worst_dev, circinv.curve_ck_dist(rec, gstar, 0))
        worst_iters = max(worst_iters, len(trace))
        res = [t["residual"] for t in trace]
        assert all(b <= a * (1 + 1e-12) for a, b in zip(res[1:], res[2:]))
    print(f"\ncriterion 7: worst recovery dev = {worst_dev:.3e} (tol 1e-6), "
          f"worst iterations = {worst_iters} (limit 50)")
    assert worst_dev <= 1e-6
    assert worst_iters <= 50


def test_criterion_8_invariance_suite():
    # Euclidean motions, grid shifts, and the scaling law on 20 curves
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(20):
        cur = sample_perturbed_circle(rng, 0.03, n_modes=16, grid_size=256)
        worst = max(worst, invariance_suite(cur, 1.0).max_dev)
    print(f"\ncriterion 8: worst invariance deviation = {worst:.3e} "
          f"(tol 1e-9)")
    assert worst <= 1e-9


def test_criterion_9_byte_determinism(tmp_path):
    # identical config + seed => byte-identical artifacts
    runner = CliRunner()
    files = ("stability.json", "stability_pairs.csv", "spectrum.csv",
             "spectrum.json")
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        for args in (
            ["stability", "--pairs", "3", "--seed", "11", "--modes", "16",
             "--grid", "256", "--out", str(out)],
            ["spectrum", "--r", "1.0", "--modes", "32", "--out", str(out)],
        ):
            res = runner.invoke(cli_main, args)
            assert res.exit_code == 0
        outs.append(out)
    same = all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
               for f in files)
    print(f"\ncriterion 9: repeated runs byte-identical over "
          f"{len(files)} artifacts: {same}")
    assert same
