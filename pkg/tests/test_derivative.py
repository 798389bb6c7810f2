"""Directional derivative of the invariant, its circle-case spectrum, and
the collocation operator used for inversion."""

import json

import numpy as np
import pytest

import circinv
from circinv import (PeriodicFn, Spectrum, assemble_operator,
                     circle_derivative, frechet_derivative,
                     injectivity_margin, invariant_analytic, lift_normal,
                     make_circle, sample_perturbed_circle, spectrum_d,
                     theta_circle)
from circinv.derivative import (basis_mode_fn, constraint_rows,
                                fn_from_real_coeffs, real_coeff_vector,
                                sine_inequality_check)
from circinv.errors import (NearSingularError, ParameterError)

THETA = np.pi / 3  # theta at r = 1 on the unit circle


def _band_limited_a(rng, grid, lo=2, hi=8):
    a = np.zeros(grid.size)
    for j in range(lo, hi + 1):
        c = rng.standard_normal(2)
        a += c[0] * np.cos(j * grid) + c[1] * np.sin(j * grid)
    return PeriodicFn(a)


# ---------------------------------------------------------------- spectrum

def test_spectrum_closed_forms():
    # convolution with the arc indicator has Fourier multipliers 2 sin(j
    # theta)/j (and 2 theta at j=0); subtracting 2 sin(theta) Id gives d_j
    assert spectrum_d(0, THETA) == pytest.approx(2 * np.pi / 3 - np.sqrt(3),
                                                 abs=1e-15)
    assert spectrum_d(1, THETA) == 0.0
    assert spectrum_d(-1, THETA) == 0.0
    assert spectrum_d(2, THETA) == pytest.approx(-np.sqrt(3) / 2, abs=1e-15)
    assert spectrum_d(3, THETA) == pytest.approx(-np.sqrt(3), abs=1e-15)
    for j in (2, 5, 11):
        want = 2 * np.sin(j * THETA) / j - 2 * np.sin(THETA)
        assert spectrum_d(j, THETA) == pytest.approx(want, abs=1e-15)
        assert spectrum_d(-j, THETA) == spectrum_d(j, THETA)


def test_spectrum_container():
    spec = Spectrum.build(THETA, 8)
    assert spec[3] == spec[-3] == spectrum_d(3, THETA)
    assert spec[1] == 0.0
    d = spec.as_dict()
    assert set(d) == set(range(-8, 9))
    diag = spec.diagonal()
    assert diag.shape == (17,)
    assert diag[0] == spec[0]
    assert diag[3] == diag[4] == spec[2]
    with pytest.raises(ParameterError):
        spec[9]
    with pytest.raises(ParameterError):
        Spectrum.build(THETA, -1)


def test_spectrum_csv(tmp_path):
    spec = Spectrum.build(THETA, 4)
    path = tmp_path / "spec.csv"
    spec.write_csv(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "j,d_j"
    assert len(lines) == 6
    j, val = lines[2].split(",")
    assert j == "1"
    assert float(val) == 0.0


def test_sine_inequality_check():
    grid = np.linspace(0.05, np.pi - 0.05, 100)
    rep = sine_inequality_check(grid, 64)
    assert rep["all_nonzero"]
    assert rep["min_abs_d"] > 0
    assert rep["j_max"] == 64
    assert rep["n_theta"] == 100
    # the binding configuration is the low mode at the smallest angle,
    # where 2 sin(j t)/j - 2 sin(t) = (j^2-1) t^3/3 + O(t^5) is tiny
    assert rep["j_at_min"] == 2
    assert rep["theta_at_min"] == pytest.approx(0.05, abs=1e-12)
    t = 0.05
    assert rep["min_abs_d"] == pytest.approx(
        abs(np.sin(2 * t) - 2 * np.sin(t)), abs=1e-12)


# ------------------------------------------------- circle-case derivative

def test_circle_derivative_eigenfunctions():
    g = circinv.fourier.uniform_grid(256)
    for j in range(9):
        for wave in (np.cos, np.sin):
            if j == 0 and wave is np.sin:
                continue
            out = circle_derivative(PeriodicFn(wave(j * g)), THETA)
            want = spectrum_d(j, THETA) * wave(j * g)
            np.testing.assert_allclose(out.samples, want, rtol=0, atol=1e-13)


def test_frechet_matches_circle_formula(unit_circle):
    rng = np.random.default_rng(0)
    a = _band_limited_a(rng, unit_circle.grid)
    field = lift_normal(a, unit_circle, check_admissible=False)
    got = frechet_derivative(unit_circle, 1.0, field)
    want = circle_derivative(a, THETA)
    assert np.abs(got.samples - want.samples).max() < 1e-9


def test_frechet_single_mode_at_circle(unit_circle):
    g = unit_circle.grid
    field = lift_normal(PeriodicFn(np.cos(2 * g)), unit_circle,
                        check_admissible=False)
    out = frechet_derivative(unit_circle, 1.0, field)
    np.testing.assert_allclose(out.samples, spectrum_d(2, THETA) * np.cos(2 * g),
                               rtol=0, atol=1e-12)


def test_frechet_annihilates_tangential_fields(unit_circle):
    # reparameterization directions do not change the invariant
    g = unit_circle.grid
    dx, dy = unit_circle.grid_d1()
    b = np.sin(3 * g) + 0.4 * np.cos(g)
    sig = np.column_stack([b * dx, b * dy])
    out = frechet_derivative(unit_circle, 1.0, sig)
    assert np.abs(out.samples).max() < 1e-9


def test_frechet_zero_field(unit_circle):
    sig = np.zeros((unit_circle.grid_size, 2))
    out = frechet_derivative(unit_circle, 1.0, sig)
    assert np.abs(out.samples).max() == 0.0


def test_frechet_linearity(wobbly):
    rng = np.random.default_rng(4)
    a1 = _band_limited_a(rng, wobbly.grid)
    a2 = _band_limited_a(rng, wobbly.grid)
    f1 = lift_normal(a1, wobbly, check_admissible=False)
    f2 = lift_normal(a2, wobbly, check_admissible=False)
    comb = lift_normal(a1 * 2.0 + a2 * (-0.5), wobbly, check_admissible=False)
    d1 = frechet_derivative(wobbly, 0.9, f1)
    d2 = frechet_derivative(wobbly, 0.9, f2)
    dc = frechet_derivative(wobbly, 0.9, comb)
    lin = 2.0 * d1.samples - 0.5 * d2.samples
    scale = np.abs(dc.samples).max()
    assert np.abs(dc.samples - lin).max() < 1e-11 * max(1.0, scale)


def test_frechet_finite_difference_consistency(wobbly):
    rng = np.random.default_rng(9)
    a = _band_limited_a(rng, wobbly.grid)
    a = PeriodicFn(a.samples / np.abs(a.samples).max())
    field = lift_normal(a, wobbly, check_admissible=False)
    der = frechet_derivative(wobbly, 0.9, field)
    sup = np.abs(der.samples).max()
    errs = []
    for eps in (1e-2, 1e-3, 1e-4):
        ip = invariant_analytic(field.perturb(+eps), 0.9, validate=False)
        im = invariant_analytic(field.perturb(-eps), 0.9, validate=False)
        fd = (ip.values.samples - im.values.samples) / (2 * eps)
        errs.append(np.abs(fd - der.samples).max() / sup)
    # central differences: error drops by ~100x per decade of eps
    assert np.log10(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)
    assert errs[2] < 1e-6


def test_frechet_near_singular_guard(small_circle):
    # chords to the two crossings become parallel when the crossing
    # parameters collide; inject degenerate parameters to hit the guard
    g = small_circle.grid
    field = lift_normal(PeriodicFn(np.cos(2 * g)), small_circle,
                        check_admissible=False)
    th = theta_circle(1.0)
    with pytest.raises(NearSingularError):
        frechet_derivative(small_circle, 1.0, field, pairs=(g + th, g + th))


# --------------------------------------------------- coefficient plumbing

def test_real_coeff_round_trip():
    g = circinv.fourier.uniform_grid(64)
    f = PeriodicFn(0.7 - 2 * np.cos(g) + 0.3 * np.sin(4 * g))
    vec = real_coeff_vector(f, 6)
    assert vec.shape == (13,)
    assert vec[0] == pytest.approx(0.7, abs=1e-14)
    assert vec[1] == pytest.approx(-2.0, abs=1e-14)   # cos 1
    assert vec[8] == pytest.approx(0.3, abs=1e-14)    # sin 4
    back = fn_from_real_coeffs(vec, 64)
    np.testing.assert_allclose(back.samples, f.samples, rtol=0, atol=1e-13)


def test_basis_mode_fn():
    g = circinv.fourier.uniform_grid(32)
    np.testing.assert_allclose(basis_mode_fn(0, 32).samples, 1.0, atol=0)
    np.testing.assert_allclose(basis_mode_fn(3, 32).samples, np.cos(2 * g),
                               rtol=0, atol=1e-14)
    np.testing.assert_allclose(basis_mode_fn(4, 32).samples, np.sin(2 * g),
                               rtol=0, atol=1e-14)


def test_constraint_rows():
    rows = constraint_rows(3)
    # a(0) = 0: sum of constant and cosine coefficients
    np.testing.assert_array_equal(rows[0], [1, 1, 0, 1, 0, 1, 0])
    # a'(0) = 0: sine coefficients weighted by the mode index
    np.testing.assert_array_equal(rows[1], [0, 0, 1, 0, 2, 0, 3])


# --------------------------------------------------------------- operator

def test_operator_diagonal_at_circle(unit_circle):
    op = assemble_operator(unit_circle, 1.0)
    want = np.diag(Spectrum.build(THETA, unit_circle.n_modes).diagonal())
    assert np.abs(op.entries - want).max() < 1e-8
    assert op.basis == "normal"
    assert op.n_modes == unit_circle.n_modes


def test_operator_fast_matches_per_column(small_circle):
    fast = assemble_operator(small_circle, 1.0, method="fast")
    cols = assemble_operator(small_circle, 1.0, method="columns")
    assert np.abs(fast.entries - cols.entries).max() < 1e-10


def test_operator_fast_matches_per_column_generic(wobbly):
    fast = assemble_operator(wobbly, 0.9, method="fast")
    cols = assemble_operator(wobbly, 0.9, method="columns")
    assert np.abs(fast.entries - cols.entries).max() < 1e-10


def test_operator_tangent_basis_vanishes(small_circle):
    op = assemble_operator(small_circle, 1.0, basis="tangent")
    assert np.abs(op.entries).max() <= 1e-9


def test_operator_validation(small_circle):
    with pytest.raises(ParameterError):
        assemble_operator(small_circle, 1.0, basis="nope")
    with pytest.raises(ParameterError):
        assemble_operator(small_circle, 1.0, method="nope")
    with pytest.raises(ParameterError):
        assemble_operator(small_circle, -1.0)
    with pytest.raises(ParameterError):
        assemble_operator(small_circle, 1.0, n_modes=200)   # > grid/2


def test_operator_serialization(tmp_path, small_circle):
    op = assemble_operator(small_circle, 1.0, n_modes=4)
    csv = tmp_path / "op.csv"
    js = tmp_path / "op.json"
    op.write_csv(csv)
    op.write_json(js)
    rows = [line.split(",") for line in csv.read_text().strip().split("\n")]
    assert len(rows) == 9 and len(rows[0]) == 9
    got = np.array([[float(v) for v in row] for row in rows])
    np.testing.assert_array_equal(got, op.entries)
    meta = json.loads(js.read_text())
    assert meta["basis"] == "normal"
    assert meta["rows"] == meta["cols"] == 9
    assert meta["ordering"].startswith("0,1c,1s")


def test_injectivity_margins_at_circle(unit_circle):
    op = assemble_operator(unit_circle, 1.0)
    sv = op.singular_values()
    # translations: exactly the two mode-(+-1) directions are flat
    assert (sv < 1e-8).sum() == 2
    assert injectivity_margin(op, constrained=False) < 1e-8
    margin = injectivity_margin(op)
    assert margin >= 0.01
    # constrained margin cannot exceed the smallest nonzero band
    assert margin <= abs(spectrum_d(2, THETA)) + 1e-12


def test_margin_stable_under_perturbation(unit_circle):
    rng = np.random.default_rng(5)
    pert = sample_perturbed_circle(rng, 0.02, n_modes=32, grid_size=512)
    op_c = assemble_operator(unit_circle, 1.0)
    op_p = assemble_operator(pert, 1.0)
    # operator moves continuously with the curve
    gap = np.linalg.norm(op_p.entries - op_c.entries, 2)
    assert gap <= 10 * 0.02
    m_c = injectivity_margin(op_c)
    m_p = injectivity_margin(op_p)
    assert abs(m_p - m_c) <= 0.5 * m_c
