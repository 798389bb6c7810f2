import numpy as np
import pytest

import circinv


@pytest.fixture(scope="session")
def unit_circle():
    """Unit circle at production resolution."""
    return circinv.make_circle(1.0, 32, 512)


@pytest.fixture(scope="session")
def small_circle():
    """Unit circle at desk resolution, for fast unit tests."""
    return circinv.make_circle(1.0, 16, 256)


@pytest.fixture(scope="session")
def wobbly():
    """A fixed generic perturbed circle inside the two-crossing set."""
    rng = np.random.default_rng(42)
    return circinv.sample_perturbed_circle(rng, 0.03, n_modes=16,
                                           grid_size=256)


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels(small_circle):
    """Trigger JIT compilation / cache load once so per-test timings are
    dominated by the actual work."""
    circinv.invariant_analytic(small_circle, 0.8, validate=False)
