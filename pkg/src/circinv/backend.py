"""Computational backend selection.

Hot kernels exist in two flavors: numba-compiled loops and pure-numpy
vectorized equivalents.  The environment variable CIRCINV_NUMBA picks
the flavor ("0"/"false"/"off" disables numba); when numba is not
importable the numpy path is used silently.  CIRCINV_THREADS caps the
numba threading layer.
"""

import os

_FALSY = {"0", "false", "off", "no", ""}


def _env_wants_numba() -> bool:
    raw = os.environ.get("CIRCINV_NUMBA")
    if raw is None:
        return True
    return raw.strip().lower() not in _FALSY


USE_NUMBA = False
if _env_wants_numba():
    # workqueue avoids probing optional TBB/OpenMP layers, which warns on
    # some installs; the kernels are serial anyway.  Must be set before
    # the first numba import.
    os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
    try:
        import numba

        USE_NUMBA = True
    except ImportError:
        USE_NUMBA = False

if USE_NUMBA:
    raw_threads = os.environ.get("CIRCINV_THREADS")
    if raw_threads:
        try:
            want = int(raw_threads)
        except ValueError:
            want = 0
        if want > 0:
            numba.set_num_threads(min(want, numba.config.NUMBA_NUM_THREADS))


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
