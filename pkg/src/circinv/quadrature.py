"""Gauss-Legendre node tables for the adaptive chord integrals.

Adaptivity is realized as escalation through fixed orders: evaluate at
each order in turn and stop once two successive results agree to the
requested absolute tolerance.  The integrands are smooth, so the
escalation converges after one or two steps in practice.
"""

import numpy as np

GL_ORDERS = (32, 64, 128, 256)

# absolute stopping tolerance for successive Gauss-Legendre differences
GL_TOL = 1e-13


def _build_tables():
    k = len(GL_ORDERS)
    nmax = max(GL_ORDERS)
    nodes = np.zeros((k, nmax))
    weights = np.zeros((k, nmax))
    for i, n in enumerate(GL_ORDERS):
        x, w = np.polynomial.legendre.leggauss(n)
        nodes[i, :n] = x
        weights[i, :n] = w
    return nodes, weights, np.array(GL_ORDERS, dtype=np.int64)


GL_NODES, GL_WEIGHTS, GL_COUNTS = _build_tables()
