"""Gauss-Hermite quadrature with node doubling."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import roots_hermite

from .errors import NumericalError

START_NODES = 64
MAX_NODES = 1024
AGREE_TOL = 1e-10
FAIL_TOL = 1e-9


@lru_cache(maxsize=None)
def hermite_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int exp(-t^2) g(t) dt``, weights divided by sqrt(pi)."""
    t, w = roots_hermite(n)
    w = w / math.sqrt(math.pi)
    t.flags.writeable = False
    w.flags.writeable = False
    return t, w


def gaussian_expectation(fn, start: int = START_NODES, tol: float = AGREE_TOL, max_nodes: int = MAX_NODES) -> float:
    """Expectation of ``fn(t)`` for ``t ~ N(0, 1/2)``.

    ``fn`` receives a 1-D array of nodes and returns values of the same
    shape.  The node count doubles from ``start`` until consecutive
    estimates agree within ``tol``.  If ``max_nodes`` is reached with a
    disagreement above ``1e-9``, or an estimate is not finite,
    `NumericalError` is raised.
    """
    n = start
    t, w = hermite_rule(n)
    prev = float(np.dot(w, fn(t)))
    while True:
        n *= 2
        t, w = hermite_rule(n)
        cur = float(np.dot(w, fn(t)))
        diff = abs(cur - prev)
        if not math.isfinite(diff):
            raise NumericalError(f"Gauss-Hermite estimate is not finite at {n} nodes")
        if diff <= tol:
            return cur
        if n >= max_nodes:
            if diff > FAIL_TOL:
                raise NumericalError(f"Gauss-Hermite did not converge ({diff:.2e} at {n} nodes)")
            return cur
        prev = cur
