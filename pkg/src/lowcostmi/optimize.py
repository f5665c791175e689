"""Scalar searches over input probabilities and displacement."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constellation import hadamard_matrix
from .errors import BracketError, DomainError
from .lowcost import U_STAR, f_curve
from .receivers import helstrom_mi, three_symbol_mi, two_symbol_mi

INV_PHI = (math.sqrt(5) - 1) / 2

THRESHOLD_BRACKET = (1e-4, 0.1)


@dataclass(frozen=True)
class SweepSpec:
    """Log-spaced photon-number grid plus search settings."""

    nbar_min: float
    nbar_max: float
    points: int
    objective: str = "helstrom"
    bounds: tuple[float, float] = (0.0, 1.0)
    tol: float = 1e-7

    def __post_init__(self):
        if self.points < 1:
            raise DomainError("points must be positive")
        if not 0 < self.nbar_min <= self.nbar_max or (self.points > 1 and self.nbar_min == self.nbar_max):
            raise DomainError("need 0 < nbar_min < nbar_max")
        if not self.tol > 0:
            raise DomainError("tolerance must be positive")

    def grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.nbar_min])
        return np.geomspace(self.nbar_min, self.nbar_max, self.points)


def maximize_scalar(fn, lo: float, hi: float, tol: float = 1e-8) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``fn`` on ``[lo, hi]``.

    Returns ``(argmax, max)``.  The endpoints are compared against the
    interior estimate at the end, so a maximum sitting on the boundary is
    found exactly.
    """
    if not lo < hi:
        raise DomainError("need lo < hi")
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fn(d)
    x, fx = (c, fc) if fc >= fd else (d, fd)
    for edge in (lo, hi):
        fe = fn(edge)
        if fe > fx:
            x, fx = edge, fe
    return x, fx


def best_two_symbol_u(nbar: float, beta: float = 0.0, tol: float = 1e-7) -> tuple[float, float]:
    """``(u_opt, pie)`` maximizing ``I2 / (2 nbar)`` over ``u`` at fixed ``beta``."""
    u, val = maximize_scalar(lambda u: two_symbol_mi(nbar, u, beta), 0.0, 1.0, tol)
    return u, val / (2 * nbar)


def optimal_pie_two_symbol(nbar: float, with_displacement: bool = False, tol: float = 1e-7):
    """Best PIE of the two-symbol receiver, returned as ``(pie, u_opt, beta_opt)``.

    With displacement, a real ``beta`` in ``[0, 8 sqrt(nbar)]`` is searched
    in an outer loop around the search over ``u``.
    """
    if not nbar > 0:
        raise DomainError("nbar must be positive")
    if not with_displacement:
        u, pie = best_two_symbol_u(nbar, 0.0, tol)
        return pie, u, 0.0
    hi = 8 * math.sqrt(nbar)
    beta, pie = maximize_scalar(lambda b: best_two_symbol_u(nbar, b, tol)[1], 0.0, hi, tol * hi)
    u, pie = best_two_symbol_u(nbar, beta, tol)
    return pie, u, beta


def optimal_pie_three_symbol(nbar: float, tol: float = 1e-7) -> tuple[float, float]:
    """Best PIE ``I3 / (3 nbar)`` over ``v`` in ``[0, 1/2]``; returns ``(pie, v_opt)``."""
    if not nbar > 0:
        raise DomainError("nbar must be positive")
    v, val = maximize_scalar(lambda v: three_symbol_mi(nbar, v), 0.0, 0.5, tol)
    return val / (3 * nbar), v


def superadditivity_gap(nbar: float) -> float:
    """Best two-symbol PIE minus the Helstrom PIE, both without displacement."""
    return best_two_symbol_u(nbar)[1] - helstrom_mi(nbar) / nbar


def superadditivity_threshold(bracket=THRESHOLD_BRACKET, tol: float = 1e-5) -> float:
    """Photon number below which the two-symbol receiver beats individual detection.

    Bisection on `superadditivity_gap` inside ``bracket``; raises
    `BracketError` if the gap does not change sign there.
    """
    lo, hi = bracket
    glo, ghi = superadditivity_gap(lo), superadditivity_gap(hi)
    if not (glo > 0 > ghi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: g = {glo:.3e}, {ghi:.3e}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if superadditivity_gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hadamard_strategy_pie(M: int) -> tuple[float, str]:
    """Asymptotic PIE of orthogonal Hadamard words and the strategy achieving it.

    ``"ppm"`` routes all ``M`` words to photon counting with probability
    ``1/M`` each (PIE ``log M``).  ``"mixed"`` gives ``M - 1`` words
    probability ``e^-3`` each and sends the remaining word and its sign
    flip to phase-sensitive detection (PIE ``2 + (M-1) e^-3``), which is
    feasible only while ``(M - 1) e^-3 <= 1``.
    """
    hadamard_matrix(M)
    ppm = math.log(M)
    if (M - 1) * U_STAR <= 1:
        mixed = 2 + (M - 1) * f_curve(U_STAR)
        if mixed > ppm:
            return mixed, "mixed"
    return ppm, "ppm"
