"""Brute-force reference computations.

Nothing here relies on the low-cost expansion: probabilities come from
Born's rule on explicit (truncated) Fock-space states and mutual
information from the joint distribution directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.stats import poisson

from .constellation import CoherentEnsemble, WordEnsemble
from .errors import DomainError, NumericalError
from .lowcost import Povm, StateExpansion, expansion_report

TAIL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint probabilities ``p[j, r]`` of input ``j`` and outcome ``r``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2:
            raise DomainError("joint distribution must be a matrix")
        if p.min() < -1e-12:
            raise DomainError("negative joint probability")
        if abs(p.sum() - 1) > 1e-9:
            raise DomainError(f"joint distribution sums to {p.sum()!r}")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @property
    def inputs(self) -> np.ndarray:
        return self.p.sum(axis=1)

    @property
    def outcomes(self) -> np.ndarray:
        return self.p.sum(axis=0)


def mutual_information(jd: JointDistribution) -> float:
    """Mutual information in nats, with ``0 log 0 = 0``."""
    p = jd.p
    px, py = jd.inputs[:, None], jd.outcomes[None, :]
    pos = p > 0
    # dividing in two steps avoids underflow of px * py; log differences cover denormals
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        logr = np.log(np.where(pos, p / np.where(pos, px, 1.0) / np.where(pos, py, 1.0), 1.0))
        bad = pos & ~np.isfinite(logr)
        if bad.any():
            logr = np.where(bad, np.log(p) - np.log(px) - np.log(py), logr)
    return max(float(np.sum(np.where(pos, p * logr, 0.0))), 0.0)


def coherent_vector(alpha: complex, dim: int) -> np.ndarray:
    """Fock amplitudes ``<n|alpha>`` for ``n < dim``."""
    c = np.empty(dim, dtype=complex)
    c[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, dim):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def fock_tail(mean_photons: float, dim: int) -> float:
    """Photon-number probability mass a coherent state puts at ``n >= dim``."""
    return float(poisson.sf(dim - 1, mean_photons))


def min_fock_dim(mean_photons: float, tol: float = TAIL_TOL) -> int:
    dim = 1
    while fock_tail(mean_photons, dim) >= tol:
        dim += 1
    return dim


def state_vectors(ens, dim: int | None = None) -> np.ndarray:
    """Truncated Fock vectors of every input, one per row.

    For word ensembles ``dim`` is the per-mode cutoff and the modes are
    combined by Kronecker product (mode 1 most significant).
    """
    if isinstance(ens, CoherentEnsemble):
        peak = float(np.max(np.abs(ens.amplitudes)) ** 2)
        dim = dim or max(3, min_fock_dim(peak))
        if fock_tail(peak, dim) >= TAIL_TOL:
            raise DomainError(f"Fock cutoff {dim} too small for |alpha|^2 = {peak}")
        return np.array([coherent_vector(a, dim) for a in ens.amplitudes])
    if isinstance(ens, WordEnsemble):
        mean = ens.zeta**2
        dim = dim or max(2, min_fock_dim(mean))
        if fock_tail(mean, dim) >= TAIL_TOL:
            raise DomainError(f"Fock cutoff {dim} too small for |alpha|^2 = {mean}")
        plus, minus = coherent_vector(ens.zeta, dim), coherent_vector(-ens.zeta, dim)
        return np.array([reduce(np.kron, [plus if s > 0 else minus for s in w]) for w in ens.words])
    raise TypeError(f"unsupported ensemble type {type(ens).__name__}")


def _mode_dim(ens, povm: Povm) -> int:
    if isinstance(ens, WordEnsemble):
        d = round(povm.dim ** (1.0 / ens.M))
        if d**ens.M != povm.dim:
            raise DomainError(f"POVM dimension {povm.dim} is not a per-mode cutoff to the power {ens.M}")
        return d
    return povm.dim


def born_probabilities(ens, povm: Povm, dim: int | None = None) -> JointDistribution:
    """Joint distribution ``p_j Tr[Q_r rho_j]`` for a coherent or word ensemble.

    ``dim`` is the per-mode Fock cutoff; it defaults to the one implied by
    the POVM.  The cutoff must leave less than ``1e-12`` of photon-number
    probability outside the truncated space.
    """
    mode_dim = _mode_dim(ens, povm)
    if dim is not None and dim != mode_dim:
        raise DomainError(f"cutoff {dim} does not match POVM dimension {povm.dim}")
    psi = state_vectors(ens, mode_dim)
    cond = np.array([[np.real(np.vdot(v, Q @ v)) for Q in povm] for v in psi])
    return JointDistribution(ens.priors[:, None] * cond)


def minimum_error_povm(ens: CoherentEnsemble, dim: int) -> Povm:
    """Helstrom measurement for a binary ensemble in a ``dim``-level Fock space."""
    if len(ens) != 2:
        raise DomainError("minimum-error POVM implemented for two states")
    psi = state_vectors(ens, dim)
    gamma = sum(s * p * np.outer(v, v.conj()) for s, p, v in zip((1, -1), ens.priors, psi))
    w, V = np.linalg.eigh(gamma)
    pos = V[:, w > 0]
    P = pos @ pos.conj().T
    return Povm([P, np.eye(dim) - P])


@dataclass(frozen=True)
class ConvergenceReport:
    zetas: tuple[float, ...]
    ratios: tuple[float, ...]
    deviations: tuple[float, ...]
    coefficient: float
    extrapolated: float
    monotone: bool


def expansion_joint(se: StateExpansion, povm: Povm, zeta: float) -> JointDistribution:
    """Born probabilities of the second-order states at cost ``zeta``."""
    cond = np.array(
        [[np.real(np.trace(Q @ se.state(j, zeta))) for Q in povm] for j in range(len(se.priors))]
    )
    if cond.min() < -1e-10:
        raise NumericalError(f"second-order state gives probability {cond.min():.3e}")
    return JointDistribution(se.priors[:, None] * np.clip(cond, 0.0, None))


def convergence_check(se: StateExpansion, povm: Povm, zetas) -> ConvergenceReport:
    """Compare exact ``I(zeta) / zeta^2`` with the leading-order coefficient.

    ``zetas`` must be positive and decreasing.  The last two ratios are
    extrapolated linearly in ``zeta`` to remove the first correction.
    """
    zetas = tuple(float(z) for z in zetas)
    if not zetas or min(zetas) <= 0 or any(b >= a for a, b in zip(zetas, zetas[1:])):
        raise DomainError("zetas must be positive and strictly decreasing")
    coeff = expansion_report(se, povm).total_coeff
    ratios = tuple(mutual_information(expansion_joint(se, povm, z)) / z**2 for z in zetas)
    devs = tuple(abs(r - coeff) for r in ratios)
    if len(zetas) >= 2:
        (z1, r1), (z2, r2) = zip(zetas[-2:], ratios[-2:])
        extrap = (z1 * r2 - z2 * r1) / (z1 - z2)
    else:
        extrap = ratios[-1]
    monotone = all(b <= a for a, b in zip(devs, devs[1:]))
    return ConvergenceReport(zetas, ratios, devs, coeff, extrap, monotone)
