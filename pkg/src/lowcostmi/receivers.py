"""Exact mutual information of concrete receivers at finite photon number.

Homodyne detection of a coherent state with amplitude ``a`` returns a
quadrature ``x`` with density ``exp(-(x - sqrt(2) Re a)^2) / sqrt(pi)``.
A single-photon detector (SPD) preceded by a displacement ``beta`` stays
dark with probability ``exp(-|a + beta|^2)``.

Collective receivers feed BPSK words through a linear optical circuit,
homodyne the first output port and put SPDs on the others.  The joint
outcome ``(x, k)`` is modelled by `HybridChannel`, whose mutual
information is integrated by Gauss-Hermite quadrature.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, xlogy

from .constellation import three_symbol_words, two_symbol_words
from .errors import DomainError
from .lowcost import Q1_VEC, Q2_VEC
from .quadrature import gaussian_expectation

LOG2 = math.log(2.0)


def binary_entropy(x: float) -> float:
    """Entropy of a Bernoulli(x) variable in nats."""
    return float(-xlogy(x, x) - xlogy(1 - x, 1 - x))


def helstrom_mi(nbar: float) -> float:
    """Mutual information of BPSK under the minimum-error measurement.

    Equals ``log 2 - H(eps)`` with ``eps = (1 - sqrt(1 - exp(-4 nbar))) / 2``,
    written in a form that keeps full relative precision as ``nbar -> 0``.
    """
    if nbar < 0:
        raise DomainError("nbar must be nonnegative")
    s = math.sqrt(-math.expm1(-4.0 * nbar))
    return 0.5 * float(xlogy(1 - s, 1 - s) + (1 + s) * math.log1p(s))


def shannon_hartley(nbar: float, nb: float = 0.0) -> float:
    """``log(1 + 4 nbar / (1 + 2 nb)) / 2``, the Gaussian-input homodyne limit."""
    if nbar < 0 or nb < 0:
        raise DomainError("nbar and nb must be nonnegative")
    return 0.5 * math.log1p(4.0 * nbar / (1.0 + 2.0 * nb))


def thermal_pie_bound(nb: float) -> float:
    """Low-cost PIE bound ``2 / (1 + 2 nb)`` for displaced thermal states."""
    if nb < 0:
        raise DomainError("nb must be nonnegative")
    return 2.0 / (1.0 + 2.0 * nb)


def _logcosh(y):
    return np.logaddexp(y, -y) - LOG2


def homodyne_bpsk_mi(nbar: float) -> float:
    """Mutual information of homodyne-detected BPSK ``|+-zeta>``, ``zeta^2 = nbar``.

    Evaluates ``4 zeta^2 - E[log cosh(a x)]`` over the quadrature density
    of ``|zeta>``, with ``a = 2 sqrt(2) zeta``.  Shifting the Gaussian onto
    the signal mean leaves an integrand that grows only linearly, so
    Gauss-Hermite converges at any ``nbar``.
    """
    if nbar < 0:
        raise DomainError("nbar must be nonnegative")
    if nbar == 0:
        return 0.0
    zeta = math.sqrt(nbar)
    a = 2 * math.sqrt(2) * zeta
    return 4 * nbar - gaussian_expectation(lambda t: _logcosh(a * (t + a / 2)))


@dataclass(frozen=True, eq=False)
class HybridChannel:
    """Channel with a Gaussian-mixture quadrature and a discrete click branch.

    Given input ``j`` the quadrature density is
    ``sum_c weights[j, c] exp(-(x - means[j, c])^2) / sqrt(pi)`` and,
    independently, the discrete outcome is ``k`` with probability
    ``clicks[j, k]``.
    """

    priors: np.ndarray
    means: np.ndarray
    weights: np.ndarray
    clicks: np.ndarray

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=float).ravel()
        means = np.atleast_2d(np.asarray(self.means, dtype=float))
        weights = np.atleast_2d(np.asarray(self.weights, dtype=float))
        clicks = np.atleast_2d(np.asarray(self.clicks, dtype=float))
        J = priors.size
        if means.shape[0] != J or weights.shape != means.shape or clicks.shape[0] != J:
            raise DomainError("inconsistent channel array shapes")
        if np.any(priors < 0) or abs(priors.sum() - 1) > 1e-12:
            raise DomainError("priors must be a probability vector")
        if np.any(weights < 0) or np.any(clicks < 0):
            raise DomainError("weights and click probabilities must be nonnegative")
        mass = weights.sum(axis=1) * clicks.sum(axis=1)
        if not np.allclose(mass, 1.0, atol=1e-9):
            raise DomainError(f"conditional distributions do not normalize: {mass}")
        for name, arr in (("priors", priors), ("means", means), ("weights", weights), ("clicks", clicks)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def normalization(self) -> np.ndarray:
        """Total probability of each conditional distribution."""
        return self.weights.sum(axis=1) * self.clicks.sum(axis=1)

    def _log_density(self, x: np.ndarray) -> np.ndarray:
        # log of the quadrature density of every input at points x, up to -log(sqrt(pi)).
        with np.errstate(divide="ignore"):
            logw = np.log(self.weights)
        d = x[None, None, ...] - self.means.reshape(self.means.shape + (1,) * x.ndim)
        return logsumexp(-(d**2) + logw.reshape(logw.shape + (1,) * x.ndim), axis=1)

    def mutual_information(self) -> float:
        """``sum_j p_j sum_k int p(x,k|j) log(p(x,k|j) / p(x,k)) dx`` in nats."""
        J, C = self.means.shape
        with np.errstate(divide="ignore"):
            logP = np.log(self.clicks)
            logp = np.log(self.priors)
        W = self.priors[:, None, None] * self.weights[:, :, None] * self.clicks[:, None, :]
        active = W > 0
        idx = np.arange(J)

        def integrand(t):
            x = self.means[:, :, None] + t[None, None, :]
            logrho = self._log_density(x)  # (L, J, C, N)
            own = logrho[idx, idx]  # (J, C, N)
            joint = logrho[:, None] + (logp[:, None] + logP)[:, :, None, None, None]  # (L, K, J, C, N)
            marg = logsumexp(joint, axis=0)  # (K, J, C, N)
            terms = own[:, :, None, :] + logP[:, None, :, None] - np.moveaxis(marg, 0, 2)
            terms = np.where(active[..., None], terms, 0.0)
            return np.einsum("jck,jckn->n", W, terms)

        return max(gaussian_expectation(integrand), 0.0)

    def prior_entropy(self) -> float:
        return float(-xlogy(self.priors, self.priors).sum())


@dataclass(frozen=True, eq=False)
class LinearCircuit:
    """Passive linear-optics transformation of mode amplitudes."""

    matrix: np.ndarray

    def __post_init__(self):
        U = np.array(self.matrix, dtype=complex)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise DomainError("circuit matrix must be square")
        if not np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-10):
            raise DomainError("circuit matrix must be unitary")
        U.flags.writeable = False
        object.__setattr__(self, "matrix", U)

    @property
    def modes(self) -> int:
        return self.matrix.shape[0]

    def apply(self, amplitudes) -> np.ndarray:
        return self.matrix @ np.asarray(amplitudes, dtype=complex)

    def then(self, other: "LinearCircuit") -> "LinearCircuit":
        """Circuit applying ``self`` first and ``other`` second."""
        return LinearCircuit(other.matrix @ self.matrix)


def beam_splitter(modes: int, i: int, j: int, transmissivity: float) -> LinearCircuit:
    """Real beam splitter mixing modes ``i`` and ``j`` with intensity transmissivity ``T``."""
    t, r = math.sqrt(transmissivity), math.sqrt(1 - transmissivity)
    U = np.eye(modes)
    U[i, i], U[i, j], U[j, i], U[j, j] = t, r, r, -t
    return LinearCircuit(U)


TWO_SYMBOL_CIRCUIT = LinearCircuit(np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2))
THREE_SYMBOL_CIRCUIT = LinearCircuit(np.vstack([np.ones(3) / math.sqrt(3), Q1_VEC, Q2_VEC]))


def collective_channel(words, priors, zeta: float, circuit: LinearCircuit, displacements=None) -> HybridChannel:
    """Channel for BPSK words through ``circuit``: homodyne on port 0, SPDs elsewhere.

    ``displacements`` holds one amplitude per SPD port (default zero).
    Discrete outcomes enumerate click patterns of the SPDs in
    lexicographic order, with ``0`` meaning no click.
    """
    signs = np.asarray(words, dtype=float)
    M = circuit.modes
    if signs.ndim != 2 or signs.shape[1] != M:
        raise DomainError("words do not match the circuit size")
    betas = np.zeros(M - 1, dtype=complex) if displacements is None else np.asarray(displacements, dtype=complex)
    if betas.shape != (M - 1,):
        raise DomainError(f"expected {M - 1} displacements")
    out = (circuit.matrix @ (zeta * signs).T).T  # (J, M)
    means = math.sqrt(2) * out[:, :1].real
    lam = np.abs(out[:, 1:] + betas) ** 2
    dark = np.exp(-lam)
    bright = -np.expm1(-lam)
    patterns = list(itertools.product((0, 1), repeat=M - 1))
    clicks = np.ones((signs.shape[0], len(patterns)))
    for k, pat in enumerate(patterns):
        for port, bit in enumerate(pat):
            clicks[:, k] *= bright[:, port] if bit else dark[:, port]
    return HybridChannel(priors, means, np.ones_like(means), clicks)


def two_symbol_channel(nbar: float, u: float, beta: complex = 0.0) -> HybridChannel:
    if nbar < 0:
        raise DomainError("nbar must be nonnegative")
    we = two_symbol_words(u)
    return collective_channel(we.words, we.priors, math.sqrt(nbar), TWO_SYMBOL_CIRCUIT, [beta])


def two_symbol_mi(nbar: float, u: float, beta: complex = 0.0) -> float:
    """Mutual information per two-symbol word of the beam-splitter receiver.

    Words ``00, 11`` (probability ``(1-u)/2`` each) exit the homodyne port
    with amplitude ``+-sqrt(2) zeta``; word ``01`` (probability ``u``)
    exits the SPD port.  ``beta`` displaces the SPD port.
    """
    return two_symbol_channel(nbar, u, beta).mutual_information()


def three_symbol_channel(nbar: float, v: float) -> HybridChannel:
    if nbar < 0:
        raise DomainError("nbar must be nonnegative")
    we = three_symbol_words(v)
    return collective_channel(we.words, we.priors, math.sqrt(nbar), THREE_SYMBOL_CIRCUIT)


def three_symbol_mi(nbar: float, v: float) -> float:
    """Mutual information per three-symbol word of the homodyne + 2 SPD receiver."""
    return three_symbol_channel(nbar, v).mutual_information()


def homodyne_channel(amplitudes, priors) -> HybridChannel:
    """Single-mode homodyne detection of coherent states with given amplitudes."""
    a = np.asarray(amplitudes, dtype=complex).ravel()
    means = math.sqrt(2) * a.real[:, None]
    return HybridChannel(priors, means, np.ones_like(means), np.ones((a.size, 1)))
