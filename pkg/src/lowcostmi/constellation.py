"""Coherent-state constellations and BPSK word ensembles.

A single-mode symbol is the coherent state with amplitude ``zeta * gamma``;
``gamma`` is a unit-cost amplitude and ``zeta`` scales the whole
constellation.  A BPSK word of length ``M`` is the product of coherent
states ``|s_1 zeta> ... |s_M zeta>`` with signs ``s_k = +-1``.

Constellations round-trip through a JSON-compatible mapping::

    {"zeta": 0.1, "symbols": [[re, im, p], ...]}

and word ensembles through::

    {"zeta": 0.1, "words": [[[1, -1], p], ...]}
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

PRIOR_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a)
    a.flags.writeable = False
    return a


def _check_priors(priors: np.ndarray, n: int) -> None:
    if priors.ndim != 1 or priors.size != n:
        raise DomainError(f"expected {n} priors, got shape {priors.shape}")
    if np.any(priors < 0):
        raise DomainError("priors must be nonnegative")
    if abs(priors.sum() - 1.0) > PRIOR_TOL:
        raise DomainError(f"priors sum to {priors.sum()!r}, not 1")


@dataclass(frozen=True, eq=False)
class CoherentEnsemble:
    """Coherent-state alphabet with unit-cost amplitudes and priors."""

    gammas: np.ndarray
    priors: np.ndarray
    zeta: float = 1.0

    def __post_init__(self):
        gammas = np.asarray(self.gammas, dtype=complex).ravel()
        priors = np.asarray(self.priors, dtype=float).ravel()
        if gammas.size == 0:
            raise DomainError("empty constellation")
        _check_priors(priors, gammas.size)
        if not self.zeta >= 0:
            raise DomainError("zeta must be nonnegative")
        object.__setattr__(self, "gammas", _frozen(gammas))
        object.__setattr__(self, "priors", _frozen(priors))
        object.__setattr__(self, "zeta", float(self.zeta))

    def __len__(self):
        return self.gammas.size

    @property
    def amplitudes(self) -> np.ndarray:
        """Physical amplitudes ``zeta * gamma_j``."""
        return self.zeta * self.gammas

    def with_zeta(self, zeta: float) -> "CoherentEnsemble":
        return CoherentEnsemble(self.gammas, self.priors, zeta)

    def to_config(self) -> dict:
        return {
            "zeta": self.zeta,
            "symbols": [[g.real, g.imag, p] for g, p in zip(self.gammas.tolist(), self.priors.tolist())],
        }

    @classmethod
    def from_config(cls, cfg: Mapping) -> "CoherentEnsemble":
        try:
            rows = [tuple(map(float, row)) for row in cfg["symbols"]]
            zeta = float(cfg.get("zeta", 1.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed constellation config: {exc}") from exc
        if any(len(r) != 3 for r in rows):
            raise DomainError("each symbol must be a [re, im, p] triple")
        return cls([complex(r[0], r[1]) for r in rows], [r[2] for r in rows], zeta)


def mean_photon_number(ens: CoherentEnsemble) -> float:
    """Average photon number ``zeta^2 sum_j p_j |gamma_j|^2``."""
    return ens.zeta**2 * float(np.dot(ens.priors, np.abs(ens.gammas) ** 2))


def papr(ens: CoherentEnsemble) -> float:
    """Peak-to-average power ratio of the constellation.

    The peak is taken over the whole alphabet as listed.  Raises
    `DomainError` for a constellation of vacuum symbols only.
    """
    power = np.abs(ens.gammas) ** 2
    mean = float(np.dot(ens.priors, power))
    if mean <= 0:
        raise DomainError("PAPR undefined for a zero-power constellation")
    return float(power.max()) / mean


def make_psk(m: int, zeta: float = 1.0) -> CoherentEnsemble:
    """Equiprobable m-ary PSK, ``gamma_j = exp(2 pi i j / m)``."""
    if int(m) != m or m < 2:
        raise DomainError(f"PSK needs m >= 2, got {m}")
    j = np.arange(m)
    gammas = np.exp(2j * np.pi * j / m)
    # Snap roots that land on the axes so m=2,4 give exact +-1, +-i.
    gammas = np.where(np.abs(gammas.real) < 1e-15, 1j * gammas.imag, gammas)
    gammas = np.where(np.abs(gammas.imag) < 1e-15, gammas.real + 0j, gammas)
    return CoherentEnsemble(gammas, np.full(m, 1.0 / m), zeta)


def make_ook(peak_to_average: float, zeta: float = 1.0) -> CoherentEnsemble:
    """On-off keying with PAPR ``P``: vacuum w.p. ``1-1/P``, ``sqrt(P)`` w.p. ``1/P``."""
    if peak_to_average < 1:
        raise DomainError("PAPR must be at least 1")
    P = float(peak_to_average)
    return CoherentEnsemble([0.0, math.sqrt(P)], [1 - 1 / P, 1 / P], zeta)


# -- BPSK words ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OnePhotonVector:
    """Real amplitudes of a single photon spread over ``M`` modes."""

    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float).ravel()
        if abs(np.linalg.norm(c) - 1.0) > 1e-12:
            raise DomainError("one-photon vector must have unit norm")
        object.__setattr__(self, "components", _frozen(c))

    def inner(self, other: "OnePhotonVector") -> float:
        return float(np.dot(self.components, other.components))


def _as_word(word: Sequence[int]) -> tuple[int, ...]:
    w = tuple(int(s) for s in word)
    if not w:
        raise DomainError("empty word")
    if any(s not in (1, -1) for s in w):
        raise DomainError(f"word entries must be +1 or -1, got {word}")
    return w


def one_photon_vector(word: Sequence[int]) -> OnePhotonVector:
    """The one-photon state ``sum_k s_k |1_k> / sqrt(M)`` of a sign word."""
    w = np.array(_as_word(word), dtype=float)
    return OnePhotonVector(w / math.sqrt(w.size))


def canonical_word(word: Sequence[int]) -> tuple[int, ...]:
    """Representative of ``{word, -word}``: the one starting with ``+1``."""
    w = _as_word(word)
    return w if w[0] == 1 else tuple(-s for s in w)


@dataclass(frozen=True, eq=False)
class WordEnsemble:
    """Ensemble of BPSK words of a fixed length ``M``.

    All symbols carry ``zeta^2`` photons on average, so the mean photon
    number per symbol is ``zeta^2`` regardless of the priors.
    """

    words: tuple
    priors: np.ndarray
    zeta: float = 1.0

    def __post_init__(self):
        words = tuple(_as_word(w) for w in self.words)
        if not words:
            raise DomainError("empty word ensemble")
        M = len(words[0])
        if any(len(w) != M for w in words):
            raise DomainError("all words must have the same length")
        priors = np.asarray(self.priors, dtype=float).ravel()
        _check_priors(priors, len(words))
        if not self.zeta >= 0:
            raise DomainError("zeta must be nonnegative")
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "priors", _frozen(priors))
        object.__setattr__(self, "zeta", float(self.zeta))

    @property
    def M(self) -> int:
        return len(self.words[0])

    def __len__(self):
        return len(self.words)

    def signs(self) -> np.ndarray:
        """Words as a ``(n_words, M)`` array of +-1."""
        return np.array(self.words, dtype=float)

    def mean_photon_number(self) -> float:
        """Per-symbol mean photon number."""
        return self.zeta**2

    def classes(self) -> list[tuple[tuple[int, ...], float]]:
        """Equivalence classes under global sign flip, with total probability.

        Classes are listed in order of first appearance.
        """
        out: dict[tuple[int, ...], float] = {}
        for w, p in zip(self.words, self.priors.tolist()):
            key = canonical_word(w)
            out[key] = out.get(key, 0.0) + p
        return list(out.items())

    def with_zeta(self, zeta: float) -> "WordEnsemble":
        return WordEnsemble(self.words, self.priors, zeta)

    def to_config(self) -> dict:
        return {"zeta": self.zeta, "words": [[list(w), p] for w, p in zip(self.words, self.priors.tolist())]}

    @classmethod
    def from_config(cls, cfg: Mapping) -> "WordEnsemble":
        try:
            words = [w for w, _ in cfg["words"]]
            priors = [float(p) for _, p in cfg["words"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed word config: {exc}") from exc
        return cls(words, priors, float(cfg.get("zeta", 1.0)))


# -- Hadamard matrices ---------------------------------------------------------


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def _paley(q: int) -> np.ndarray:
    # Paley construction I, order q + 1 for a prime q = 3 (mod 4).
    residues = {(k * k) % q for k in range(1, q)}
    chi = np.array([0] + [1 if a in residues else -1 for a in range(1, q)])
    Q = chi[(np.arange(q)[None, :] - np.arange(q)[:, None]) % q]
    S = np.zeros((q + 1, q + 1), dtype=int)
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = Q
    return S + np.eye(q + 1, dtype=int)


def hadamard_matrix(M: int) -> np.ndarray:
    """A Hadamard matrix of order ``M`` with entries +-1.

    Supported orders: 1, 2, powers of two (Sylvester), ``q + 1`` for a
    prime ``q = 3 mod 4`` (Paley I), and twice any supported order.  Other
    orders, including multiples of 4 such as 28 or 36 that need other
    constructions, raise `DomainError`.
    """
    M = int(M)
    if M == 1:
        return np.ones((1, 1), dtype=int)
    if M == 2:
        return np.array([[1, 1], [1, -1]])
    if M % 4:
        raise DomainError(f"no Hadamard matrix of order {M}")
    if M & (M - 1) == 0:
        H = np.ones((1, 1), dtype=int)
        while H.shape[0] < M:
            H = np.block([[H, H], [H, -H]])
        return H
    if _is_prime(M - 1) and (M - 1) % 4 == 3:
        return _paley(M - 1)
    try:
        half = hadamard_matrix(M // 2)
    except DomainError:
        raise DomainError(f"Hadamard order {M} is not supported") from None
    return np.kron(np.array([[1, 1], [1, -1]]), half)


def make_hadamard_words(M: int, priors=None, zeta: float = 1.0) -> WordEnsemble:
    """Words given by the rows of a Hadamard matrix of order ``M``.

    Rows are normalized to start with ``+1``, so distinct rows lie in
    distinct sign-flip classes and their one-photon vectors are orthogonal.
    ``priors`` defaults to uniform.
    """
    H = hadamard_matrix(M)
    H = H * H[:, :1]
    if priors is None:
        priors = np.full(M, 1.0 / M)
    return WordEnsemble([tuple(row) for row in H.tolist()], priors, zeta)


def two_symbol_words(u: float, zeta: float = 1.0) -> WordEnsemble:
    """Words ``00, 11, 01`` with priors ``(1-u)/2, (1-u)/2, u``."""
    if not 0 <= u <= 1:
        raise DomainError(f"u must lie in [0, 1], got {u}")
    return WordEnsemble([(1, 1), (-1, -1), (1, -1)], [(1 - u) / 2, (1 - u) / 2, u], zeta)


def three_symbol_words(v: float, zeta: float = 1.0) -> WordEnsemble:
    """Words ``000, 111, 001, 010`` with priors ``1/2-v, 1/2-v, v, v``."""
    if not 0 <= v <= 0.5:
        raise DomainError(f"v must lie in [0, 1/2], got {v}")
    return WordEnsemble(
        [(1, 1, 1), (-1, -1, -1), (1, 1, -1), (1, -1, 1)],
        [0.5 - v, 0.5 - v, v, v],
        zeta,
    )
