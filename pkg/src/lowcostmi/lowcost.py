"""Leading-order mutual information for ensembles that collapse at zero cost.

Every input state is expanded to second order in the cost parameter,
``rho_j(zeta) ~ rho0 + zeta rho1_j + zeta^2 rho2_j``, and a fixed POVM is
applied.  Outcomes split into two classes:

* ``Z``: the zero-cost state fires the outcome (``Tr[Q rho0] > 0``).  The
  contribution is ``zeta^2 / (2 p0) * Var_j Tr[Q rho1_j]``.
* ``Zperp``: the zero-cost state never fires it.  Click probabilities are
  ``zeta^2 Tr[Q Pi rho2_j Pi]`` with ``Pi`` the kernel projector of
  ``rho0``, and the contribution is a relative-entropy term of the same
  order in ``zeta``.

All coefficients below are divided by ``zeta^2``.  The `Z` part is bounded
through symmetric logarithmic derivatives (SLDs), which gives an upper
bound depending on the POVM only through its ``Zperp`` elements.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .constellation import CoherentEnsemble, WordEnsemble, one_photon_vector
from .errors import DomainError, NumericalError, SLDUndefinedError

ZERO_TOL = 1e-10
SLD_RESIDUAL_TOL = 1e-8
U_STAR = math.exp(-3.0)


def _herm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def _frozen_matrices(mats, dim=None) -> tuple:
    out = []
    for m in mats:
        m = np.array(m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"expected a square matrix, got shape {m.shape}")
        if dim is not None and m.shape[0] != dim:
            raise DomainError(f"expected dimension {dim}, got {m.shape[0]}")
        if not np.allclose(m, m.conj().T, atol=1e-10):
            raise DomainError("matrix is not Hermitian")
        m.flags.writeable = False
        out.append(m)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class StateExpansion:
    """Second-order expansion of an ensemble around its zero-cost state."""

    rho0: np.ndarray
    rho1: tuple
    rho2: tuple
    priors: np.ndarray

    def __post_init__(self):
        (rho0,) = _frozen_matrices([self.rho0])
        d = rho0.shape[0]
        rho1 = _frozen_matrices(self.rho1, d)
        rho2 = _frozen_matrices(self.rho2, d)
        priors = np.asarray(self.priors, dtype=float).ravel()
        if not (len(rho1) == len(rho2) == priors.size):
            raise DomainError("rho1, rho2 and priors must have the same length")
        if np.any(priors < 0) or abs(priors.sum() - 1) > 1e-12:
            raise DomainError("priors must be a probability vector")
        if abs(np.trace(rho0) - 1) > 1e-10:
            raise DomainError("rho0 must have unit trace")
        if np.linalg.eigvalsh(rho0).min() < -1e-12:
            raise DomainError("rho0 must be positive semidefinite")
        for r in rho1 + rho2:
            if abs(np.trace(r)) > 1e-10:
                raise DomainError("expansion terms must be traceless")
        priors.flags.writeable = False
        object.__setattr__(self, "rho0", rho0)
        object.__setattr__(self, "rho1", rho1)
        object.__setattr__(self, "rho2", rho2)
        object.__setattr__(self, "priors", priors)

    @property
    def dim(self) -> int:
        return self.rho0.shape[0]

    def state(self, j: int, zeta: float) -> np.ndarray:
        """Second-order approximation of ``rho_j(zeta)``."""
        return self.rho0 + zeta * self.rho1[j] + zeta**2 * self.rho2[j]

    def kernel_projector(self, tol: float = ZERO_TOL) -> np.ndarray:
        w, V = np.linalg.eigh(self.rho0)
        K = V[:, w <= tol * max(1.0, np.abs(w).max())]
        return K @ K.conj().T


@dataclass(frozen=True, eq=False)
class Povm:
    """Finite POVM: PSD elements summing to the identity."""

    elements: tuple

    def __post_init__(self):
        els = _frozen_matrices(self.elements)
        if not els:
            raise DomainError("POVM needs at least one element")
        d = els[0].shape[0]
        if any(e.shape[0] != d for e in els):
            raise DomainError("POVM elements must share one dimension")
        for e in els:
            if np.linalg.eigvalsh(e).min() < -1e-10:
                raise DomainError("POVM element is not positive semidefinite")
        if not np.allclose(sum(els), np.eye(d), atol=1e-10):
            raise DomainError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def sld(rho0: np.ndarray, rho1: np.ndarray, tol: float = ZERO_TOL) -> np.ndarray:
    """Symmetric logarithmic derivative ``L`` with ``rho1 = (L rho0 + rho0 L) / 2``.

    Solved in the eigenbasis of ``rho0``.  Matrix elements whose eigenvalue
    sum falls below ``tol`` (relative to ``||rho0||``) are set to zero; if
    ``rho1`` has weight there the equation has no solution and
    `SLDUndefinedError` is raised.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    rho1 = np.asarray(rho1, dtype=complex)
    lam, V = np.linalg.eigh(rho0)
    denom = lam[:, None] + lam[None, :]
    support = denom > tol * max(1.0, np.abs(lam).max())
    r1 = V.conj().T @ rho1 @ V
    Lt = np.zeros_like(r1)
    Lt[support] = 2 * r1[support] / denom[support]
    L = _herm(V @ Lt @ V.conj().T)
    residual = np.linalg.norm(0.5 * (L @ rho0 + rho0 @ L) - rho1)
    if residual > SLD_RESIDUAL_TOL:
        raise SLDUndefinedError(f"SLD undefined for this direction (residual {residual:.3e})")
    return L


def classify(povm: Povm, rho0: np.ndarray, tol: float = ZERO_TOL) -> list[str]:
    """Label each POVM element ``"Z"`` or ``"Zperp"``.

    An element is ``Zperp`` when ``Tr[Q rho0] <= tol * ||Q||``.  For such
    elements ``Q rho0`` must vanish too; a violation means the inputs are
    not positive semidefinite and raises `NumericalError`.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    labels = []
    for Q in povm:
        qn = np.linalg.norm(Q, 2)
        p0 = float(np.real(np.trace(Q @ rho0)))
        if p0 <= tol * qn:
            if np.linalg.norm(Q @ rho0, 2) > math.sqrt(tol) * max(qn, tol):
                raise NumericalError("Zperp element does not annihilate rho0")
            labels.append("Zperp")
        else:
            labels.append("Z")
    return labels


@dataclass(frozen=True)
class OutcomeRecord:
    outcome: int
    kind: str
    p0: float
    coeff: float


@dataclass(frozen=True)
class ExpansionReport:
    """Per-outcome leading-order coefficients and the SLD upper bound.

    ``total_coeff`` and ``bound_coeff`` are mutual information divided by
    ``zeta^2``.
    """

    records: tuple[OutcomeRecord, ...]
    total_coeff: float
    bound_coeff: float
    zperp_coeff: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "zperp_coeff", sum(r.coeff for r in self.records if r.kind == "Zperp"))

    def to_dict(self) -> dict:
        return {
            "records": [
                {"outcome": r.outcome, "class": r.kind, "p0": r.p0, "coeff": r.coeff} for r in self.records
            ],
            "total_coeff": self.total_coeff,
            "bound_coeff": self.bound_coeff,
            "zperp_coeff": self.zperp_coeff,
        }


def _zperp_coeff(q: np.ndarray, priors: np.ndarray) -> float:
    if np.any(q < -1e-10):
        raise NumericalError(f"negative second-order click weight {q.min():.3e}")
    q = np.clip(q, 0.0, None)
    qbar = float(np.dot(priors, q))
    if qbar <= 0:
        return 0.0
    return float(np.dot(priors, xlogy(q, q / qbar)))


def expansion_report(se: StateExpansion, povm: Povm, tol: float = ZERO_TOL) -> ExpansionReport:
    """Leading-order mutual information of ``povm`` applied to ``se``."""
    if povm.dim != se.dim:
        raise DomainError(f"POVM dimension {povm.dim} does not match states ({se.dim})")
    p = se.priors
    rho1_ens = sum(pj * r for pj, r in zip(p, se.rho1))
    L_ens = sld(se.rho0, rho1_ens, tol)
    D = [sld(se.rho0, r, tol) - L_ens for r in se.rho1]
    S = sum(pj * Dj @ se.rho0 @ Dj for pj, Dj in zip(p, D))
    Pi = se.kernel_projector(tol)
    rho2_proj = [Pi @ r @ Pi for r in se.rho2]

    labels = classify(povm, se.rho0, tol)
    records = []
    zperp_sum = np.zeros_like(se.rho0)
    for r, (Q, kind) in enumerate(zip(povm, labels)):
        p0 = float(np.real(np.trace(Q @ se.rho0)))
        if kind == "Z":
            p1 = np.array([np.real(np.trace(Q @ r1)) for r1 in se.rho1])
            dev = p1 - np.dot(p, p1)
            coeff = float(np.dot(p, dev**2)) / (2 * p0)
        else:
            q = np.array([np.real(np.trace(Q @ r2)) for r2 in rho2_proj])
            coeff = _zperp_coeff(q, p)
            zperp_sum = zperp_sum + Q
        records.append(OutcomeRecord(r, kind, p0, coeff))

    zperp_part = sum(rec.coeff for rec in records if rec.kind == "Zperp")
    z_part = 0.5 * float(np.real(np.trace((np.eye(se.dim) - zperp_sum) @ S)))
    total = sum(rec.coeff for rec in records)
    return ExpansionReport(tuple(records), total, zperp_part + z_part)


def coherent_state_expansion(ens: CoherentEnsemble, dim: int = 3) -> StateExpansion:
    """Fock-basis expansion of a single-mode coherent ensemble around vacuum.

    ``rho2`` keeps the ``|2><0|`` coherence so each order is traceless.
    """
    if dim < 3:
        raise DomainError("coherent-state expansion needs dim >= 3")
    e = np.eye(dim)
    ket = [e[:, n : n + 1] for n in range(3)]
    rho0 = ket[0] @ ket[0].T
    rho1, rho2 = [], []
    for g in ens.gammas:
        c10 = g * ket[1] @ ket[0].T
        rho1.append(c10 + c10.conj().T)
        c20 = (g * g / math.sqrt(2)) * ket[2] @ ket[0].T
        rho2.append(abs(g) ** 2 * (ket[1] @ ket[1].T - rho0) + c20 + c20.conj().T)
    return StateExpansion(rho0, rho1, rho2, ens.priors)


def word_state_expansion(we: WordEnsemble) -> StateExpansion:
    """Expansion of BPSK words restricted to the vacuum + one-photon sector.

    Basis index 0 is the ``M``-mode vacuum and index ``k + 1`` a single
    photon in mode ``k``.  Two-photon terms of ``rho2`` lie outside the
    sector and are dropped; they do not affect any leading-order quantity.
    """
    M = we.M
    rho0 = np.zeros((M + 1, M + 1))
    rho0[0, 0] = 1.0
    rho1, rho2 = [], []
    for s in we.signs():
        b = np.concatenate([[0.0], s])[:, None]
        vac = np.zeros((M + 1, 1))
        vac[0, 0] = 1.0
        rho1.append(b @ vac.T + vac @ b.T)
        rho2.append(b @ b.T - M * rho0)
    return StateExpansion(rho0, rho1, rho2, we.priors)


def sector_projector(vec: np.ndarray) -> np.ndarray:
    """Projector onto a one-photon state, embedded in the word sector basis."""
    v = np.concatenate([[0.0], np.asarray(vec, dtype=float)])
    v = v / np.linalg.norm(v)
    return np.outer(v, v)


def f_curve(u):
    """``u log(1/u) - 2u`` on ``[0, 1]`` with ``f(0) = 0``.

    Concave, maximal at ``u = e^-3`` where it equals ``e^-3``, negative
    beyond ``e^-2``.  Accepts scalars or arrays.
    """
    arr = np.asarray(u, dtype=float)
    if np.any((arr < 0) | (arr > 1)) or np.any(np.isnan(arr)):
        raise DomainError("f is defined on [0, 1]")
    out = -xlogy(arr, arr) - 2 * arr
    return float(out) if out.ndim == 0 else out


def word_sector_bound(we: WordEnsemble, zperp_gram) -> float:
    """Per-symbol PIE bound ``2 + sum_[j] f(p_[j]) Q^[j]`` for BPSK words.

    ``zperp_gram`` gives, for each sign-flip class, the total ``Zperp``
    detection probability ``Q^[j]`` of its one-photon state.  It is either
    a mapping keyed by the canonical word (first entry ``+1``) or a
    sequence in the order of ``we.classes()``.  The bound assumes the
    one-photon states of distinct classes are orthogonal; a `UserWarning`
    is issued when they are not.
    """
    classes = we.classes()
    if isinstance(zperp_gram, Mapping):
        try:
            Q = [float(zperp_gram[c]) for c, _ in classes]
        except KeyError as exc:
            raise DomainError(f"no Zperp weight for class {exc}") from exc
    else:
        Q = [float(x) for x in zperp_gram]
        if len(Q) != len(classes):
            raise DomainError(f"expected {len(classes)} class weights, got {len(Q)}")
    if any(not 0 <= x <= 1 for x in Q):
        raise DomainError("Zperp weights must lie in [0, 1]")

    vecs = np.array([one_photon_vector(c).components for c, _ in classes])
    gram = vecs @ vecs.T
    if not np.allclose(gram, np.eye(len(classes)), atol=1e-12):
        warnings.warn("one-photon states are not orthogonal; the bound may not hold", stacklevel=2)
    probs = np.array([pc for _, pc in classes])
    return 2.0 + float(np.dot(f_curve(np.clip(probs, 0, 1)), Q))


def optimal_zperp_weights(we: WordEnsemble) -> list[float]:
    """Bang-bang choice of ``Q^[j]``: 1 where ``f(p_[j]) > 0``, else 0."""
    return [1.0 if f_curve(min(pc, 1.0)) > 0 else 0.0 for _, pc in we.classes()]


# One-photon states for the Zperp projectors of the three-symbol receiver.
_R3 = 1 / math.sqrt(3)
Q1_VEC = np.array([_R3, 0.5 * (1 - _R3), -0.5 * (1 + _R3)])
Q2_VEC = np.array([_R3, -0.5 * (1 + _R3), 0.5 * (1 - _R3)])


def three_symbol_bound(v: float) -> float:
    """Asymptotic per-symbol PIE of the three-symbol design.

    Words ``000, 111`` carry probability ``1/2 - v`` each and ``001, 010``
    probability ``v`` each.  The maximum over ``v`` is about 2.0679 near
    ``v = 0.0375``.
    """
    if not 0 <= v <= 0.5:
        raise DomainError(f"v must lie in [0, 1/2], got {v}")
    s3 = math.sqrt(3)
    inner = 4 * v * (s3 * math.log(2 + s3) - 4 * math.log(2) - v) + 8 * f_curve(v)
    return 2.0 + 2.0 / 9.0 * inner


def word_povm(zperp_vectors: Sequence[np.ndarray], M: int) -> Povm:
    """Rank-1 ``Zperp`` projectors plus one ``Z`` element covering the rest."""
    Qs = [sector_projector(v) for v in zperp_vectors]
    rest = np.eye(M + 1) - sum(Qs) if Qs else np.eye(M + 1)
    return Povm([rest, *Qs])
