"""Qubit-ancilla strategy and its optimal closed forms.

``V |phi_i>|0>_A = sqrt(1-|a_i|^2) |i>|1>_A + a_i |s>|0>_A`` with
``|s> = sum_k |k> / sqrt(d)`` and ``conj(a_i) a_j = <phi_i|phi_j>``.
Outcome ``|i><i| (x) |1><1|`` identifies state ``i``; ``I (x) |0><0|`` is
inconclusive. Coherence is measured in the joint product basis.
"""

from dataclasses import dataclass

import numpy as np

from .coherence import ProjectiveBasis, mean_coherence_li
from .config import DEFAULT_TOL, Tolerances
from .errors import InfeasibleError, InvalidInputError
from .linalg_core import ket, span_isometry_unitary
from .protocol_coherence import JointUnitary, gram_consistent
from .states import Ensemble, gram


@dataclass(frozen=True)
class LiProtocol:
    alphas: np.ndarray
    unitary: JointUnitary

    @property
    def coherence_basis(self) -> ProjectiveBasis:
        return ProjectiveBasis.computational(self.unitary.system_dim * 2)


def li_labels(system_dim: int) -> np.ndarray:
    labels = np.full(system_dim * 2, -1)
    labels[1::2] = np.arange(system_dim)
    return labels


def li_targets(ensemble: Ensemble, alphas) -> np.ndarray:
    d = ensemble.dim
    uniform = np.ones(d, dtype=complex) / np.sqrt(d)
    rows = []
    for i, a in enumerate(np.asarray(alphas, dtype=complex)):
        rows.append(np.sqrt(max(1.0 - abs(a) ** 2, 0.0)) * np.kron(ket(i, d), ket(1, 2))
                    + a * np.kron(uniform, ket(0, 2)))
    return np.array(rows)


def build_unitary_li(ensemble: Ensemble, alphas, tol: Tolerances = DEFAULT_TOL) -> LiProtocol:
    alphas = np.asarray(alphas, dtype=complex).reshape(-1)
    if alphas.size != ensemble.n:
        raise InvalidInputError(f"{alphas.size} amplitudes for {ensemble.n} states")
    if np.any(np.abs(alphas) > 1.0 + 1e-12):
        raise InvalidInputError("every |alpha_i| must be <= 1")
    if not gram_consistent(gram(ensemble), alphas, tol.gram_mismatch):
        raise InfeasibleError("amplitudes do not reproduce the ensemble overlaps")
    ensemble.require_independent(tol.independence)
    sources = np.array([np.kron(phi, ket(0, 2)) for phi in ensemble.states])
    v = span_isometry_unitary(sources.T, li_targets(ensemble, alphas).T, tol.gram_mismatch)
    return LiProtocol(alphas, JointUnitary(v, ensemble.dim, 2, li_labels(ensemble.dim)))


def optimal_symmetric(d: int, alpha_sq: float) -> tuple[float, float]:
    """Equal priors and equal overlaps ``|a|^2``: returns ``(P_s, C_mean)``."""
    if not 0.0 <= alpha_sq <= 1.0:
        raise InvalidInputError("alpha_sq must lie in [0, 1]")
    return 1.0 - alpha_sq, alpha_sq * (2.0 - (d + 1) / d * alpha_sq)


def branch_boundary(d: int) -> float:
    """``|a|`` at which the one-vs-rest optimum switches branch."""
    return (d - 1) ** -0.25


def optimal_one_vs_rest(d: int, alpha: float) -> tuple[float, str, np.ndarray]:
    """Equal priors, ``<phi_1|phi_i> = |a|^2`` for ``i != 1`` and the rest orthogonal.

    Returns ``(P_s, branch, |alphas|)`` with branch ``"a"`` up to and
    including the boundary and ``"b"`` beyond it.
    """
    if d < 2:
        raise InvalidInputError("need d >= 2")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidInputError("alpha must lie in [0, 1]")
    branch = "a" if alpha <= branch_boundary(d) else "b"
    return one_vs_rest_success(d, alpha, branch), branch, one_vs_rest_alphas(d, alpha, branch)


def one_vs_rest_alphas(d: int, alpha: float, branch: str) -> np.ndarray:
    root = (d - 1) ** 0.25
    if branch == "a":
        mags = np.full(d, alpha / root)
        mags[0] = root * alpha
    elif branch == "b":
        mags = np.full(d, alpha * alpha)
        mags[0] = 1.0
    else:
        raise InvalidInputError(f"unknown branch {branch!r}")
    return mags


def one_vs_rest_success(d: int, alpha: float, branch: str) -> float:
    a2 = alpha * alpha
    if branch == "a":
        return 1.0 - 2.0 * np.sqrt(d - 1) / d * a2
    return (d - 1) / d * (1.0 - a2 * a2)


def coherence_one_vs_rest(d: int, alpha: float, branch: str | None = None) -> float:
    """Mean coherence of the optimal one-vs-rest strategy, from the amplitude list.

    ``branch`` defaults to the one that is optimal at ``alpha``.
    """
    if branch is None:
        branch = optimal_one_vs_rest(d, alpha)[1]
    mags = one_vs_rest_alphas(d, alpha, branch)
    return mean_coherence_li(np.full(d, 1.0 / d), mags, d)


def printed_coherence_branch_a(d: int, alpha: float) -> float:
    a2 = alpha * alpha
    return a2 / d * (4.0 * np.sqrt(d - 1) - (d + 1) * a2)


def printed_coherence_branch_b(d: int, alpha: float) -> float:
    # Published polynomial, kept verbatim for comparison; see coherence_one_vs_rest.
    a4 = alpha ** 4
    return (2.0 + (d - 1) * a4) / d - (d + 1) / d ** 2 * (1.0 + (d - 1) * alpha ** 8)
