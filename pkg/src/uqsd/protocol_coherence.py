"""Discrimination with a (n+1)-level ancilla whose coherence carries the overlap.

The joint unitary acts as::

    U |phi_i>|0>_A = sqrt(1 - |a_i|^2) |ref_i>|i>_A + a_i |ref_i>|0>_A

with ``conj(a_i) a_j <ref_i|ref_j> = <phi_i|phi_j>`` for ``i != j``. Measuring
the ancilla in its computational basis identifies state ``i`` on outcome
``i`` and is inconclusive on outcome ``0``.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import InfeasibleError, InvalidInputError
from .linalg_core import (complete_to_unitary, inner, is_unitary, ket, max_norm,
                          partial_trace, span_isometry_unitary)
from .states import Ensemble, gram


@dataclass(frozen=True)
class ProtocolParams:
    """Amplitudes ``a_i`` and reference states (rows). ``reference_states=None``
    means every reference state is the first ensemble state."""

    alphas: np.ndarray
    reference_states: np.ndarray | None = None

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=complex).reshape(-1)
        if np.any(np.abs(alphas) > 1.0 + 1e-12):
            raise InvalidInputError("every |alpha_i| must be <= 1")
        object.__setattr__(self, "alphas", alphas)
        if self.reference_states is not None:
            refs = np.asarray(self.reference_states, dtype=complex)
            if refs.ndim != 2 or refs.shape[0] != alphas.size:
                raise InvalidInputError("need one reference state per amplitude")
            object.__setattr__(self, "reference_states", refs)

    def references(self, ensemble: Ensemble) -> np.ndarray:
        if self.reference_states is None:
            return np.tile(ensemble.states[0], (self.alphas.size, 1))
        return self.reference_states

    def constraint_residual(self, ensemble: Ensemble) -> float:
        """Max over ``i != j`` of ``|conj(a_i) a_j <ref_i|ref_j> - gamma_ij|``."""
        refs = self.references(ensemble)
        target = np.outer(np.conj(self.alphas), self.alphas) * (refs.conj() @ refs.T)
        diff = target - gram(ensemble)
        np.fill_diagonal(diff, 0.0)
        return max_norm(diff)


@dataclass(frozen=True)
class JointUnitary:
    """Unitary on system (x) ancilla, with the measurement read-out.

    ``outcome_labels[k]`` is the state index reported when the joint
    computational basis vector ``k`` is observed, or ``-1`` for inconclusive.
    """

    matrix: np.ndarray
    system_dim: int
    aux_dim: int
    outcome_labels: np.ndarray = field(repr=False)

    def input_vector(self, psi) -> np.ndarray:
        return np.kron(np.asarray(psi, dtype=complex), ket(0, self.aux_dim))

    def apply(self, psi) -> np.ndarray:
        return self.matrix @ self.input_vector(psi)

    def is_unitary(self, tol: float = DEFAULT_TOL.unitary) -> bool:
        return is_unitary(self.matrix, tol)


def ancilla_labels(system_dim: int, aux_dim: int) -> np.ndarray:
    """Outcome ``j`` of the ancilla identifies state ``j - 1``; ``0`` is inconclusive."""
    aux = np.tile(np.arange(aux_dim), system_dim)
    return aux - 1


@dataclass(frozen=True)
class UnitaryConstructionD2:
    gamma: complex
    alpha: complex
    phi_perp: np.ndarray  # unit vector orthogonal to |phi_1>
    upsilon: np.ndarray  # rows: the ancilla basis v_1, v_2, v_3
    reference: np.ndarray
    reference_perp: np.ndarray


@dataclass(frozen=True)
class PostStates:
    joint: np.ndarray  # rows |Phi_i>
    rho: tuple  # joint density matrices
    aux: tuple  # ancilla reduced states
    average: np.ndarray


def _expect_n_states(ensemble: Ensemble, params: ProtocolParams) -> None:
    if params.alphas.size != ensemble.n:
        raise InvalidInputError(f"{params.alphas.size} amplitudes for {ensemble.n} states")


def solve_alphas_d2(gamma: complex, x: float) -> ProtocolParams:
    """Amplitudes for two states with common reference: ``a_1 = sqrt(x)``, ``a_2 = gamma / conj(a_1)``."""
    gamma = complex(gamma)
    g2 = abs(gamma) ** 2
    if not (g2 - 1e-15 <= x <= 1.0 + 1e-15):
        raise InvalidInputError(f"x={x} outside the feasible interval [{g2}, 1]")
    x = min(max(x, 0.0), 1.0)
    a1 = np.sqrt(x)
    a2 = 0.0 if gamma == 0 else gamma / a1
    if abs(a2) > 1.0:
        a2 = a2 / abs(a2)
    return ProtocolParams(np.array([a1, a2], dtype=complex))


def _orthogonal_qubit(v: np.ndarray) -> np.ndarray:
    return np.array([-np.conj(v[1]), np.conj(v[0])], dtype=complex)


def build_unitary_d2(ensemble: Ensemble, params: ProtocolParams,
                     tol: Tolerances = DEFAULT_TOL) -> tuple[JointUnitary, UnitaryConstructionD2]:
    """Explicit two-state construction on a qubit with a qutrit ancilla.

    The orthonormal basis ``{|phi_1>|k>, |phi_1^perp>|k>}`` is sent to
    ``{|r>|v_k>, |r^perp>|v_k>}`` where ``v_1 = a|0> + sqrt(1-|a|^2)|1>`` and
    ``v_2`` is fixed by where ``|phi_1^perp>|0>`` must go.
    """
    if ensemble.dim != 2 or ensemble.n != 2:
        raise InvalidInputError("the explicit construction needs two qubit states")
    _expect_n_states(ensemble, params)
    phi1, phi2 = ensemble.states
    gamma = inner(phi1, phi2)
    alpha = params.alphas[0]
    g, a = abs(gamma), abs(alpha)
    if g >= 1.0:
        raise InvalidInputError("states must not coincide")
    if a < g - 1e-12:
        raise InfeasibleError(f"|alpha|={a:.6g} is below |gamma|={g:.6g}")
    a2_expected = 0.0 if gamma == 0 else gamma / np.conj(alpha)
    if abs(params.alphas[1] - a2_expected) > tol.condition:
        raise InfeasibleError("second amplitude must equal gamma / conj(alpha_1)")

    refs = params.references(ensemble)
    if max_norm(refs[0] - refs[1]) > tol.normalization:
        raise InvalidInputError("the explicit construction uses one common reference state")
    ref = refs[0] / np.linalg.norm(refs[0])
    ref_perp = _orthogonal_qubit(ref)

    sg = np.sqrt(1.0 - g * g)
    phi_perp = phi2 - gamma * phi1
    phi_perp = phi_perp / np.linalg.norm(phi_perp) if g > 0 else phi2.copy()

    v1 = np.array([alpha, np.sqrt(max(1.0 - a * a, 0.0)), 0.0], dtype=complex)
    if a == 0.0:
        v2 = np.array([0.0, 0.0, 1.0], dtype=complex)
    else:
        v2 = np.array([
            gamma * (1.0 - a * a) / (np.conj(alpha) * sg),
            -gamma * np.sqrt(max(1.0 - a * a, 0.0)) / sg,
            np.sqrt(max(a * a - g * g, 0.0)) / (a * sg),
        ], dtype=complex)
    v3 = complete_to_unitary([v1, v2], 3, tol)[:, 2]
    ups = np.array([v1, v2, v3])

    sources = [np.kron(phi1, ket(0, 3)), np.kron(phi_perp, ket(0, 3)),
               np.kron(phi1, ket(1, 3)), np.kron(phi_perp, ket(1, 3)),
               np.kron(phi1, ket(2, 3)), np.kron(phi_perp, ket(2, 3))]
    targets = [np.kron(ref, v1), np.kron(ref, v2),
               np.kron(ref, v3), np.kron(ref_perp, v1),
               np.kron(ref_perp, v2), np.kron(ref_perp, v3)]
    u = np.array(targets).T @ np.conj(np.array(sources))
    unitary = JointUnitary(u, 2, 3, ancilla_labels(2, 3))
    return unitary, UnitaryConstructionD2(gamma, alpha, phi_perp, ups, ref, ref_perp)


def target_states(ensemble: Ensemble, params: ProtocolParams, aux_dim: int | None = None) -> np.ndarray:
    """Rows ``|Phi_i> = sqrt(1-|a_i|^2)|ref_i>|i>_A + a_i|ref_i>|0>_A`` (ancilla index 1-based)."""
    _expect_n_states(ensemble, params)
    aux_dim = ensemble.n + 1 if aux_dim is None else aux_dim
    refs = params.references(ensemble)
    out = []
    for i, (a, r) in enumerate(zip(params.alphas, refs)):
        flag = np.sqrt(max(1.0 - abs(a) ** 2, 0.0)) * ket(i + 1, aux_dim) + a * ket(0, aux_dim)
        out.append(np.kron(r, flag))
    return np.array(out)


def build_unitary_general(ensemble: Ensemble, params: ProtocolParams,
                          tol: Tolerances = DEFAULT_TOL) -> JointUnitary:
    """Any-dimension construction: an isometry between the span of the inputs
    ``|phi_i>|0>`` and the span of the targets, completed to a unitary."""
    ensemble.require_independent(tol.independence)
    aux_dim = ensemble.n + 1
    targets = target_states(ensemble, params, aux_dim)
    sources = np.array([np.kron(phi, ket(0, aux_dim)) for phi in ensemble.states])
    u = span_isometry_unitary(sources.T, targets.T, tol.gram_mismatch)
    return JointUnitary(u, ensemble.dim, aux_dim, ancilla_labels(ensemble.dim, aux_dim))


def post_states(unitary: JointUnitary, ensemble: Ensemble) -> PostStates:
    if unitary.system_dim != ensemble.dim:
        raise InvalidInputError("unitary and ensemble dimensions differ")
    dims = (unitary.system_dim, unitary.aux_dim)
    joint = np.array([unitary.apply(phi) for phi in ensemble.states])
    rhos = tuple(np.outer(v, np.conj(v)) for v in joint)
    aux = tuple(partial_trace(r, dims, 1) for r in rhos)
    average = sum(p * r for p, r in zip(ensemble.priors, rhos))
    return PostStates(joint, rhos, aux, average)


def success_probability(priors, alphas) -> float:
    """``sum_i p_i (1 - |a_i|^2)``."""
    a2 = np.abs(np.asarray(alphas, dtype=complex)) ** 2
    return float(np.sum(np.asarray(priors) * (1.0 - a2)))


def success_probability_from_state(rho, system_dim: int, aux_dim: int) -> float:
    """``1 - tr[(I (x) |0><0|_A) rho]``."""
    proj = np.kron(np.eye(system_dim), np.outer(ket(0, aux_dim), ket(0, aux_dim)))
    return float(1.0 - np.real(np.trace(proj @ rho)))


def phase_alphas(g, alpha_sq, tol: float = DEFAULT_TOL.condition) -> np.ndarray | None:
    """Amplitudes with given moduli and ``conj(a_i) a_j = g_ij``, or ``None``.

    Phases propagate along non-zero overlaps from the first index of each
    connected component, which is taken real and non-negative.
    """
    g = np.asarray(g, dtype=complex)
    mags = np.sqrt(np.clip(np.asarray(alpha_sq, dtype=float), 0.0, None))
    n = mags.size
    alphas = np.full(n, np.nan + 0j)
    for root in range(n):
        if not np.isnan(alphas[root]):
            continue
        alphas[root] = mags[root]
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in range(n):
                if j == i or not np.isnan(alphas[j]):
                    continue
                if abs(g[i, j]) > tol and abs(alphas[i]) > tol:
                    alphas[j] = g[i, j] / np.conj(alphas[i])
                    queue.append(j)
    if not gram_consistent(g, alphas, tol):
        return None
    return alphas


def gram_consistent(g, alphas, tol: float = DEFAULT_TOL.condition) -> bool:
    diff = np.outer(np.conj(alphas), alphas) - np.asarray(g)
    np.fill_diagonal(diff, 0.0)
    return bool(np.all(np.abs(alphas) <= 1.0 + 1e-12) and max_norm(diff) <= tol)


def condition1_check(g, tol: float = DEFAULT_TOL.condition) -> tuple[bool, np.ndarray | None]:
    """Ratio test ``|g_ij||g_ik| / |g_jk|`` constant over pairs ``j, k`` for each ``i``.

    When it holds, every reference state can be the same vector and the
    amplitudes are recovered from the ratios; infeasible amplitude systems
    (a modulus above one, or inconsistent phases) report ``(False, None)``.
    Two states pass vacuously with no amplitudes fixed.
    """
    g = np.asarray(g, dtype=complex)
    n = g.shape[0]
    if n < 3:
        return True, None
    absg = np.abs(g)
    ratios = np.empty(n)
    for i in range(n):
        vals = []
        others = [j for j in range(n) if j != i]
        for a_idx, j in enumerate(others):
            for k in others[a_idx + 1:]:
                if absg[j, k] <= tol:
                    raise InfeasibleError(f"overlap between states {j + 1} and {k + 1} is zero")
                vals.append(absg[i, j] * absg[i, k] / absg[j, k])
        if max(vals) - min(vals) > tol:
            return False, None
        ratios[i] = vals[0]
    if np.any(ratios > 1.0 + tol):
        return False, None
    alphas = phase_alphas(g, np.minimum(ratios, 1.0), tol)
    if alphas is None:
        return False, None
    return True, alphas


def condition2_check(priors, g, tol: float = DEFAULT_TOL.condition) -> bool:
    """``p_i |g_ki|^2 == p_j |g_kj|^2`` for all mutually distinct ``i, j, k``."""
    p = np.asarray(priors, dtype=float)
    absg2 = np.abs(np.asarray(g)) ** 2
    n = p.size
    for k in range(n):
        vals = [p[i] * absg2[k, i] for i in range(n) if i != k]
        if vals and max(vals) - min(vals) > tol:
            return False
    return True
