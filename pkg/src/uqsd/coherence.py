"""Wigner-Yanase skew information and the coherence built from it."""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import InvalidInputError
from .linalg_core import is_hermitian, max_norm, sqrt_psd


@dataclass(frozen=True)
class ProjectiveBasis:
    """A von Neumann measurement given by its projectors."""

    projectors: tuple

    def __post_init__(self):
        projs = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        if not projs:
            raise InvalidInputError("a basis needs at least one projector")
        dim = projs[0].shape[0]
        tol = DEFAULT_TOL.hermitian
        for j, pj in enumerate(projs):
            if pj.shape != (dim, dim):
                raise InvalidInputError("projectors must share one square shape")
            for k, pk in enumerate(projs):
                expected = pj if j == k else np.zeros_like(pj)
                if max_norm(pj @ pk - expected) > tol:
                    raise InvalidInputError("projectors are not mutually orthogonal idempotents")
        if max_norm(sum(projs) - np.eye(dim)) > tol:
            raise InvalidInputError("projectors do not resolve the identity")
        object.__setattr__(self, "projectors", projs)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @classmethod
    def computational(cls, dim: int) -> "ProjectiveBasis":
        eye = np.eye(dim, dtype=complex)
        return cls(tuple(np.outer(eye[j], eye[j]) for j in range(dim)))

    @classmethod
    def from_vectors(cls, vectors) -> "ProjectiveBasis":
        return cls(tuple(np.outer(v, np.conj(v)) for v in np.asarray(vectors, dtype=complex)))


@dataclass(frozen=True)
class CoherenceReport:
    per_outcome: tuple  # coherence of each post-measurement state, indexed like the ensemble
    priors: tuple
    mean: float

    def as_record(self) -> dict:
        rec = {f"coherence_{i + 1}": c for i, c in enumerate(self.per_outcome)}
        rec["c_mean"] = self.mean
        return rec


def skew_information(sigma, k, tol: Tolerances = DEFAULT_TOL) -> float:
    """``I(sigma, K) = tr(sigma K^2) - tr(sqrt(sigma) K sqrt(sigma) K)``.

    For pure ``sigma`` the square root is ``sigma`` itself, which reduces the
    expression to the variance of ``K``. Small negative roundoff is clamped.
    """
    sigma = np.asarray(sigma, dtype=complex)
    k = np.asarray(k, dtype=complex)
    if not is_hermitian(k, tol.hermitian):
        raise InvalidInputError("observable K must be Hermitian")
    if sigma.shape != k.shape:
        raise InvalidInputError(f"shape mismatch: {sigma.shape} vs {k.shape}")
    purity = np.real(np.trace(sigma @ sigma))
    root = sigma if purity > 1.0 - 1e-12 else sqrt_psd(sigma, tol)
    val = np.real(np.trace(sigma @ k @ k) - np.trace(root @ k @ root @ k))
    if val < -tol.coherence_clamp:
        raise ArithmeticError(f"skew information came out negative ({val:.3e})")
    return max(float(val), 0.0)


def coherence_ci(rho, basis: ProjectiveBasis, tol: Tolerances = DEFAULT_TOL) -> float:
    """Sum of skew informations of ``rho`` over the projectors of ``basis``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (basis.dim, basis.dim):
        raise InvalidInputError(f"state shape {rho.shape} does not match basis dimension {basis.dim}")
    return float(sum(skew_information(rho, p, tol) for p in basis.projectors))


def coherence_report(priors, states, basis: ProjectiveBasis) -> CoherenceReport:
    per = tuple(coherence_ci(s, basis) for s in states)
    priors = tuple(float(p) for p in priors)
    return CoherenceReport(per, priors, float(np.dot(priors, per)))


def _alpha_sq(alphas) -> np.ndarray:
    a2 = np.abs(np.asarray(alphas, dtype=complex)) ** 2
    if np.any(a2 > 1.0 + 1e-12):
        raise InvalidInputError("every |alpha_i| must be <= 1")
    return np.clip(a2, 0.0, 1.0)


def mean_coherence_ancilla(priors, alphas) -> float:
    """Closed form ``2 sum_i p_i |a_i|^2 (1 - |a_i|^2)`` for the ancilla states."""
    a2 = _alpha_sq(alphas)
    return float(2.0 * np.sum(np.asarray(priors) * a2 * (1.0 - a2)))


def mean_coherence_li(priors, alphas, d: int) -> float:
    """Closed form ``sum_i p_i |a_i|^2 (2 - (d+1)/d |a_i|^2)`` for the qubit-ancilla strategy."""
    a2 = _alpha_sq(alphas)
    return float(np.sum(np.asarray(priors) * a2 * (2.0 - (d + 1) / d * a2)))


def coherence_lower_bound_check(p_s: float, c_mean: float, slack: float = DEFAULT_TOL.bound_slack) -> bool:
    """True iff the success probability is at least half the mean coherence."""
    return bool(p_s >= 0.5 * c_mean - slack)
