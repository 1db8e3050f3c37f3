"""Pure-state ensembles, Gram matrices and their diagnostics."""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import InfeasibleError, InvalidInputError
from .linalg_core import dagger, eigh_jacobi, is_hermitian, sqrt_psd


@dataclass(frozen=True)
class Ensemble:
    """Priors ``p_i`` and normalised pure states ``|phi_i>`` (rows of ``states``).

    Any number of states ``n <= dim`` is accepted. Linear independence is not
    enforced here; see :func:`linear_independence` and :meth:`require_independent`.
    """

    priors: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=float).reshape(-1)
        states = np.asarray(self.states, dtype=complex)
        if states.ndim != 2:
            raise InvalidInputError("states must be a 2-D array (one row per state)")
        n, d = states.shape
        if n == 0 or d == 0:
            raise InvalidInputError("ensemble needs at least one state of dimension >= 1")
        if priors.size != n:
            raise InvalidInputError(f"{priors.size} priors for {n} states")
        if n > d:
            raise InvalidInputError(f"{n} states cannot be linearly independent in dimension {d}")
        if not (np.all(np.isfinite(priors)) and np.all(np.isfinite(states))):
            raise InvalidInputError("non-finite ensemble data")
        if np.any(priors <= 0):
            raise InvalidInputError("priors must be strictly positive")
        if abs(priors.sum() - 1.0) > DEFAULT_TOL.prior_sum:
            raise InvalidInputError(f"priors sum to {priors.sum():.15g}, not 1")
        norms = np.linalg.norm(states, axis=1)
        if np.max(np.abs(norms - 1.0)) > DEFAULT_TOL.normalization:
            raise InvalidInputError("states must be normalised")
        priors.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def n(self) -> int:
        return self.states.shape[0]

    def require_independent(self, threshold: float = DEFAULT_TOL.independence) -> None:
        if not linear_independence(self, threshold):
            raise InfeasibleError("ensemble states are not linearly independent")


def gram(e: Ensemble) -> np.ndarray:
    """Overlap matrix ``G[i, j] = <phi_i|phi_j>``."""
    g = e.states.conj() @ e.states.T
    g = 0.5 * (g + dagger(g))
    np.fill_diagonal(g, 1.0)
    return g


def linear_independence(e: Ensemble, threshold: float = DEFAULT_TOL.independence) -> bool:
    return bool(eigh_jacobi(gram(e)).eigenvalues[0] >= threshold)


def is_valid_gram(g, tol: float = DEFAULT_TOL.hermitian) -> bool:
    g = np.asarray(g, dtype=complex)
    if not is_hermitian(g, tol):
        return False
    if np.max(np.abs(np.diag(g) - 1.0)) > tol:
        return False
    return bool(eigh_jacobi(g).eigenvalues[0] >= -tol)


def ensemble_from_gram(g, priors) -> Ensemble:
    """Build states realising a prescribed Gram matrix.

    The columns of ``sqrt(G)`` have pairwise inner products ``G``; they are
    used directly as the states, so ``dim == n``.
    """
    g = np.asarray(g, dtype=complex)
    if not is_valid_gram(g):
        raise InvalidInputError("not a valid Gram matrix (Hermitian, unit diagonal, PSD)")
    root = sqrt_psd(g)
    states = root.T.copy()
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    return Ensemble(priors, states)


def _random_unit_vectors(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    v = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _random_priors(rng: np.random.Generator, n: int) -> np.ndarray:
    w = rng.exponential(size=n)
    p = w / w.sum()
    # exact unit sum so the ensemble invariant holds at 1e-12
    p[-1] = 1.0 - p[:-1].sum()
    return p


def random_ensemble(seed: int, d: int, n: int | None = None, min_gap: float = 1e-3,
                    max_tries: int = 200) -> Ensemble:
    """Seeded random ensemble whose Gram spectrum is bounded below by ``min_gap``."""
    n = d if n is None else n
    if not 1 <= n <= d:
        raise InvalidInputError("need 1 <= n <= d")
    if not 0 < min_gap < 1:
        raise InvalidInputError("min_gap must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        e = Ensemble(_random_priors(rng, n), _random_unit_vectors(rng, n, d))
        if linear_independence(e, min_gap):
            return e
    raise InfeasibleError(f"could not draw an ensemble with min_gap={min_gap} in {max_tries} tries")


def random_factorizable_ensemble(seed: int, d: int, max_abs_alpha: float = 0.95,
                                 min_abs_alpha: float = 0.05) -> tuple[Ensemble, np.ndarray]:
    """Seeded ensemble whose overlaps factor as ``<phi_i|phi_j> = conj(a_i) a_j``.

    Such ensembles satisfy the ratio condition that lets every reference state
    coincide. Returns the ensemble and the generating amplitudes; the first
    amplitude is real and positive.
    """
    rng = np.random.default_rng(seed)
    mags = rng.uniform(min_abs_alpha, max_abs_alpha, size=d)
    phases = np.exp(2j * np.pi * rng.uniform(size=d))
    phases[0] = 1.0
    alphas = mags * phases
    g = np.outer(np.conj(alphas), alphas)
    np.fill_diagonal(g, 1.0)
    return ensemble_from_gram(g, _random_priors(rng, d)), alphas


def product_purity_check(rho, dims: tuple[int, int], tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff ``rho`` is a pure product state across the given bipartition.

    Purity is ``tr(rho^2) = 1``; the product test looks at the second singular
    value of the reshaped amplitude matrix of the dominant eigenvector.
    """
    rho = np.asarray(rho, dtype=complex)
    ds, da = dims
    if rho.shape != (ds * da, ds * da):
        raise InvalidInputError(f"density matrix shape {rho.shape} does not match dims {dims}")
    if abs(np.real(np.trace(rho @ rho)) - 1.0) > tol.purity:
        return False
    dec = eigh_jacobi(rho)
    psi = dec.eigenvectors[:, -1]
    sv = np.linalg.svd(psi.reshape(ds, da), compute_uv=False)
    return bool(len(sv) < 2 or sv[1] <= tol.schmidt)


def validate_density_matrix(rho, tol: float = DEFAULT_TOL.hermitian) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho, tol):
        raise InvalidInputError("density matrix must be Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidInputError("density matrix must have unit trace")
    if eigh_jacobi(rho).eigenvalues[0] < -tol:
        raise InvalidInputError("density matrix must be positive semidefinite")
    return rho


def ensemble_from_json(obj) -> Ensemble:
    try:
        dim = int(obj["dim"])
        priors = [float(p) for p in obj["priors"]]
        states = [[complex(float(re), float(im)) for re, im in row] for row in obj["states"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed ensemble JSON: {exc}") from exc
    if any(len(row) != dim for row in states):
        raise InvalidInputError("every state needs exactly `dim` amplitudes")
    return Ensemble(np.array(priors), np.array(states, dtype=complex).reshape(len(states), dim))


def ensemble_to_json(e: Ensemble) -> dict:
    return {
        "dim": e.dim,
        "priors": [float(p) for p in e.priors],
        "states": [[[float(a.real), float(a.imag)] for a in row] for row in e.states],
    }


def load_ensemble(path) -> Ensemble:
    try:
        text = Path(path).read_text(encoding="utf-8")
        obj = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read ensemble file {path}: {exc}") from exc
    return ensemble_from_json(obj)


def two_state_ensemble(gamma: complex, p1: float = 0.5) -> Ensemble:
    """Qubit ensemble ``|phi_1> = |0>``, ``|phi_2> = gamma|0> + sqrt(1-|gamma|^2)|1>``."""
    gamma = complex(gamma)
    if abs(gamma) >= 1:
        raise InvalidInputError("|gamma| must be < 1")
    if not 0 < p1 < 1:
        raise InvalidInputError("p1 must lie in (0, 1)")
    states = np.array([[1.0, 0.0], [gamma, np.sqrt(1.0 - abs(gamma) ** 2)]], dtype=complex)
    return Ensemble(np.array([p1, 1.0 - p1]), states)
