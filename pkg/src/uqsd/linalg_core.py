"""Small dense complex linear algebra.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``.
Dimensions here never exceed a few dozen, so the routines favour
determinism and readability over speed.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import InfeasibleError, InvalidInputError


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if arr.size == 0:
        raise InvalidInputError("vector must have dimension >= 1")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("vector entries must be finite")
    return arr


def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix entries must be finite")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def inner(a, b) -> complex:
    """Return ``<a|b>``, conjugate-linear in ``a``."""
    a, b = as_vector(a), as_vector(b)
    if a.shape != b.shape:
        raise InvalidInputError(f"dimension mismatch: {a.size} vs {b.size}")
    return complex(np.vdot(a, b))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(psi) -> np.ndarray:
    psi = as_vector(psi)
    return np.outer(psi, np.conj(psi))


def max_norm(m) -> float:
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def is_hermitian(m, tol: float = DEFAULT_TOL.hermitian) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and max_norm(m - dagger(m)) <= tol


def is_unitary(m, tol: float = DEFAULT_TOL.unitary) -> bool:
    """True iff ``max|m^dagger m - I| <= tol``."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError("is_unitary expects a square matrix")
    return max_norm(dagger(m) @ m - np.eye(m.shape[0])) <= tol


@dataclass(frozen=True)
class HermitianDecomposition:
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def eigh_jacobi(m, tol: Tolerances = DEFAULT_TOL, max_sweeps: int = 60) -> HermitianDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies the real symmetric Jacobi rotation that annihilates it.
    """
    a = as_matrix(m).copy()
    n = a.shape[0]
    if a.shape[1] != n:
        raise InvalidInputError("eigh_jacobi expects a square matrix")
    if not is_hermitian(a, tol.hermitian):
        raise InvalidInputError("matrix is not Hermitian")
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return HermitianDecomposition(np.zeros(n), v)
    eps = np.finfo(float).eps
    offdiag = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps):
        off = np.linalg.norm(a[offdiag])
        if off <= eps * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-3 * eps * scale:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = dagger(rot) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return HermitianDecomposition(w[order], v[:, order])


def sqrt_psd(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-tol.eig_error, 0)`` are treated as roundoff and
    clamped to zero; anything more negative raises.
    """
    dec = eigh_jacobi(m, tol)
    w = dec.eigenvalues
    if w[0] < -tol.eig_error:
        raise InvalidInputError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    root = np.sqrt(np.clip(w, 0.0, None))
    v = dec.eigenvectors
    out = (v * root) @ dagger(v)
    return 0.5 * (out + dagger(out))


def _check_orthonormal(cols: np.ndarray, tol: float) -> None:
    if cols.shape[1] == 0:
        return
    err = max_norm(dagger(cols) @ cols - np.eye(cols.shape[1]))
    if err > tol:
        raise InvalidInputError(f"columns are not orthonormal (max deviation {err:.3e})")


def complete_to_unitary(columns, total_dim: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Extend orthonormal columns to a full unitary.

    The supplied columns are kept verbatim as the leading columns. Fill
    vectors are standard basis vectors passed through modified Gram-Schmidt
    twice; candidates whose residual norm is below ``tol.fill_residual`` are
    skipped.
    """
    cols = [as_vector(c) for c in columns]
    if len(cols) > total_dim:
        raise InvalidInputError(f"{len(cols)} columns do not fit in dimension {total_dim}")
    if any(c.size != total_dim for c in cols):
        raise InvalidInputError("column dimension does not match total_dim")
    basis = np.zeros((total_dim, total_dim), dtype=complex)
    for k, c in enumerate(cols):
        basis[:, k] = c
    _check_orthonormal(basis[:, : len(cols)], tol.orthonormal)

    filled = len(cols)
    for e in range(total_dim):
        if filled == total_dim:
            break
        w = ket(e, total_dim)
        for _ in range(2):
            for k in range(filled):
                w = w - np.vdot(basis[:, k], w) * basis[:, k]
        norm = np.linalg.norm(w)
        if norm < tol.fill_residual:
            continue
        basis[:, filled] = w / norm
        filled += 1
    if filled != total_dim:
        raise RuntimeError("basis completion failed")
    return basis


def gram_schmidt(vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR of the columns of ``vectors`` by modified Gram-Schmidt with one
    re-orthogonalisation pass. Requires full column rank."""
    a = np.asarray(vectors, dtype=complex)
    rows, k = a.shape
    q = np.zeros((rows, k), dtype=complex)
    r = np.zeros((k, k), dtype=complex)
    for j in range(k):
        w = a[:, j].copy()
        for _ in range(2):
            for i in range(j):
                c = np.vdot(q[:, i], w)
                r[i, j] += c
                w = w - c * q[:, i]
        norm = np.linalg.norm(w)
        if norm < DEFAULT_TOL.fill_residual:
            raise InfeasibleError("vectors are numerically linearly dependent")
        r[j, j] = norm
        q[:, j] = w / norm
    return q, r


def span_isometry_unitary(sources, targets, gram_tol: float = DEFAULT_TOL.gram_mismatch) -> np.ndarray:
    """Unitary ``U`` with ``U @ sources[:, i] == targets[:, i]`` for every column.

    Such a ``U`` exists iff both column sets share a Gram matrix. The sources
    are orthonormalised as ``S = Q R``; ``T R^-1`` is then orthonormal too, and
    completing both to full bases gives ``U = U_t U_s^dagger``.
    """
    s = np.asarray(sources, dtype=complex)
    t = np.asarray(targets, dtype=complex)
    if s.shape != t.shape:
        raise InvalidInputError(f"shape mismatch: {s.shape} vs {t.shape}")
    mismatch = max_norm(dagger(s) @ s - dagger(t) @ t)
    if mismatch > gram_tol:
        raise InfeasibleError(f"source/target Gram matrices differ by {mismatch:.3e}")
    dim = s.shape[0]
    q_s, r = gram_schmidt(s)
    q_t = np.linalg.solve(r.T, t.T).T  # t @ inv(r)
    u_s = complete_to_unitary(list(q_s.T), dim)
    u_t = complete_to_unitary(list(q_t.T), dim)
    return u_t @ dagger(u_s)


def partial_trace(rho, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Reduced state of a bipartite operator; ``keep`` is 0 (first) or 1 (second)."""
    d0, d1 = dims
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (d0 * d1, d0 * d1):
        raise InvalidInputError(f"operator shape {rho.shape} does not match dims {dims}")
    r = rho.reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("ajbj->ab", r)
    if keep == 1:
        return np.einsum("iaib->ab", r)
    raise InvalidInputError("keep must be 0 or 1")
