"""Numerical tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    eig_clamp: float = 1e-12
    eig_error: float = 1e-8
    orthonormal: float = 1e-10
    fill_residual: float = 1e-8
    unitary: float = 1e-10
    normalization: float = 1e-10
    prior_sum: float = 1e-12
    independence: float = 1e-8
    gram_mismatch: float = 1e-8
    purity: float = 1e-9
    schmidt: float = 1e-9
    condition: float = 1e-9
    coherence_clamp: float = 1e-12
    bound_slack: float = 1e-12


DEFAULT_TOL = Tolerances()
