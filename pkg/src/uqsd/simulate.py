"""Seeded Monte Carlo runs of a discrimination protocol.

Trials are processed in fixed-size chunks; chunk ``c`` draws from a
generator seeded with ``(seed, c)``. Tallies add across chunks, so the
result does not depend on how many workers process them.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError
from .protocol_coherence import JointUnitary
from .protocol_li import LiProtocol
from .states import Ensemble

CHUNK_SIZE = 1 << 14


class TrialOutcome(NamedTuple):
    prepared: int
    identified: int | None  # None for an inconclusive outcome
    correct: bool


@dataclass(frozen=True)
class SimulationSummary:
    trials: int
    successes: int
    inconclusives: int
    errors: int
    seed: int
    per_state_trials: tuple
    per_state_inconclusive: tuple
    max_error_probability: float

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def std_error(self) -> float:
        p = self.p_hat
        return float(np.sqrt(p * (1.0 - p) / self.trials))

    @property
    def unambiguous(self) -> bool:
        return self.errors == 0

    def as_record(self, z: float = 4.0) -> dict:
        rec = {"trials": self.trials, "successes": self.successes,
               "inconclusives": self.inconclusives, "errors": self.errors,
               "p_hat": self.p_hat, "std_error": self.std_error, "seed": self.seed,
               "unambiguous": self.unambiguous}
        if self.trials >= 30:
            rec["ci_low"], rec["ci_high"] = confidence_interval(self, z)
            rec["z"] = z
        for i, (n_i, inc) in enumerate(zip(self.per_state_trials, self.per_state_inconclusive), 1):
            rec[f"state{i}_trials"] = n_i
            rec[f"state{i}_inconclusive"] = inc
        return rec


def _unitary(protocol) -> JointUnitary:
    if isinstance(protocol, LiProtocol):
        return protocol.unitary
    if isinstance(protocol, JointUnitary):
        return protocol
    raise InvalidInputError(f"cannot simulate a {type(protocol).__name__}")


def outcome_table(protocol, ensemble: Ensemble) -> np.ndarray:
    """Born probabilities ``T[i, k]``: state ``i`` yields outcome ``k``.

    Column 0 is inconclusive; column ``j + 1`` identifies state ``j``.
    """
    u = _unitary(protocol)
    if u.system_dim != ensemble.dim:
        raise InvalidInputError(f"protocol acts on dimension {u.system_dim}, ensemble has {ensemble.dim}")
    n_out = int(max(u.outcome_labels.max() + 2, ensemble.n + 1))
    table = np.zeros((ensemble.n, n_out))
    for i, phi in enumerate(ensemble.states):
        probs = np.abs(u.apply(phi)) ** 2
        np.add.at(table[i], u.outcome_labels + 1, probs)
    return table / table.sum(axis=1, keepdims=True)


def _run_chunk(cum_priors, cum_table, count, seed, chunk):
    rng = np.random.default_rng(np.random.SeedSequence([seed, chunk]))
    n = cum_table.shape[0]
    prepared = np.minimum(np.searchsorted(cum_priors, rng.random(count), side="right"), n - 1)
    u = rng.random(count)
    outcome = (u[:, None] >= cum_table[prepared]).sum(axis=1)
    outcome = np.minimum(outcome, cum_table.shape[1] - 1)
    return prepared, outcome


def _tally(prepared, outcome, n):
    inconclusive = outcome == 0
    correct = outcome == prepared + 1
    return (np.bincount(prepared, minlength=n),
            np.bincount(prepared[inconclusive], minlength=n),
            int(correct.sum()), int((~inconclusive & ~correct).sum()))


def _chunks(n_trials: int):
    return [(c, min(CHUNK_SIZE, n_trials - c * CHUNK_SIZE))
            for c in range((n_trials + CHUNK_SIZE - 1) // CHUNK_SIZE)]


def _prepare(protocol, ensemble):
    table = outcome_table(protocol, ensemble)
    off = table[:, 1:].copy()
    off[np.arange(ensemble.n), np.arange(ensemble.n)] = 0.0
    cum_priors = np.cumsum(ensemble.priors)
    return table, float(off.max(initial=0.0)), cum_priors, np.cumsum(table, axis=1)


def run_trials(protocol, ensemble: Ensemble, n_trials: int, seed: int,
               workers: int = 1) -> SimulationSummary:
    """Sample ``n_trials`` preparations and measurements with exact Born probabilities."""
    if n_trials < 1:
        raise InvalidInputError("need at least one trial")
    _, max_err, cum_priors, cum_table = _prepare(protocol, ensemble)
    n = ensemble.n

    def job(spec):
        chunk, count = spec
        return _tally(*_run_chunk(cum_priors, cum_table, count, seed, chunk), n)

    chunks = _chunks(n_trials)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, chunks))
    else:
        parts = [job(c) for c in chunks]

    per_state = sum(p[0] for p in parts)
    per_inc = sum(p[1] for p in parts)
    successes = sum(p[2] for p in parts)
    errors = sum(p[3] for p in parts)
    return SimulationSummary(
        trials=n_trials, successes=successes, inconclusives=int(per_inc.sum()), errors=errors,
        seed=seed, per_state_trials=tuple(int(v) for v in per_state),
        per_state_inconclusive=tuple(int(v) for v in per_inc), max_error_probability=max_err)


def trial_outcomes(protocol, ensemble: Ensemble, n_trials: int, seed: int) -> list[TrialOutcome]:
    """Per-trial records, drawn from the same streams as :func:`run_trials`."""
    _, _, cum_priors, cum_table = _prepare(protocol, ensemble)
    out = []
    for chunk, count in _chunks(n_trials):
        prepared, outcome = _run_chunk(cum_priors, cum_table, count, seed, chunk)
        for i, k in zip(prepared.tolist(), outcome.tolist()):
            ident = None if k == 0 else k - 1
            out.append(TrialOutcome(i, ident, ident == i))
    return out


def confidence_interval(summary: SimulationSummary, z: float = 4.0) -> tuple[float, float]:
    """Normal-approximation interval ``p_hat +/- z * SE``, clipped to [0, 1]."""
    if summary.trials < 30:
        raise InvalidInputError("normal approximation needs at least 30 trials")
    half = z * summary.std_error
    return max(summary.p_hat - half, 0.0), min(summary.p_hat + half, 1.0)
