"""Optimal strategies, the multi-state bound, and coherence-based certification.

Two-state quantities are functions of ``x = |a_1|^2`` on ``[|gamma|^2, 1]``
with ``|a_2|^2 = |gamma|^2 / x``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .coherence import coherence_lower_bound_check, mean_coherence_ancilla
from .config import DEFAULT_TOL
from .errors import InfeasibleError, InvalidInputError
from .protocol_coherence import (condition1_check, condition2_check, phase_alphas,
                                 solve_alphas_d2, success_probability)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizationResult:
    alphas: np.ndarray
    p_s: float
    c_mean: float
    bound: float
    saturated: bool
    method: str  # "analytic-d2", "grid" or "condition-based"
    x: float | None = None

    def __post_init__(self):
        if self.p_s > self.bound + 1e-9:
            raise ArithmeticError("success probability exceeds the upper bound")
        if not coherence_lower_bound_check(self.p_s, self.c_mean):
            raise ArithmeticError("success probability below half the mean coherence")

    def as_record(self) -> dict:
        rec = {"method": self.method, "p_s": self.p_s, "c_mean": self.c_mean,
               "bound": self.bound, "saturated": self.saturated}
        if self.x is not None:
            rec["x"] = self.x
        for i, a in enumerate(self.alphas):
            rec[f"alpha{i + 1}_re"] = float(a.real)
            rec[f"alpha{i + 1}_im"] = float(a.imag)
        return rec


@dataclass(frozen=True)
class StationaryPoint:
    x: float
    kind: str  # "local-min", "local-max" or "flat"
    second_derivative: float
    residual: float


@dataclass(frozen=True)
class CoherenceProfile:
    x: np.ndarray
    p_s: np.ndarray
    c_mean: np.ndarray
    stationary: tuple
    regime: str  # "gamma-ge-quarter" or "gamma-lt-quarter"
    argmax_c_mean: float
    argmax_p_s: float
    optimum_slope: float  # C'(x) at x = sqrt(p2/p1)|gamma|
    optimum_slope_closed_form: float
    factor_roots: tuple = field(default=())  # equal priors only


def _check_priors(p1: float, p2: float) -> None:
    if not (p1 > 0 and p2 > 0 and abs(p1 + p2 - 1.0) <= 1e-12):
        raise InvalidInputError("priors must be positive and sum to 1")


def success_d2(x, p1: float, p2: float, gamma) -> np.ndarray:
    """``p_1 (1 - x) + p_2 (1 - |gamma|^2 / x)``."""
    x = np.asarray(x, dtype=float)
    g2 = abs(gamma) ** 2
    second = np.divide(g2, x, out=np.zeros_like(x), where=x > 0) if g2 > 0 else np.zeros_like(x)
    return p1 * (1.0 - x) + p2 * (1.0 - second)


def cmean_d2(x, p1: float, p2: float, gamma) -> np.ndarray:
    """``2 [p_1 x (1 - x) + p_2 y (1 - y)]`` with ``y = |gamma|^2 / x``."""
    x = np.asarray(x, dtype=float)
    g2 = abs(gamma) ** 2
    y = np.divide(g2, x, out=np.zeros_like(x), where=x > 0) if g2 > 0 else np.zeros_like(x)
    return 2.0 * (p1 * x * (1.0 - x) + p2 * y * (1.0 - y))


def cmean_d2_slope(x, p1: float, p2: float, gamma) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g2 = abs(gamma) ** 2
    return 2.0 * (p1 - 2.0 * p1 * x - p2 * g2 / x ** 2 + 2.0 * p2 * g2 ** 2 / x ** 3)


def cmean_d2_curvature(x, p1: float, p2: float, gamma) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g2 = abs(gamma) ** 2
    return 2.0 * (-2.0 * p1 + 2.0 * p2 * g2 / x ** 3 - 6.0 * p2 * g2 ** 2 / x ** 4)


def optimum_slope_closed_form(p1: float, p2: float, gamma) -> float:
    """Slope of the mean coherence at the success-optimal point."""
    return 4.0 * math.sqrt(p1 / p2) * abs(gamma) * (p1 - p2)


def upper_bound(priors, g) -> float:
    """``1 - 1/(n-1) sum_{i != j} sqrt(p_i p_j) |g_ij|`` over ordered pairs, clamped to [0, 1]."""
    p = np.asarray(priors, dtype=float)
    n = p.size
    if n < 2:
        raise InvalidInputError("the bound needs at least two states")
    absg = np.abs(np.asarray(g))
    w = np.sqrt(np.outer(p, p)) * absg
    np.fill_diagonal(w, 0.0)
    return float(min(max(1.0 - w.sum() / (n - 1), 0.0), 1.0))


def golden_section_max(f, lo: float, hi: float, xtol: float = 1e-9) -> float:
    """Maximiser of a unimodal ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _result_from_x(p1, p2, gamma, x, method) -> OptimizationResult:
    params = solve_alphas_d2(gamma, x)
    priors = np.array([p1, p2])
    p_s = success_probability(priors, params.alphas)
    bound = upper_bound(priors, np.array([[1, gamma], [np.conj(gamma), 1]]))
    return OptimizationResult(params.alphas, p_s, mean_coherence_ancilla(priors, params.alphas),
                              bound, abs(p_s - bound) <= 1e-9, method, float(x))


def optimal_d2_grid(p1: float, p2: float, gamma, points: int = 1001) -> OptimizationResult:
    """Grid scan of the two-state success probability, refined by golden section.

    The scan picks the best sample (smallest ``x`` on ties) and golden-section
    search then runs on the bracket formed by its neighbours.
    """
    _check_priors(p1, p2)
    if points < 100:
        raise InvalidInputError("grid search needs at least 100 points")
    lo = abs(gamma) ** 2
    xs = np.linspace(lo, 1.0, points)
    vals = success_d2(xs, p1, p2, gamma)
    k = int(np.argmax(vals))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, points - 1)]
    x_ref = golden_section_max(lambda t: float(success_d2(t, p1, p2, gamma)), a, b)
    best = x_ref if float(success_d2(x_ref, p1, p2, gamma)) > vals[k] + 1e-12 else xs[k]
    return _result_from_x(p1, p2, gamma, float(best), "grid")


def optimal_d2_analytic(p1: float, p2: float, gamma) -> OptimizationResult:
    """Two-state optimum ``x = sqrt(p2/p1)|gamma|``, or the grid optimum when that
    point leaves the feasible interval."""
    _check_priors(p1, p2)
    g = abs(gamma)
    if g >= 1.0:
        raise InvalidInputError("|gamma| must be < 1")
    x1 = math.sqrt(p2 / p1) * g
    x2 = math.sqrt(p1 / p2) * g
    if x1 > 1.0 or x2 > 1.0:
        return optimal_d2_grid(p1, p2, gamma)
    res = _result_from_x(p1, p2, gamma, x1, "analytic-d2")
    return res


def analytic_d2_values(p1: float, p2: float, gamma) -> tuple[float, float]:
    """Closed-form optimum ``(P_s, C_mean)`` for an interior two-state optimum."""
    g, r = abs(gamma), math.sqrt(p1 * p2)
    return 1.0 - 2.0 * r * g, 2.0 * g * (2.0 * r - g)


def _bisect_root(f, lo: float, hi: float) -> float:
    """Bisect a sign change down to adjacent floats, so steep slopes still
    leave a tiny residual."""
    flo = f(lo)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo if abs(flo) <= abs(f(hi)) else hi


def cmean_profile(p1: float, p2: float, gamma, points: int = 201,
                  scan_points: int = 10_001) -> CoherenceProfile:
    """Sampled success/coherence curves plus the stationary points of the coherence.

    Stationary points come from sign changes of the analytic slope on a fine
    scan, refined by bisection, and are classified by the analytic curvature.
    """
    _check_priors(p1, p2)
    g = abs(gamma)
    if not 0.0 < g < 1.0:
        raise InvalidInputError("profile needs 0 < |gamma| < 1")
    lo = g * g
    slope = lambda t: float(cmean_d2_slope(t, p1, p2, gamma))  # noqa: E731
    scan = np.linspace(lo, 1.0, scan_points)
    vals = cmean_d2_slope(scan, p1, p2, gamma)
    roots = []
    for k in range(scan_points - 1):
        if vals[k] == 0.0:
            roots.append(scan[k])
        elif vals[k] * vals[k + 1] < 0.0:
            roots.append(_bisect_root(slope, scan[k], scan[k + 1]))
    if vals[-1] == 0.0:
        roots.append(scan[-1])

    stationary = []
    for r in roots:
        curv = float(cmean_d2_curvature(r, p1, p2, gamma))
        kind = "local-max" if curv < 0 else "local-min" if curv > 0 else "flat"
        stationary.append(StationaryPoint(float(r), kind, curv, abs(slope(r))))

    candidates = [lo, 1.0] + [s.x for s in stationary]
    argmax_c = max(candidates, key=lambda t: (float(cmean_d2(t, p1, p2, gamma)), -t))
    argmax_p = optimal_d2_grid(p1, p2, gamma).x

    factor_roots: tuple = ()
    if p1 == p2:
        disc = 1.0 - 16.0 * g * g
        cand = [g]
        if disc >= 0:
            cand += [(1.0 - math.sqrt(disc)) / 4.0, (1.0 + math.sqrt(disc)) / 4.0]
        factor_roots = tuple(sorted({c for c in cand if lo <= c <= 1.0}))

    x_opt = math.sqrt(p2 / p1) * g
    xs = np.union1d(np.linspace(lo, 1.0, points), [g])
    return CoherenceProfile(
        x=xs,
        p_s=success_d2(xs, p1, p2, gamma),
        c_mean=cmean_d2(xs, p1, p2, gamma),
        stationary=tuple(stationary),
        regime="gamma-ge-quarter" if g >= 0.25 else "gamma-lt-quarter",
        argmax_c_mean=float(argmax_c),
        argmax_p_s=float(argmax_p),
        optimum_slope=float(cmean_d2_slope(x_opt, p1, p2, gamma)),
        optimum_slope_closed_form=optimum_slope_closed_form(p1, p2, gamma),
        factor_roots=factor_roots,
    )


@dataclass(frozen=True)
class Saturation:
    feasible: bool
    alphas: np.ndarray | None
    c_mean: float | None  # closed form in terms of B
    b_value: float | None
    p_s: float | None
    bound: float
    c_mean_direct: float | None = None  # prior-weighted 2a(1-a) at the same amplitudes
    condition1: bool | None = None
    condition2: bool | None = None


def bound_saturation(priors, g, tol: float = DEFAULT_TOL.condition) -> Saturation:
    """Strategy with ``p_i |a_i|^2`` constant, when the overlaps allow one.

    Moduli follow from ``|a_i|^2 = sqrt(p_j/p_i) |g_ij|`` (the same for every
    ``j != i``); phases are then fixed by ``conj(a_i) a_j = g_ij``.
    """
    p = np.asarray(priors, dtype=float)
    g = np.asarray(g, dtype=complex)
    n = p.size
    bound = upper_bound(p, g)
    try:
        c1 = condition1_check(g, tol)[0]
    except InfeasibleError:
        c1 = None
    c2 = condition2_check(p, g, tol)
    infeasible = Saturation(False, None, None, None, None, bound, None, c1, c2)

    a2 = np.empty(n)
    for i in range(n):
        cands = [math.sqrt(p[j] / p[i]) * abs(g[i, j]) for j in range(n) if j != i]
        if max(cands) - min(cands) > tol:
            return infeasible
        a2[i] = float(np.mean(cands))
    if np.any(a2 > 1.0 + tol):
        return infeasible
    alphas = phase_alphas(g, np.minimum(a2, 1.0), tol)
    if alphas is None:
        return infeasible

    b = n * p[0] * a2[0]
    c_closed = 2.0 * b * (1.0 - b / n ** 2 * np.sum(1.0 / p))
    return Saturation(True, alphas, float(c_closed), float(b), success_probability(p, alphas),
                      bound, mean_coherence_ancilla(p, alphas), c1, c2)


@dataclass(frozen=True)
class Certificate:
    optimal: bool
    targets: tuple
    measured: tuple
    deviations: tuple
    tol: float

    def as_record(self) -> dict:
        rec = {"optimal": self.optimal, "tol": self.tol}
        for i, (t, m, dv) in enumerate(zip(self.targets, self.measured, self.deviations), 1):
            rec[f"target{i}"] = t
            rec[f"measured{i}"] = m
            rec[f"deviation{i}"] = dv
        return rec


def certificate_targets(p1: float, p2: float, gamma) -> tuple[float, float]:
    g = abs(gamma)
    a1 = math.sqrt(p2 / p1) * g
    a2 = math.sqrt(p1 / p2) * g
    return 2.0 * a1 * (1.0 - a1), 2.0 * a2 * (1.0 - a2)


def optimality_certificate(p1: float, p2: float, gamma, measured, tol: float = 1e-6) -> Certificate:
    """Compare per-state ancilla coherences against their values at the optimum."""
    _check_priors(p1, p2)
    measured = tuple(float(m) for m in measured)
    if len(measured) != 2:
        raise InvalidInputError("need exactly two measured coherences")
    for m in measured:
        if not 0.0 <= m <= 0.5:
            raise InvalidInputError(f"measured coherence {m} outside [0, 0.5]")
    targets = certificate_targets(p1, p2, gamma)
    dev = tuple(m - t for m, t in zip(measured, targets))
    return Certificate(all(abs(v) <= tol for v in dev), targets, measured, dev, tol)
