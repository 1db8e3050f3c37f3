"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 infeasible constraints.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import optimize as opt
from .coherence import (ProjectiveBasis, coherence_lower_bound_check, coherence_report,
                        mean_coherence_ancilla, mean_coherence_li)
from .errors import InfeasibleError, InvalidInputError
from .protocol_coherence import (ProtocolParams, build_unitary_d2, build_unitary_general,
                                 post_states, solve_alphas_d2, success_probability)
from .protocol_li import build_unitary_li
from .simulate import run_trials
from .states import Ensemble, gram, load_ensemble, two_state_ensemble

EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


@dataclass
class RunConfig:
    command: str
    ensemble: str | None = None
    gamma: complex | None = None
    p1: float = 0.5
    x: float | None = None
    which: int | None = None
    points: int = 201
    trials: int = 100_000
    seed: int = 0
    out: str | None = None
    fmt: str = "json"
    tol: float = 1e-6
    z: float = 4.0
    protocol: str = "ancilla"
    measured: list = field(default_factory=list)

    def validate(self) -> None:
        needs_input = self.command in ("optimize", "simulate", "coherence")
        if needs_input and (self.ensemble is None) == (self.gamma is None):
            raise InvalidInputError("give exactly one of --ensemble or --gamma")
        if self.command == "certify" and self.gamma is None:
            raise InvalidInputError("certify needs --gamma")
        if self.gamma is not None and abs(self.gamma) >= 1.0:
            raise InvalidInputError("|gamma| must be < 1")
        if not 0.0 < self.p1 < 1.0:
            raise InvalidInputError("--p1 must lie in (0, 1)")
        if self.trials < 1:
            raise InvalidInputError("--trials must be >= 1")
        if self.points < 2:
            raise InvalidInputError("--points must be >= 2")
        if self.fmt not in ("csv", "json"):
            raise InvalidInputError("--format must be csv or json")


def fmt_number(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.12g}")
    return v


def render(records: list[dict], fmt: str) -> str:
    records = [{k: fmt_number(v) for k, v in r.items()} for r in records]
    if fmt == "json":
        body = records[0] if len(records) == 1 else records
        return json.dumps(body, indent=2) + "\n"
    buf = io.StringIO()
    keys = list(records[0])
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys)
    for r in records:
        writer.writerow([_csv_cell(r.get(k)) for k in keys])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return "" if v is None else str(v)


def _ensemble(cfg: RunConfig) -> Ensemble:
    if cfg.ensemble is not None:
        return load_ensemble(cfg.ensemble)
    return two_state_ensemble(cfg.gamma, cfg.p1)


def _d2_params(e: Ensemble, x: float | None) -> ProtocolParams:
    g = gram(e)[0, 1]
    if x is None:
        x = opt.optimal_d2_analytic(e.priors[0], e.priors[1], g).x
    return solve_alphas_d2(g, x)


def _protocol(cfg: RunConfig, e: Ensemble):
    """Resolve the protocol named by the config; returns ``(protocol, alphas)``."""
    e.require_independent()
    if e.n == 2:
        params = _d2_params(e, cfg.x)
    else:
        if cfg.x is not None:
            raise InvalidInputError("--x applies to two-state ensembles only")
        sat = opt.bound_saturation(e.priors, gram(e))
        if not sat.feasible:
            raise InfeasibleError("overlaps admit no common-reference strategy for this ensemble")
        params = ProtocolParams(sat.alphas)
    if cfg.protocol == "li":
        return build_unitary_li(e, params.alphas), params.alphas
    if e.n == 2 and e.dim == 2:
        return build_unitary_d2(e, params)[0], params.alphas
    return build_unitary_general(e, params), params.alphas


def cmd_optimize(cfg: RunConfig) -> list[dict]:
    if cfg.gamma is not None:
        return [opt.optimal_d2_analytic(cfg.p1, 1.0 - cfg.p1, cfg.gamma).as_record()]
    e = load_ensemble(cfg.ensemble)
    e.require_independent()
    if e.n < 2:
        raise InvalidInputError("need at least two states")
    g = gram(e)
    if e.n == 2:
        return [opt.optimal_d2_analytic(e.priors[0], e.priors[1], g[0, 1]).as_record()]
    sat = opt.bound_saturation(e.priors, g)
    if not sat.feasible:
        raise InfeasibleError("bound is not attainable with a common reference state "
                              f"(condition1={sat.condition1}, condition2={sat.condition2})")
    res = opt.OptimizationResult(sat.alphas, sat.p_s, sat.c_mean_direct, sat.bound, True,
                                 "condition-based")
    rec = res.as_record()
    rec["b_value"] = sat.b_value
    return [rec]


def cmd_figure(cfg: RunConfig) -> list[dict]:
    if cfg.which == 2:
        xs = np.linspace(0.0, 1.0, cfg.points)
        return [{"x": x, "success": 1.0 - x, "coherence": x * (1.0 - x)} for x in xs]
    if cfg.which == 3:
        if cfg.gamma is None or abs(cfg.gamma) == 0:
            raise InvalidInputError("figure 3 needs a non-zero --gamma")
        g = abs(cfg.gamma)
        xs = np.union1d(np.linspace(g * g, 1.0, cfg.points), [g])
        ps = opt.success_d2(xs, 0.5, 0.5, g)
        cm = opt.cmean_d2(xs, 0.5, 0.5, g)
        return [{"x": x, "p_s": p, "c_mean": c} for x, p, c in zip(xs, ps, cm)]
    raise InvalidInputError("--which must be 2 or 3")


def cmd_simulate(cfg: RunConfig) -> list[dict]:
    e = _ensemble(cfg)
    protocol, alphas = _protocol(cfg, e)
    summary = run_trials(protocol, e, cfg.trials, cfg.seed)
    rec = summary.as_record(cfg.z)
    rec["p_s_exact"] = success_probability(e.priors, alphas)
    return [rec]


def cmd_certify(cfg: RunConfig) -> list[dict]:
    if len(cfg.measured) != 2:
        raise InvalidInputError("--measured needs two values")
    cert = opt.optimality_certificate(cfg.p1, 1.0 - cfg.p1, cfg.gamma, cfg.measured, cfg.tol)
    return [cert.as_record()]


def cmd_coherence(cfg: RunConfig) -> list[dict]:
    e = _ensemble(cfg)
    protocol, alphas = _protocol(cfg, e)
    if cfg.protocol == "li":
        post = post_states(protocol.unitary, e)
        report = coherence_report(e.priors, post.rho, protocol.coherence_basis)
        closed = mean_coherence_li(e.priors, alphas, e.dim)
    else:
        post = post_states(protocol, e)
        report = coherence_report(e.priors, post.aux, ProjectiveBasis.computational(protocol.aux_dim))
        closed = mean_coherence_ancilla(e.priors, alphas)
    rec = report.as_record()
    rec["c_mean_closed_form"] = closed
    p_s = success_probability(e.priors, alphas)
    rec["p_s"] = p_s
    if cfg.protocol != "li":
        rec["lower_bound_holds"] = coherence_lower_bound_check(p_s, report.mean)
    return [rec]


COMMANDS = {"optimize": cmd_optimize, "figure": cmd_figure, "simulate": cmd_simulate,
            "certify": cmd_certify, "coherence": cmd_coherence}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uqsd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--ensemble", help="ensemble JSON file")
        p.add_argument("--gamma", type=complex, help="overlap <phi_1|phi_2>, e.g. 0.5 or 0.3+0.2j")
        p.add_argument("--p1", type=float, default=0.5)
        p.add_argument("--x", type=float, help="|alpha_1|^2 for two-state protocols")
        p.add_argument("--which", type=int, help="figure number (2 or 3)")
        p.add_argument("--points", type=int, default=201)
        p.add_argument("--trials", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.add_argument("--format", dest="fmt", default=None, choices=["csv", "json"])
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--z", type=float, default=4.0)
        p.add_argument("--protocol", choices=["ancilla", "li"], default="ancilla")
        p.add_argument("--measured", type=float, nargs="+", default=[])
    return parser


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    if args["fmt"] is None:
        args["fmt"] = "csv" if args["command"] == "figure" else "json"
    cfg = RunConfig(**args)
    try:
        cfg.validate()
        text = render(COMMANDS[cfg.command](cfg), cfg.fmt)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InvalidInputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
