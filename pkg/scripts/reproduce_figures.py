"""Write the curve tables behind the coherence/success plots as CSV files.

Outputs ``fig2.csv`` (1 - x and x(1 - x) on [0, 1]) and one ``fig3_gamma<g>.csv``
per overlap (success and mean coherence against x = |a_1|^2, equal priors),
plus ``fig3_stationary.csv`` listing the stationary points of each coherence curve.
"""

import argparse
import csv
from pathlib import Path

from uqsd.cli import main as cli_main
from uqsd.optimize import cmean_profile


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results/figures")
    ap.add_argument("--gammas", type=float, nargs="+", default=[0.2, 0.25, 0.4, 0.6, 0.8])
    ap.add_argument("--points", type=int, default=201)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    cli_main(["figure", "--which", "2", "--points", str(args.points), "--out", str(out / "fig2.csv")])
    rows = []
    for g in args.gammas:
        cli_main(["figure", "--which", "3", "--gamma", str(g), "--points", str(args.points),
                  "--out", str(out / f"fig3_gamma{g:g}.csv")])
        prof = cmean_profile(0.5, 0.5, g)
        for s in prof.stationary:
            rows.append({"gamma": g, "regime": prof.regime, "x": f"{s.x:.12g}", "kind": s.kind,
                         "curvature": f"{s.second_derivative:.12g}"})
        print(f"|gamma|={g:g}: {prof.regime}, coherence argmax {prof.argmax_c_mean:.6f}, "
              f"success argmax {prof.argmax_p_s:.6f}")

    with open(out / "fig3_stationary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["gamma", "regime", "x", "kind", "curvature"])
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote tables to {out}")


if __name__ == "__main__":
    main()
