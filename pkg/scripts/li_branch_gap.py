"""Tabulate the qubit-ancilla one-vs-rest optimum around its branch boundary.

For each dimension the table compares the coherence obtained from the optimal
amplitude lists on both sides of the boundary with the two published branch
polynomials. The second polynomial disagrees with direct evaluation.
"""

import argparse

from uqsd.protocol_li import (branch_boundary, coherence_one_vs_rest, one_vs_rest_success,
                              printed_coherence_branch_a, printed_coherence_branch_b)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=list(range(2, 9)))
    args = ap.parse_args()
    header = ("d", "|a|_edge", "P_s(a)", "P_s(b)", "C direct(a)", "C direct(b)",
              "C printed(a)", "C printed(b)", "printed-direct (b)")
    print(",".join(header))
    for d in args.dims:
        a = branch_boundary(d)
        cb = coherence_one_vs_rest(d, a, "b")
        vals = (a, one_vs_rest_success(d, a, "a"), one_vs_rest_success(d, a, "b"),
                coherence_one_vs_rest(d, a, "a"), cb, printed_coherence_branch_a(d, a),
                printed_coherence_branch_b(d, a), printed_coherence_branch_b(d, a) - cb)
        print(",".join([str(d)] + [f"{v:.12g}" for v in vals]))


if __name__ == "__main__":
    main()
