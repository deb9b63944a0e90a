"""Tabulate Ritz eigenvalues against basis size for several orders.

For each derivative order the nested schedule is assembled once and
sliced, so each row refines the one above it; the classical order 1.0
column converges to j**2 on [0, pi].
"""

import argparse
import math

from fracvar import Grid, SLProblem, converge


def one(t):
    return 1.0


def zero(t):
    return 0.0


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="eigenvalue convergence table for the composed-derivative "
        "eigenproblem with unit coefficients"
    )
    parser.add_argument(
        "--alpha",
        type=float,
        action="append",
        default=None,
        help="derivative order in (0.5, 1) or exactly 1.0 (repeatable; "
        "default 0.75 0.9 1.0)",
    )
    parser.add_argument("--n", type=int, default=8192, help="grid cells")
    parser.add_argument("--r", type=int, default=3, help="eigenvalues per row")
    parser.add_argument(
        "--schedule",
        type=int,
        nargs="+",
        default=[4, 8, 16, 32],
        help="strictly increasing basis sizes",
    )
    args = parser.parse_args(argv)
    alphas = args.alpha or [0.75, 0.9, 1.0]

    grid = Grid(0.0, math.pi, args.n)
    for alpha in alphas:
        problem = SLProblem(alpha, one, zero, one)
        report = converge(problem, tuple(args.schedule), args.r, grid)
        print(f"alpha = {alpha}")
        header = "  {:>4}".format("m") + "".join(
            f" {'lambda_' + str(j + 1):>14}" for j in range(args.r)
        )
        print(header)
        for i, m in enumerate(report.m_schedule):
            row = f"  {m:>4}" + "".join(
                f" {report.table[i][j]:>14.8f}" for j in range(args.r)
            )
            print(row)
        flags = ", ".join(
            f"lambda_{j + 1}={'yes' if flag else 'no'}"
            for j, flag in enumerate(report.converged)
        )
        print(f"  max upward step {report.max_upward_step:.3g}; converged: {flags}")
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
