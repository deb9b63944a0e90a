"""Write plottable profiles of the closed-form and computed extremals.

Produces two-column text files (t, value) under --output-dir:

  ml_extremal.dat        trajectory solving y' + D^alpha y = 1, y(0) = 0
  ml_defect.dat          pointwise defect of that equation
  tracking_exact.dat     closed-form solution of the tracking functional
  tracking_recovered.dat direct-method minimizer of the same functional
  oscillator.dat         damped-cosine extremal of the weighted action
  oscillator_residual.dat  its pointwise optimality residual
"""

import argparse
import os

import numpy as np

from fracvar import (
    ClassicalOp,
    Grid,
    MinimizeOptions,
    RitzBasis,
    SLProblem,
    classical,
    direct_minimize,
    el_residual,
)
from fracvar.experiments import (
    damped_oscillator_problem,
    mittag_leffler_extremal,
    tracking_problem,
)


def write_profile(path, t, values):
    with open(path, "w") as handle:
        for x, y in zip(t, values):
            handle.write(f"{x:.12e} {y:.12e}\n")


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="write extremal trajectories and their optimality defects"
    )
    parser.add_argument("--output-dir", default="profiles")
    parser.add_argument("--n", type=int, default=2048, help="grid cells")
    parser.add_argument(
        "--alpha", type=float, default=0.4, help="order of the Mittag-Leffler extremal"
    )
    args = parser.parse_args(argv)
    os.makedirs(args.output_dir, exist_ok=True)
    grid = Grid(0.0, 1.0, args.n)
    t = grid.nodes

    y = mittag_leffler_extremal(args.alpha, grid)
    defect = (
        y.derivative().values
        + classical(ClassicalOp.CAPUTO_LEFT, args.alpha, y).values
        - 1.0
    )
    write_profile(os.path.join(args.output_dir, "ml_extremal.dat"), t, y.values)
    write_profile(os.path.join(args.output_dir, "ml_defect.dat"), t, defect)

    problem, exact = tracking_problem(grid)
    basis = RitzBasis.build(SLProblem(1.0, lambda s: 1.0, lambda s: 0.0, lambda s: 1.0, 0.0, 1.0), 8, grid)
    result = direct_minimize(problem, basis, MinimizeOptions(beta0=np.full(8, 0.4)))
    write_profile(os.path.join(args.output_dir, "tracking_exact.dat"), t, exact.values)
    write_profile(
        os.path.join(args.output_dir, "tracking_recovered.dat"), t, result.y.values
    )

    oscillator, trajectory = damped_oscillator_problem(grid)
    residual = el_residual(oscillator, trajectory)
    write_profile(
        os.path.join(args.output_dir, "oscillator.dat"), t, trajectory.values
    )
    write_profile(
        os.path.join(args.output_dir, "oscillator_residual.dat"), t, residual.values
    )

    names = sorted(os.listdir(args.output_dir))
    print(f"wrote {len(names)} profiles to {args.output_dir}: " + ", ".join(names))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
