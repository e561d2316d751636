"""Deviation of Bishop solutions from their flat seeds as the disc size shrinks."""

import argparse
import csv

import numpy as np

from crlab.bishop_solver import BishopProblem, SolverConfig, contraction_report, solve_bishop
from crlab.circle_ops import CircleFn, holder_norm
from crlab.cr_geometry import MaximallyRealGraph
from crlab.disc_families import PsiConfig, build_psi
from crlab.scenarios import _quadratic_h


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=4096)
    ap.add_argument("--cmin", type=float, default=0.01)
    ap.add_argument("--cmax", type=float, default=0.3)
    ap.add_argument("--points", type=int, default=12)
    ap.add_argument("--scale", type=float, default=1.0, help="multiplier applied to the quadratic target")
    ap.add_argument("--csv", default="bishop_scaling.csv")
    return ap.parse_args()


if __name__ == "__main__":
    args = parse_args()
    psi = build_psi(PsiConfig(N=args.N))
    h, dh = _quadratic_h()
    target = MaximallyRealGraph(2, lambda X: args.scale * h(X), dh=lambda X: args.scale * dh(X))
    v = np.array([1.0, 0.5])
    rows = []
    for c in np.geomspace(args.cmin, args.cmax, args.points):
        seed = CircleFn(psi.grid, c * v[:, None] * psi.values.real[None, :])
        p = BishopProblem(target, seed, 1.0, SolverConfig(c=float(c)))
        rep = solve_bishop(p)
        dev = holder_norm(rep.X - seed, 1, 0.5).sup_part
        K = contraction_report(p)
        rows.append([float(c), dev, rep.contraction_ratio, rep.iterations, K["K6"]])
        print(f"c={c:.4f}  |X-X0|_C1={dev:.3e}  ratio={rep.contraction_ratio:.3f}  iters={rep.iterations}")
    arr = np.array(rows)
    slope = np.polyfit(np.log(arr[:, 0]), np.log(arr[:, 1]), 1)[0]
    print(f"log-log slope {slope:.3f}")
    with open(args.csv, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["c", "c1_deviation", "contraction_ratio", "iterations", "K6"])
        w.writerows(rows)
    print(f"wrote {args.csv}")
