"""Smallest doubling P certifying rank four of the bracket matrix on balls of several radii."""

import argparse
import json

from crlab.torus_example import build_reeb_frame, enable_compile_cache, find_min_P


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radii", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--grid", type=int, default=32)
    ap.add_argument("--budget", type=int, default=30)
    ap.add_argument("--json", default="torus_min_P.json")
    return ap.parse_args()


if __name__ == "__main__":
    args = parse_args()
    enable_compile_cache()
    frame = build_reeb_frame()
    out = []
    for R in args.radii:
        rep = find_min_P(frame, R, n=args.grid, budget=args.budget)
        d = rep.as_dict()
        out.append(d)
        print(f"R={R}: P*={d['P_star']}  ratio in [{d['ratio_min']:.3f}, {d['ratio_max']:.3f}]  samples={d['samples']}")
    with open(args.json, "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
    print(f"wrote {args.json}")
