"""Certified envelope points swept by vertical discs moving into the Hartogs shell."""

import argparse
import csv

import numpy as np

from crlab.extension_lab import extension_coverage, shrinking_hartogs_isotopy


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--disc-radius", type=float, default=0.9)
    ap.add_argument("--steps", type=int, default=21)
    ap.add_argument("--rings", type=int, default=8)
    ap.add_argument("--angles", type=int, default=32)
    ap.add_argument("--csv", default="hartogs_coverage.csv")
    return ap.parse_args()


if __name__ == "__main__":
    args = parse_args()
    iso = shrinking_hartogs_isotopy(eps=args.eps, disc_radius=args.disc_radius, steps=args.steps)
    cov = extension_coverage(iso, rings=args.rings, angles=args.angles)
    for r in cov.reports:
        print(f"tau={r.tau:.3f}  rho={r.rho:.4f}  c={r.c:.3f}  C={r.C:.3f}  sigma={r.sigma:.4f}")
    # probe points along the z1 axis from the center to the inner shell boundary
    probes = np.linspace(0.0, 1.0 - args.eps, 9)
    hit = cov.contains(np.stack([probes, np.zeros_like(probes)]).astype(complex))
    for x, h in zip(probes, hit):
        print(f"(z1, z2) = ({x:.3f}, 0): {'covered' if h else 'not covered'}")
    with open(args.csv, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "re_zeta", "im_zeta", "radius", "re_z1", "im_z1", "re_z2", "im_z2"])
        w.writerows(cov.rows())
    print(f"wrote {args.csv}")
