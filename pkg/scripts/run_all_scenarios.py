"""Run every built-in scenario through the CLI and summarize exit codes."""

import argparse
import sys
import time

from crlab.cli import builtin_names, main


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="crlab-out")
    ap.add_argument("--skip", nargs="*", default=["torus-verify"], help="built-ins to skip (torus-verify takes minutes)")
    return ap.parse_args()


if __name__ == "__main__":
    args = parse_args()
    worst = 0
    for name in builtin_names():
        if name in args.skip:
            continue
        t0 = time.perf_counter()
        code = main(["run", "--scenario", name, "--out", args.out])
        print(f"== {name}: exit {code} ({time.perf_counter() - t0:.1f}s)")
        worst = max(worst, code)
    sys.exit(worst)
