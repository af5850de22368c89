"""Synthesize random ccr-curves and check that their tangent indicatrices lie on flat tori."""

import argparse

import numpy as np

from ccrcurves import ccr
from ccrcurves.ccr import CcrSpec, ConstantK1, RationalSqrtK1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--draws", type=int, default=20)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print("  n  k1 profile       verdict  max radius spread  |sum r^2 - 1|")
    bad = 0
    for i in range(args.draws):
        n = int(rng.choice([2, 3, 4, 5]))
        ratios = rng.uniform(0.2, 5.0, n - 2)
        if i % 2:
            k1, dom, label = RationalSqrtK1(rng.uniform(0.5, 1.5), 0.5), (-1.6, 1.6), "a/sqrt(1-s^2/4)"
        else:
            k1, dom, label = ConstantK1(rng.uniform(0.5, 1.5)), (0.0, 6.0), "constant"
        r = ccr.verify_torus(ccr.synthesize(CcrSpec(n, ratios, k1, dom), args.steps))
        spread = float(np.max(r.radius_spread, initial=0.0))
        bad += not r.verdict
        print(f"{n:3d}  {label:17s}{str(r.verdict):9s}{spread:17.2e}{abs(r.sum_r2 - 1):15.2e}")
    print(f"{args.draws - bad}/{args.draws} on a flat torus")


if __name__ == "__main__":
    main()
