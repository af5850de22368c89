"""Synthesize the spherical ccr-curve with k1 = 2/sqrt(1-4s^2) and report its geometry."""

import argparse
import math

import numpy as np

from ccrcurves import ccr, fileio, frenet, intrinsic, sphere


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--half-width", type=float, default=0.45, help="domain is [-w, w], w < 1/2")
    ap.add_argument("--out", help="write the curve table here")
    args = ap.parse_args()

    w = args.half_width
    c = sphere.example_522(args.steps, (-w, w))
    data = frenet.curvature_profile(c)
    rep = frenet.ratio_analysis(data)
    torus = ccr.verify_torus(c)
    fit = sphere.fit_sphere(c)
    centers = sphere.recover_center(c, data, R=1.0)
    intr = intrinsic.intrinsic_apparatus(c, data)
    i = int(np.argmin(np.abs(c.s)))

    print(f"samples {len(c)}, s in [{c.s[0]:g}, {c.s[-1]:g}]")
    print(f"max | |alpha| - 1 |      {np.max(np.abs(np.linalg.norm(c.points, axis=1) - 1)):.2e}")
    print(f"ratios                   {rep.ratios} (exact 0.5, {math.sqrt(3) / 2:.10f})")
    print(f"torus verdict            {torus.verdict}, frequencies {torus.frequencies}")
    print(f"sphere fit               center {np.round(fit.center, 12)}, radius {fit.radius:.12f}")
    print(f"osculating centers       spread {centers.spread:.2e}")
    print(f"at s = 0: kappa {intr.kappa[i]:.10f}, closed-form tau {intr.tau[i]:.10f}, "
          f"covariant tau {abs(intr.tau_covariant[i]):.10f}")
    if args.out:
        fileio.write_curve(args.out, c)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
