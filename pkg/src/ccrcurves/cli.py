"""Command-line interface: ``ccr eigen|synthesize|analyze|sphere|plotdata``.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import ccr, fileio, frenet, sphere
from .numkit import NumericalError, SkewTridiag, ValidationError, invariant_planes, tridiag_frequencies

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors, so they exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    if not text.strip():
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _coords(text: str) -> tuple[int, int]:
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two indices like 1,2, got {text!r}") from None
    return i, j


def _fmt(v) -> str:
    return np.array2string(np.asarray(v, dtype=float), precision=10, separator=", ")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------


def cmd_eigen(args) -> int:
    ratios = args.ratios
    n = len(ratios) + 2
    if args.dim is not None and args.dim != n:
        raise ValidationError(f"--dim {args.dim} needs {args.dim - 2} ratios, got {len(ratios)}")
    for c in ratios:
        if c == 0 or not np.isfinite(c):
            raise ValidationError("ratios must be finite and nonzero")
    m = SkewTridiag((1.0, *ratios))
    spec = tridiag_frequencies(m)
    planes, axis = invariant_planes(m, spec)
    print(f"dimension: {n}")
    print("frequencies: " + ", ".join(f"{b:.{args.digits}f}" for b in spec.frequencies))
    if spec.has_zero:
        print("zero eigenvalue: yes (odd dimension; kernel axis " + _fmt(axis) + ")")
    for i, p in enumerate(planes, start=1):
        print(f"plane {i}: u = {_fmt(p.u)}, v = {_fmt(p.v)}")
    print(f"twisted: {str(ccr.twisted(spec)).lower()}")
    return EXIT_OK


def cmd_synthesize(args) -> int:
    spec, steps = fileio.read_spec(args.spec)
    if args.steps is not None:
        steps = args.steps
    samples = ccr.synthesize(spec, steps)
    if args.out:
        fileio.write_curve(args.out, samples)
    else:
        sys.stdout.write(fileio.format_curve(samples))
    length = float(samples.s[-1] - samples.s[0])
    print(f"dimension {samples.n}, {len(samples)} samples, arc length {length:.12g}",
          file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_analyze(args) -> int:
    samples = fileio.read_curve(args.curve)
    data = frenet.curvature_profile(samples)
    tol = args.tolerance
    report = frenet.ratio_analysis(data, tol=tol)
    torus = ccr.verify_torus(samples)
    k = data.curvatures[~data.boundary]
    lines = [f"samples: {len(samples)}, dimension {samples.n}"]
    for i in range(k.shape[1]):
        lines.append(f"k{i + 1}: [{k[:, i].min():.10g}, {k[:, i].max():.10g}]")
    lines.append("ratios: " + _fmt(report.ratios))
    lines.append("ratio spread: " + np.array2string(report.spread, precision=3))
    lines.append(f"ccr: {str(report.is_ccr).lower()}")
    lines.append("frequencies: " + _fmt(torus.frequencies))
    lines.append("plane radii: " + _fmt(torus.radius_mean))
    lines.append("radius spread: " + np.array2string(np.asarray(torus.radius_spread), precision=3))
    if torus.axis_spread is not None:
        lines.append(f"axis spread: {torus.axis_spread:.3g}")
    lines.append(f"twisted: {str(torus.twisted).lower()}")
    lines.append(f"torus: {str(torus.verdict).lower()}")
    print("\n".join(lines))
    if args.json:
        doc = {
            "ratios": report.ratios.tolist(),
            "ratio_spread": report.spread.tolist(),
            "ccr": report.is_ccr,
            "frequencies": np.asarray(torus.frequencies).tolist(),
            "radius_mean": np.asarray(torus.radius_mean).tolist(),
            "radius_spread": np.asarray(torus.radius_spread).tolist(),
            "axis_spread": torus.axis_spread,
            "twisted": torus.twisted,
            "torus": torus.verdict,
        }
        with open(args.json, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def cmd_sphere(args) -> int:
    samples = fileio.read_curve(args.curve)
    fit = sphere.fit_sphere(samples)
    print("center: " + _fmt(fit.center))
    print(f"radius: {fit.radius:.12g}")
    print(f"rms: {fit.rms:.3g}")
    if samples.n not in (3, 4):
        print(f"criterion: not available in dimension {samples.n}")
        return EXIT_OK
    data = frenet.curvature_profile(samples)
    inner = np.flatnonzero(~data.boundary)
    if np.max(np.abs(data.speed[inner] - 1.0)) > 1e-6:
        print("criterion: skipped (samples are not parametrized by arc length)")
        return EXIT_OK
    sl = slice(inner[0], inner[-1] + 1)
    s = data.s[sl]
    k = data.curvatures[sl]
    if samples.n == 3:
        res = sphere.criterion_r3(k[:, 0], k[:, 1], args.radius, s)
    else:
        res = sphere.criterion_r4(k[:, 0], k[:, 1], k[:, 2], args.radius, s)
    _, edge = sphere.grid_derivatives(s, k[:, 0], 2 if samples.n == 4 else 1)
    res = res[~edge]
    worst = float(np.max(res))
    ok = worst < args.tolerance
    print(f"criterion (R = {args.radius:g}): max residual {worst:.3g}, median {np.median(res):.3g}")
    print(f"criterion: {'pass' if ok else 'fail'}")
    return EXIT_OK


def cmd_plotdata(args) -> int:
    samples = fileio.read_curve(args.curve)
    i, j = args.coords
    n = samples.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValidationError(f"coordinates must lie in 1..{n}, got {i},{j}")
    P = samples.points
    rows = [f"x{i},x{j}"] + [f"{a:.17g},{b:.17g}" for a, b in zip(P[:, i - 1], P[:, j - 1])]
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ccr", description="Curves with constant curvature ratios.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eigen", help="frequencies and invariant planes of the Frenet matrix")
    p.add_argument("--ratios", type=_float_list, default=[], help="c2,...,c_{n-1}")
    p.add_argument("--dim", type=int, help="dimension n (must equal number of ratios + 2)")
    p.add_argument("--digits", type=int, default=8, help="decimals printed for frequencies")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("synthesize", help="integrate a spec file into a curve table")
    p.add_argument("spec", help="JSON spec file")
    p.add_argument("--out", help="output curve file (default: stdout)")
    p.add_argument("--steps", type=int, help="override the spec's step count")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("analyze", help="curvatures, ratios and torus verdict of a curve table")
    p.add_argument("curve")
    p.add_argument("--tolerance", type=float, default=frenet.CONSTANCY_TOL,
                   help="relative spread below which a ratio counts as constant")
    p.add_argument("--json", help="also write the report as JSON to this path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sphere", help="sphere fit and spherical criterion of a curve table")
    p.add_argument("curve")
    p.add_argument("--radius", type=float, default=1.0, help="sphere radius R in the criterion")
    p.add_argument("--tolerance", type=float, default=1e-6, help="criterion pass threshold")
    p.set_defaults(func=cmd_sphere)

    p = sub.add_parser("plotdata", help="two-coordinate projection table")
    p.add_argument("curve")
    p.add_argument("--coords", type=_coords, default=(1, 2), help="coordinate pair, 1-based")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
