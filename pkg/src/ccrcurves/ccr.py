"""Curves with constant curvature ratios.

With k_{i+1} = c_{i+1} k_i and t = g(s) = int_0^s k_1, the Frenet system
becomes E'(t) = F E(t) with F the constant skew-tridiagonal matrix with
off-diagonals (1, c_2, ..., c_{n-1}). Its solution rotates each invariant
plane of F at a fixed rate, so the tangent indicatrix e_1(t) runs along a
geodesic of a flat torus (plus a fixed axis component for odd n). This
module builds that model, integrates curves from it, and runs the inverse
check on sampled input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import frenet
from .frenet import CurveSamples
from .numkit import (
    NumericalError,
    PlaneBasis,
    SkewTridiag,
    Spectrum,
    ValidationError,
    integrate,
    invariant_planes,
    rk4_solve,
    tridiag_frequencies,
)

TWIST_RTOL = 1e-9
DOMAIN_MARGIN = 1e-3
VERIFY_TOL = 1e-6


# ---------------------------------------------------------------------------
# first-curvature profiles


@dataclass(frozen=True)
class ConstantK1:
    a: float
    kind = "constant"

    def __call__(self, s):
        return np.full(np.shape(s), self.a) if np.ndim(s) else float(self.a)

    def validity(self):
        return -math.inf, math.inf, False

    def to_dict(self):
        return {"kind": self.kind, "a": self.a}


@dataclass(frozen=True)
class RationalSqrtK1:
    """k_1(s) = a / sqrt(1 - b^2 s^2), defined for |s| < 1/b."""

    a: float
    b: float
    kind = "rational_sqrt"

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = self.a / np.sqrt(1.0 - (self.b * s) ** 2)
        return float(out) if out.ndim == 0 else out

    def validity(self):
        if self.b == 0:
            return -math.inf, math.inf, False
        r = 1.0 / abs(self.b)
        return -r, r, True

    def to_dict(self):
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class TableK1:
    """Tabulated profile, cubic-spline interpolated."""

    s: tuple[float, ...]
    k: tuple[float, ...]
    kind = "table"

    def __post_init__(self):
        from scipy.interpolate import CubicSpline

        s = np.asarray(self.s, dtype=float)
        k = np.asarray(self.k, dtype=float)
        if s.ndim != 1 or s.shape != k.shape or len(s) < 4:
            raise ValidationError("table profile needs matching s and k with >= 4 entries")
        if np.any(np.diff(s) <= 0):
            raise ValidationError("table abscissae must be strictly increasing")
        object.__setattr__(self, "_spline", CubicSpline(s, k))

    def __call__(self, s):
        out = self._spline(s)
        return float(out) if np.ndim(out) == 0 else out

    def validity(self):
        return self.s[0], self.s[-1], False

    def to_dict(self):
        return {"kind": self.kind, "s": list(self.s), "k": list(self.k)}


@dataclass(frozen=True)
class FunctionK1:
    func: Callable[[float], float]
    lo: float = -math.inf
    hi: float = math.inf
    kind = "function"

    def __call__(self, s):
        if np.ndim(s):
            return np.array([self.func(float(x)) for x in np.ravel(s)]).reshape(np.shape(s))
        return float(self.func(s))

    def validity(self):
        return self.lo, self.hi, False


def k1_from_dict(d: dict):
    kind = d.get("kind")
    try:
        if kind == "constant":
            return ConstantK1(float(d["a"]))
        if kind == "rational_sqrt":
            return RationalSqrtK1(float(d["a"]), float(d["b"]))
        if kind == "table":
            return TableK1(tuple(map(float, d["s"])), tuple(map(float, d["k"])))
    except KeyError as exc:
        raise ValidationError(f"k1 profile of kind {kind!r} is missing key {exc}") from None
    raise ValidationError(f"unknown k1 kind {kind!r} (constant, rational_sqrt, table)")


# ---------------------------------------------------------------------------
# spec and torus model


@dataclass
class CcrSpec:
    """Input for synthesis: ratios c_2..c_{n-1}, a k_1 profile, a domain.

    Initial conditions are imposed at the origin of the domain (s = 0 when
    the domain contains it, otherwise its left end); the default frame is
    the standard basis and the default point the origin of R^n.
    """

    dimension: int
    ratios: Sequence[float]
    k1: object
    domain: tuple[float, float]
    initial_point: Sequence[float] | None = None
    initial_frame: Sequence[Sequence[float]] | None = None

    def __post_init__(self):
        n = int(self.dimension)
        if n < 2:
            raise ValidationError("dimension must be >= 2")
        self.dimension = n
        self.ratios = tuple(float(c) for c in self.ratios)
        if len(self.ratios) != n - 2:
            raise ValidationError(f"dimension {n} needs {n - 2} ratios, got {len(self.ratios)}")
        for i, c in enumerate(self.ratios, start=2):
            if not math.isfinite(c) or c == 0.0:
                raise ValidationError(f"ratio c_{i} must be finite and nonzero, got {c}")
        lo, hi = map(float, self.domain)
        if not lo < hi:
            raise ValidationError(f"empty domain [{lo}, {hi}]")
        self.domain = (lo, hi)
        vlo, vhi, _ = self.k1.validity()
        if lo < vlo or hi > vhi:
            raise ValidationError(
                f"domain [{lo}, {hi}] leaves the k1 profile's domain ({vlo}, {vhi})"
            )
        p = np.zeros(n) if self.initial_point is None else np.asarray(self.initial_point, float)
        if p.shape != (n,):
            raise ValidationError(f"initial_point must have {n} components")
        self.initial_point = p
        E = np.eye(n) if self.initial_frame is None else np.asarray(self.initial_frame, float)
        if E.shape != (n, n):
            raise ValidationError(f"initial_frame must be {n}x{n}")
        if np.max(np.abs(E @ E.T - np.eye(n))) > 1e-10 or np.linalg.det(E) < 0:
            raise ValidationError("initial_frame must be orthonormal with positive orientation")
        self.initial_frame = E

    @property
    def origin(self) -> float:
        lo, hi = self.domain
        return 0.0 if lo <= 0.0 <= hi else lo

    def effective_domain(self) -> tuple[float, float]:
        """Domain pulled in by the margin at square-root singularities."""
        lo, hi = self.domain
        vlo, vhi, singular = self.k1.validity()
        if singular:
            eps = DOMAIN_MARGIN * (hi - lo)
            lo = max(lo, vlo + eps)
            hi = min(hi, vhi - eps)
        return lo, hi


@dataclass
class TorusModel:
    """Tangent indicatrix e_1(t) = A_0 + sum_l A_l cos(b_l t) + B_l sin(b_l t)."""

    frequencies: np.ndarray
    A: np.ndarray  # (k, n)
    B: np.ndarray  # (k, n)
    radii: np.ndarray
    axis: np.ndarray | None  # A_0
    matrix: np.ndarray = field(repr=False)
    planes: list[PlaneBasis] = field(repr=False)
    kernel: np.ndarray | None = field(repr=False)
    initial_frame: np.ndarray = field(repr=False)

    def e1(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        bt = np.outer(t, self.frequencies)
        out = np.cos(bt) @ self.A + np.sin(bt) @ self.B
        if self.axis is not None:
            out += self.axis
        return out

    def propagator(self, t: float) -> np.ndarray:
        """exp(t F) assembled from the invariant planes."""
        n = self.matrix.shape[0]
        P = np.zeros((n, n))
        for pl in self.planes:
            c, s = math.cos(pl.frequency * t), math.sin(pl.frequency * t)
            P += c * (np.outer(pl.u, pl.u) + np.outer(pl.v, pl.v))
            P += s * (np.outer(pl.v, pl.u) - np.outer(pl.u, pl.v))
        if self.kernel is not None:
            P += np.outer(self.kernel, self.kernel)
        return P

    def frame(self, t: float) -> np.ndarray:
        """Frenet frame (rows) at reparametrized time t."""
        return self.propagator(t) @ self.initial_frame


def frenet_matrix(spec_or_ratios) -> SkewTridiag:
    ratios = spec_or_ratios.ratios if isinstance(spec_or_ratios, CcrSpec) else spec_or_ratios
    ratios = tuple(float(c) for c in ratios)
    if any(c == 0.0 for c in ratios):
        raise ValidationError("ratios must be nonzero")
    return SkewTridiag((1.0,) + ratios)


def twisted(s, rtol: float = TWIST_RTOL) -> bool:
    """True when the frequencies are nonzero and pairwise distinct."""
    f = np.sort(np.asarray(s.frequencies if isinstance(s, Spectrum) else s, dtype=float))
    if np.any(f == 0):
        return False
    if len(f) < 2:
        return True
    return bool(np.all(np.diff(f) > rtol * np.abs(f[1:])))


def indicatrix(spec: CcrSpec) -> TorusModel:
    F = frenet_matrix(spec)
    spectrum = tridiag_frequencies(F)
    planes, kernel = invariant_planes(F, spectrum)
    E0 = spec.initial_frame
    A, B = [], []
    for pl in planes:
        u1, v1 = pl.u[0], pl.v[0]
        # e_1(t) = row 1 of exp(tF) E0; on each plane exp(-tF) eps_1 rotates
        A.append(E0.T @ (u1 * pl.u + v1 * pl.v))
        B.append(E0.T @ (v1 * pl.u - u1 * pl.v))
    A, B = np.array(A).reshape(-1, spec.dimension), np.array(B).reshape(-1, spec.dimension)
    axis = None if kernel is None else E0.T @ (kernel[0] * kernel)
    return TorusModel(
        frequencies=np.asarray(spectrum.frequencies),
        A=A,
        B=B,
        radii=np.linalg.norm(A, axis=1),
        axis=axis,
        matrix=F.matrix(),
        planes=planes,
        kernel=kernel,
        initial_frame=E0,
    )


def indicatrix_ode(spec: CcrSpec, t_end: float, steps: int) -> np.ndarray:
    """e_1 on [0, t_end] by RK4 on E' = F E; the cross-check for the model."""
    F = frenet_matrix(spec).matrix()
    n = spec.dimension
    states = rk4_solve(
        lambda t, y: (F @ y.reshape(n, n)).ravel(), spec.initial_frame.ravel(), (0.0, t_end), steps
    )
    return states.reshape(-1, n, n)[:, 0]


# ---------------------------------------------------------------------------
# synthesis


def _cumulative(values_between, idx0: int, count: int) -> np.ndarray:
    """Running sum outward from node ``idx0`` of per-interval increments."""
    out = np.zeros((count,) + np.shape(values_between)[1:])
    out[idx0 + 1 :] = np.cumsum(values_between[idx0:], axis=0)
    if idx0:
        out[:idx0] = -np.cumsum(values_between[:idx0][::-1], axis=0)[::-1]
    return out


def synthesize(spec: CcrSpec, steps: int = 2000, tol: float = 1e-10) -> CurveSamples:
    """Arc-length parametrized ccr-curve on ``steps + 1`` uniform samples.

    g(s) = int k_1 comes from adaptive Simpson on every half-step; the
    curve is alpha = alpha(origin) + int e_1(g(u)) du by Simpson's rule
    with the tangent taken from the closed-form torus model.
    """
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    lo, hi = spec.effective_domain()
    s = np.linspace(lo, hi, steps + 1)
    origin = min(max(spec.origin, lo), hi)
    nodes = s
    inserted = None
    j = int(np.searchsorted(s, origin))
    if j >= len(s) or abs(s[j] - origin) > 1e-14 * max(1.0, abs(origin)):
        if j > 0 and abs(s[j - 1] - origin) <= 1e-14 * max(1.0, abs(origin)):
            j -= 1
        else:
            nodes = np.insert(s, j, origin)
            inserted = j
    idx0 = j
    mids = 0.5 * (nodes[:-1] + nodes[1:])

    k1 = spec.k1
    kn, km = np.asarray(k1(nodes), dtype=float), np.asarray(k1(mids), dtype=float)
    if np.any(~(kn > 0)) or np.any(~(km > 0)):
        raise ValidationError("k1 profile must be positive on the domain")

    piece_tol = tol / max(len(nodes), 1)
    full = np.array([integrate(k1, a, b, piece_tol) for a, b in zip(nodes[:-1], nodes[1:])])
    half = np.array([integrate(k1, a, b, piece_tol) for a, b in zip(nodes[:-1], mids)])
    g = _cumulative(full, idx0, len(nodes))
    gm = g[:-1] + half

    model = indicatrix(spec)
    e = model.e1(g)
    em = model.e1(gm)
    dx = np.diff(nodes)[:, None]
    inc = dx / 6.0 * (e[:-1] + 4.0 * em + e[1:])
    pts = spec.initial_point + _cumulative(inc, idx0, len(nodes))
    if inserted is not None:
        pts = np.delete(pts, inserted, axis=0)
    if not np.all(np.isfinite(pts)):
        raise NumericalError("synthesis produced non-finite points")
    return CurveSamples(s=s, points=pts, arclength=True)


def warp(
    constant_curvatures: Sequence[float],
    k: Callable[[float], float],
    s_range: tuple[float, float],
    steps: int = 2000,
    initial_point=None,
    initial_frame=None,
) -> CurveSamples:
    """Curve with curvatures a_i k(s) from constant curvatures a_i.

    Equivalent to integrating the tangent of the constant-curvature curve
    at g(s) = int_0^s k: a ccr-curve with ratios a_i / a_1 and first
    curvature a_1 k(s).
    """
    a = [float(x) for x in constant_curvatures]
    if len(a) < 1 or any(x == 0 for x in a):
        raise ValidationError("constant curvatures must be nonzero")
    lo, hi = map(float, s_range)
    probe = np.linspace(lo, hi, 257)
    if np.any(~(np.array([k(x) for x in probe]) > 0)):
        raise ValidationError("warp profile k must be positive")
    spec = CcrSpec(
        dimension=len(a) + 1,
        ratios=[x / a[0] for x in a[1:]],
        k1=FunctionK1(lambda x: a[0] * k(x)),
        domain=(lo, hi),
        initial_point=initial_point,
        initial_frame=initial_frame,
    )
    return synthesize(spec, steps)


# ---------------------------------------------------------------------------
# verification


@dataclass
class TorusFitReport:
    ratios: np.ndarray
    frequencies: np.ndarray
    radius_mean: np.ndarray
    radius_spread: np.ndarray
    axis_mean: float | None
    axis_spread: float | None
    twisted: bool
    verdict: bool
    tolerance: float
    ratio_report: frenet.RatioReport = field(repr=False)

    @property
    def sum_r2(self) -> float:
        total = float(np.sum(self.radius_mean**2))
        if self.axis_mean is not None:
            total += self.axis_mean**2
        return total


def verify_torus(samples: CurveSamples, tol: float = VERIFY_TOL, strides=None) -> TorusFitReport:
    """Check that the tangent indicatrix of ``samples`` lies on a flat torus.

    Ratios are measured, F and its invariant planes are built from them and
    carried to world coordinates by the measured frames (averaging the
    per-sample projectors). The projections of the measured tangent onto
    those planes must then have constant length, and for odd n the axis
    component must be constant.
    """
    data = frenet.curvature_profile(samples, strides=strides)
    rep = frenet.ratio_analysis(data)
    F = frenet_matrix(rep.ratios)
    spectrum = tridiag_frequencies(F)
    planes, kernel = invariant_planes(F, spectrum)

    use = ~data.boundary
    use[: frenet.RATIO_MARGIN] = False
    use[len(use) - frenet.RATIO_MARGIN :] = False
    E = data.frames[use]
    t = E[:, 0]
    radius_mean, radius_spread = [], []
    for pl in planes:
        Pw = np.einsum("mki,kl,mlj->ij", E, pl.projector(), E) / len(E)
        _, vecs = np.linalg.eigh(Pw)
        W = vecs[:, -2:]
        r = np.linalg.norm(t @ W, axis=1)
        radius_mean.append(r.mean())
        radius_spread.append(r.max() - r.min())
    axis_mean = axis_spread = None
    if kernel is not None:
        w = np.einsum("mki,k->mi", E, kernel).mean(axis=0)
        w /= np.linalg.norm(w)
        a = t @ w
        axis_mean, axis_spread = float(a.mean()), float(a.max() - a.min())
    spreads = list(radius_spread) + ([axis_spread] if axis_spread is not None else [])
    return TorusFitReport(
        ratios=rep.ratios,
        frequencies=np.asarray(spectrum.frequencies),
        radius_mean=np.array(radius_mean),
        radius_spread=np.array(radius_spread),
        axis_mean=axis_mean,
        axis_spread=axis_spread,
        twisted=twisted(spectrum),
        verdict=bool(all(sp < tol for sp in spreads)),
        tolerance=tol,
        ratio_report=rep,
    )
