"""Frenet frame and curvatures of curves in R^n.

The frame comes from Gram-Schmidt on the first n-1 derivatives, completed
by orientation. Curvatures are read off the Gram-Schmidt coefficients:
writing alpha^(i) = sum_j a_ij e_j, the e_{i+1} component of alpha^(i+1)
equals a_ii * |alpha'| * k_i, so no derivative of the frame is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .numkit import (
    EPS,
    RANK_TOL,
    RankDeficiencyError,
    ValidationError,
    _cofactor_vector,
    central_halfwidth,
    check_uniform,
    derivatives_from_samples,
    fd_weights,
)

MIN_SAMPLES = 32
SAMPLE_ACCURACY = 8  # order of the finite-difference stencils on sampled curves
CONSTANCY_TOL = 1e-3
RATIO_MARGIN = 2


@dataclass
class CurveSamples:
    """Curve sampled on a uniform parameter grid.

    ``arclength`` records whether ``s`` is an arc-length parameter.
    """

    s: np.ndarray
    points: np.ndarray
    arclength: bool = False

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] != self.s.shape[0]:
            raise ValidationError("points must have shape (len(s), n)")
        if self.points.shape[1] < 2:
            raise ValidationError("dimension must be at least 2")
        if not np.all(np.isfinite(self.points)):
            raise ValidationError("non-finite sample coordinates")
        check_uniform(self.s)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def h(self) -> float:
        return float((self.s[-1] - self.s[0]) / (len(self.s) - 1))

    def __len__(self):
        return len(self.s)


@dataclass
class AnalyticCurve:
    """Curve given by a point oracle, optionally with derivative oracles.

    ``derivatives[k]`` evaluates the (k+1)-th derivative. Missing orders are
    estimated by central differences on a local grid whose spacing grows
    with the order (``fd_scale`` sets the length scale).
    """

    point: Callable[[float], Sequence[float]]
    dimension: int
    domain: tuple[float, float] = (-np.inf, np.inf)
    derivatives: Sequence[Callable[[float], Sequence[float]]] = ()
    fd_scale: float = 1.0

    def derivs(self, s: float, order: int) -> np.ndarray:
        """Rows alpha', ..., alpha^(order) at ``s``."""
        lo, hi = self.domain
        if not (lo <= s <= hi):
            raise ValidationError(f"parameter {s} outside domain [{lo}, {hi}]")
        out = np.empty((order, self.dimension))
        for k in range(1, order + 1):
            if k <= len(self.derivatives):
                out[k - 1] = np.asarray(self.derivatives[k - 1](s), dtype=float)
            else:
                out[k - 1] = self._fd(s, k)
        return out

    def _fd(self, s: float, k: int) -> np.ndarray:
        h = self.fd_scale * EPS ** (1.0 / (k + 4))
        p = central_halfwidth(k)
        lo, hi = self.domain
        offs = np.arange(-p, p + 1)
        if s - p * h < lo or s + p * h > hi:
            width = k + 4
            start = -(width // 2)
            if s + start * h < lo:
                start = 0
            if s + (start + width - 1) * h > hi:
                start = -(width - 1)
            offs = np.arange(start, start + width)
            if s + offs[0] * h < lo or s + offs[-1] * h > hi:
                raise ValidationError(f"domain too short to differentiate at {s}")
        w = fd_weights(tuple(int(o) for o in offs), k)
        pts = np.array([self.point(s + o * h) for o in offs], dtype=float)
        return np.tensordot(w, pts, axes=1) / h**k


@dataclass
class FrenetPoint:
    frame: np.ndarray  # (n, n), rows e_1..e_n
    curvatures: np.ndarray  # (n-1,)
    speed: float


@dataclass
class FrenetData:
    s: np.ndarray
    frames: np.ndarray  # (m, n, n)
    curvatures: np.ndarray  # (m, n-1)
    speed: np.ndarray  # (m,)
    boundary: np.ndarray = field(default=None)  # (m,) lower-confidence samples

    def __post_init__(self):
        if self.boundary is None:
            self.boundary = np.zeros(len(self.s), dtype=bool)

    @property
    def n(self) -> int:
        return self.frames.shape[1]


@dataclass
class RatioReport:
    ratios: np.ndarray  # c_i = k_i / k_1, i = 2..n-1
    profiles: np.ndarray  # (m, n-2), NaN on excluded samples
    spread: np.ndarray  # relative standard deviation per ratio
    verdicts: np.ndarray  # bool per ratio
    tolerance: float

    @property
    def is_ccr(self) -> bool:
        return bool(np.all(self.verdicts))


# ---------------------------------------------------------------------------


def frenet_from_derivatives(D, noise=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batch Frenet apparatus from derivative stacks.

    Parameters
    ----------
    D : (m, n, n) array, ``D[j, i]`` the (i+1)-th derivative at sample j.
    noise : optional (n,) absolute noise floor per derivative order; a
        Gram-Schmidt residual below it counts as rank deficiency.

    Returns frames (m, n, n), curvatures (m, n-1), speed (m,).
    """
    D = np.asarray(D, dtype=float)
    m, n, _ = D.shape
    E = np.zeros_like(D)
    diag = np.zeros((m, n))
    for i in range(n - 1):
        w = D[:, i].copy()
        for _ in range(2):
            for j in range(i):
                w -= np.einsum("ij,ij->i", E[:, j], w)[:, None] * E[:, j]
        r = np.linalg.norm(w, axis=1)
        floor = RANK_TOL * np.linalg.norm(D[:, i], axis=1)
        if noise is not None:
            floor = np.maximum(floor, noise[i])
        bad = ~(r > floor)
        if np.any(bad):
            where = np.flatnonzero(bad)
            raise RankDeficiencyError(
                f"derivatives 1..{i + 1} are linearly dependent at "
                f"{len(where)} sample(s), first index {where[0]}"
            )
        E[:, i] = w / r[:, None]
        diag[:, i] = r
    last = _cofactor_vector(E[:, : n - 1])
    E[:, n - 1] = last / np.linalg.norm(last, axis=1)[:, None]
    speed = np.linalg.norm(D[:, 0], axis=1)
    k = np.einsum("mij,mij->mi", D[:, 1:], E[:, 1:]) / (diag[:, : n - 1] * speed[:, None])
    return E, k, speed


def _align_signs(frames: np.ndarray, curv: np.ndarray) -> None:
    """Flip frame vectors in place to follow their predecessor sample.

    A flip of e_i changes the sign of k_{i-1} and k_i (k_i = <e_i', e_{i+1}>).
    """
    m, n, _ = frames.shape
    for j in range(1, m):
        dots = np.einsum("ij,ij->i", frames[j], frames[j - 1])
        sigma = np.where(dots < 0, -1.0, 1.0)
        if np.all(sigma > 0):
            continue
        frames[j] *= sigma[:, None]
        curv[j] *= sigma[:-1] * sigma[1:]


def length_scale(samples: CurveSamples) -> float:
    """Rough length over which the curve bends or its bending changes.

    The smaller of 1/k_1 and k_1/|dk_1/ds|, each at its 90th percentile
    over the samples.
    """
    D, _ = derivatives_from_samples(samples.s, samples.points, 2, stride=1)
    d1, d2 = D[1], D[2]
    sp = np.linalg.norm(d1, axis=1)
    t = d1 / sp[:, None]
    perp = d2 - np.einsum("ij,ij->i", d2, t)[:, None] * t
    k1 = np.linalg.norm(perp, axis=1) / sp**2
    span = float(np.sum(np.linalg.norm(np.diff(samples.points, axis=0), axis=1)))
    k = np.percentile(k1, 90)
    if not np.isfinite(k) or k * span < 1e-6:
        return max(span, samples.h)
    coarse = max(1, len(k1) // 200)
    dk, _ = derivatives_from_samples(samples.s, k1, 1, stride=coarse)
    with np.errstate(divide="ignore", invalid="ignore"):
        rate = np.abs(dk[1]) / (sp * k1)
    rate = np.percentile(rate[np.isfinite(rate)], 90) if np.any(np.isfinite(rate)) else 0.0
    return float(min(1.0 / max(k, rate), span))


def choose_strides(samples: CurveSamples, max_order: int, scale: float | None = None):
    """Stencil strides balancing truncation error against rounding noise.

    For a derivative of order k with a 4th-order stencil the best spacing is
    about ``L * (eps * P / L) ** (1 / (k + a))`` for stencils of accuracy a,
    with L the curvature length
    scale and P the coordinate magnitude.
    """
    L = length_scale(samples) if scale is None else scale
    P = max(float(np.max(np.abs(samples.points))), L)
    h = samples.h
    out = []
    for k in range(1, max_order + 1):
        target = 0.5 * L * (EPS * P / L) ** (1.0 / (k + SAMPLE_ACCURACY))
        out.append(max(1, int(round(target / h))))
    return out


def _sample_noise(samples: CurveSamples, strides) -> np.ndarray:
    """Absolute noise floor of each differenced derivative order."""
    P = float(np.max(np.abs(samples.points)))
    out = []
    for k, st in enumerate(strides, start=1):
        p = central_halfwidth(k, SAMPLE_ACCURACY)
        w = fd_weights(tuple(range(-p, p + 1)), k)
        out.append(1e3 * EPS * P * sum(abs(x) for x in w) / (samples.h * st) ** k)
    return np.array(out)


def _sample_derivatives(samples: CurveSamples, strides=None):
    n = samples.n
    if len(samples) < MIN_SAMPLES:
        raise ValidationError(
            f"need at least {MIN_SAMPLES} samples, got {len(samples)}"
        )
    if strides is None:
        strides = choose_strides(samples, n)
    D, boundary = derivatives_from_samples(
        samples.s, samples.points, n, stride=strides, accuracy=SAMPLE_ACCURACY
    )
    return np.moveaxis(D[1:], 0, 1), boundary, _sample_noise(samples, strides)


def frenet_apparatus(curve, at: float, strides=None) -> FrenetPoint:
    """Frenet frame, curvatures and speed of ``curve`` at parameter ``at``.

    For sampled curves ``at`` is snapped to the nearest grid point.
    """
    if isinstance(curve, CurveSamples):
        j = int(np.argmin(np.abs(curve.s - at)))
        if abs(curve.s[j] - at) > 0.5 * curve.h + 1e-12:
            raise ValidationError(f"parameter {at} outside the sample grid")
        D, _, noise = _sample_derivatives(curve, strides)
        E, k, sp = frenet_from_derivatives(D[j : j + 1], noise)
    else:
        D = curve.derivs(float(at), curve.dimension)
        E, k, sp = frenet_from_derivatives(D[None])
    return FrenetPoint(frame=E[0], curvatures=k[0], speed=float(sp[0]))


def curvature_profile(curve, grid=None, strides=None) -> FrenetData:
    """Frenet apparatus over a grid with sign continuity of the frame."""
    if isinstance(curve, CurveSamples):
        if grid is not None:
            raise ValidationError("sampled curves use their own grid")
        D, boundary, noise = _sample_derivatives(curve, strides)
        E, k, sp = frenet_from_derivatives(D, noise)
        s = curve.s
    else:
        s = np.asarray(grid, dtype=float)
        D = np.array([curve.derivs(float(x), curve.dimension) for x in s])
        E, k, sp = frenet_from_derivatives(D)
        boundary = np.zeros(len(s), dtype=bool)
    _align_signs(E, k)
    return FrenetData(s=s, frames=E, curvatures=k, speed=sp, boundary=boundary)


def ratio_analysis(
    data: FrenetData, tol: float = CONSTANCY_TOL, margin: int = RATIO_MARGIN
) -> RatioReport:
    """Estimate c_i = k_i / k_1 (median) and test each for constancy.

    All consecutive quotients k_{i+1}/k_i are constant exactly when every
    k_i/k_1 is, and the latter are the entries of the reduced Frenet matrix.
    """
    k = data.curvatures
    m, nk = k.shape
    use = ~data.boundary.copy()
    use[:margin] = False
    use[m - margin :] = False
    if use.sum() < 3:
        raise ValidationError("too few interior samples for ratio statistics")
    kk = k[use]
    for i in range(nk - 1):
        col = kk[:, i]
        if np.any(col == 0) or (np.any(col > 0) and np.any(col < 0)):
            raise ValidationError(f"curvature k_{i + 1} crosses zero; ratio undefined")
    prof = np.full((m, max(nk - 1, 0)), np.nan)
    if nk > 1:
        prof[use] = kk[:, 1:] / kk[:, :1]
    vals = prof[use]
    ratios = np.median(vals, axis=0) if nk > 1 else np.zeros(0)
    spread = (
        np.std(vals, axis=0) / np.abs(np.mean(vals, axis=0)) if nk > 1 else np.zeros(0)
    )
    return RatioReport(
        ratios=ratios, profiles=prof, spread=spread, verdicts=spread < tol, tolerance=tol
    )


def frenet_residual(curve, at: float, h: float | None = None, strides=None) -> float:
    """Max-norm residual of e' = |alpha'| K e at ``at``.

    The frame derivative is a 4th-order central difference of frames at
    neighbouring parameters (grid points for sampled curves).
    """
    if isinstance(curve, CurveSamples):
        data = curvature_profile(curve, strides=strides)
        j = int(np.argmin(np.abs(curve.s - at)))
        st = (strides or choose_strides(curve, curve.n))[0]
        lo, hi = 2 * st, len(curve) - 1 - 2 * st
        if hi < lo:
            raise ValidationError("too few samples for a frame derivative")
        j = min(max(j, lo), hi)
        idx = [j + o * st for o in (-2, -1, 1, 2)]
        frames = data.frames[idx]
        step = curve.h * st
        center = FrenetPoint(data.frames[j], data.curvatures[j], float(data.speed[j]))
    else:
        step = h or 1e-3 * curve.fd_scale
        center = frenet_apparatus(curve, at)
        frames = []
        for o in (-2, -1, 1, 2):
            f = frenet_apparatus(curve, at + o * step).frame
            f *= np.where(np.einsum("ij,ij->i", f, center.frame) < 0, -1.0, 1.0)[:, None]
            frames.append(f)
        frames = np.array(frames)
    w = fd_weights((-2, -1, 1, 2), 1)
    de = np.tensordot(w, frames, axes=1) / step
    K = np.diag(center.curvatures, 1) - np.diag(center.curvatures, -1)
    return float(np.max(np.abs(de - center.speed * K @ center.frame)))


def arclength_resample(curve: AnalyticCurve, t0: float, t1: float, count: int,
                       derivative=None) -> CurveSamples:
    """Sample ``curve`` at uniform arc length between parameters t0 and t1."""
    from scipy.interpolate import CubicHermiteSpline
    from scipy.optimize import brentq

    from .numkit import integrate

    def speed(t):
        d = derivative(t) if derivative else curve.derivs(t, 1)[0]
        return float(np.linalg.norm(d))

    knots = np.linspace(t0, t1, 2 * count + 1)
    lengths = np.concatenate(
        [[0.0], np.cumsum([integrate(speed, a, b, tol=1e-13) for a, b in zip(knots[:-1], knots[1:])])]
    )
    sp = np.array([speed(t) for t in knots])
    arc = CubicHermiteSpline(knots, lengths, sp)
    targets = np.linspace(0.0, lengths[-1], count)
    # inverse spline as a starting guess, then Newton on arc(t) = L
    params = CubicHermiteSpline(lengths, knots, 1.0 / sp)(targets)
    for _ in range(3):
        params = np.clip(params - (arc(params) - targets) / arc.derivative()(params), t0, t1)
    bad = np.abs(arc(params) - targets) > 1e-13 * max(lengths[-1], 1.0)
    for j in np.flatnonzero(bad[1:-1]) + 1:
        params[j] = brentq(lambda t: arc(t) - targets[j], t0, t1, xtol=1e-15)
    params[0], params[-1] = t0, t1
    pts = np.array([curve.point(t) for t in params], dtype=float)
    return CurveSamples(s=targets, points=pts, arclength=True)
