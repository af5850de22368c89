"""Spherical curves in R^3 and R^4.

A unit-speed curve on the sphere |alpha - m| = R satisfies

    alpha - m = -(1/k1) e2 + mu e3 + nu e4,
    mu = k1' / (k1^2 k2),   nu = (mu' - k2/k1) / k3,

which follows from differentiating <alpha - m, alpha - m> = R^2 and the
Frenet equations; R^2 is the sum of the squared coefficients. The R^3 case
drops the e4 term. For ccr-curves in R^4 with f = 1/k1^2 this reduces to

    f + f'^2 / (4 c2^2) + (f / c3^2) (-f'' / (2 c2) + sigma c2)^2 = 1

with sigma = -1. The printed variant with sigma = +1 is kept selectable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import frenet
from .ccr import CcrSpec, RationalSqrtK1, synthesize
from .frenet import CurveSamples, FrenetData
from .numkit import (
    EPS,
    ValidationError,
    check_uniform,
    derivatives_from_samples,
    fd_weights,
)

CENTER_TOL = 1e-5


# ---------------------------------------------------------------------------
# profiles with optional analytic derivatives


@dataclass
class Profile:
    """Scalar function of s with optional first and second derivatives.

    Missing derivatives fall back to 4th-order central differences.
    """

    f: Callable
    d1: Callable | None = None
    d2: Callable | None = None
    step: float = 1e-3

    def __call__(self, s, order: int = 0):
        s = np.asarray(s, dtype=float)
        if order == 0:
            return np.asarray(self.f(s), dtype=float)
        exact = self.d1 if order == 1 else self.d2 if order == 2 else None
        if exact is not None:
            return np.asarray(exact(s), dtype=float) + 0.0 * s
        w = fd_weights((-2, -1, 0, 1, 2), order)
        h = self.step
        return sum(wt * np.asarray(self.f(s + o * h), dtype=float)
                   for o, wt in zip((-2, -1, 0, 1, 2), w)) / h**order


def grid_derivatives(s, y, order: int, rel_noise: float = 1e-9):
    """Derivatives 0..order of a measured profile on a uniform grid.

    Returns the derivative stack and the mask of samples that needed
    one-sided stencils, as ``derivatives_from_samples`` does.

    Stencils are 8th order with spacing ``0.25 L rel_noise**(1/(k+8))``,
    where L is the length over which the profile changes by its own size.
    """
    h = check_uniform(s)
    y = np.asarray(y, dtype=float)
    span = float(s[-1] - s[0])
    rough, _ = derivatives_from_samples(s, y, 1, stride=max(1, len(s) // 1000))
    rate = np.percentile(np.abs(rough[1]) / np.maximum(np.abs(y), 1e-300), 90)
    L = span if rate * span < 1.0 else 1.0 / rate
    strides = [
        max(1, min(int(round(0.25 * L * rel_noise ** (1.0 / (k + 8)) / h)), len(s) // 16))
        for k in range(1, order + 1)
    ]
    return derivatives_from_samples(s, y, order, stride=strides, accuracy=8)


def _values(profile, s, order: int):
    if isinstance(profile, Profile):
        return profile(s, order)
    if callable(profile):
        return Profile(profile)(s, order)
    y = np.asarray(profile, dtype=float)
    if y.shape != np.shape(s):
        raise ValidationError("profile array must match the grid")
    if order == 0:
        return y
    return grid_derivatives(s, y, order)[0][order]


def _positive(*arrays):
    for a in arrays:
        if np.any(~(np.asarray(a) != 0)):
            raise ValidationError("curvature profile vanishes; criterion undefined")


# ---------------------------------------------------------------------------
# criteria


def criterion_r3(k1, k2, R: float = 1.0, s=None) -> np.ndarray:
    """Pointwise |1/k1^2 + (k1'/(k1^2 k2))^2 - R^2|."""
    s = np.asarray(s, dtype=float)
    a, b = _values(k1, s, 0), _values(k2, s, 0)
    _positive(a, b)
    mu = _values(k1, s, 1) / (a * a * b)
    return np.abs(1.0 / a**2 + mu**2 - R * R)


def osculating_coefficients(k1, k2, k3, s, sign: int = -1):
    """(-1/k1, mu, nu) with nu = (mu' + sign k2/k1) / k3."""
    s = np.asarray(s, dtype=float)
    a, b, c = _values(k1, s, 0), _values(k2, s, 0), _values(k3, s, 0)
    _positive(a, b, c)
    da, dda, db = _values(k1, s, 1), _values(k1, s, 2), _values(k2, s, 1)
    mu = da / (a * a * b)
    dmu = (dda - da * (2.0 * da / a + db / b)) / (a * a * b)
    nu = (dmu + sign * b / a) / c
    return -1.0 / a, mu, nu


def criterion_r4(k1, k2, k3, R: float = 1.0, s=None, sign: int = -1,
                 include_third: bool = True) -> np.ndarray:
    """Pointwise |1/k1^2 + mu^2 + nu^2 - R^2|, the R^4 sphere condition.

    ``include_third=False`` drops the nu term and reproduces the R^3 test.
    """
    s = np.asarray(s, dtype=float)
    if include_third:
        a, mu, nu = osculating_coefficients(k1, k2, k3, s, sign)
    else:
        a, b = _values(k1, s, 0), _values(k2, s, 0)
        _positive(a, b)
        a, mu, nu = -1.0 / a, _values(k1, s, 1) / (a * a * b), 0.0
    return np.abs(a**2 + mu**2 + nu**2 - R * R)


# ---------------------------------------------------------------------------
# fitting and center recovery


@dataclass
class SphereFit:
    center: np.ndarray
    radius: float
    rms: float


def fit_sphere(samples) -> SphereFit:
    """Algebraic least-squares sphere |x|^2 = 2 c.x + (R^2 - |c|^2)."""
    X = samples.points if isinstance(samples, CurveSamples) else np.asarray(samples, float)
    m, n = X.shape
    if m < n + 2:
        raise ValidationError(f"need at least {n + 2} points to fit a sphere in R^{n}")
    mean = X.mean(axis=0)
    Y = X - mean
    scale = np.max(np.linalg.norm(Y, axis=1))
    if scale == 0:
        raise ValidationError("degenerate point set (all points coincide)")
    Y = Y / scale
    A = np.hstack([2.0 * Y, np.ones((m, 1))])
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] < 1e-9 * sv[0]:
        raise ValidationError("degenerate point set: lies in an affine subspace")
    sol, *_ = np.linalg.lstsq(A, np.sum(Y * Y, axis=1), rcond=None)
    c = sol[:n]
    radius = math.sqrt(sol[n] + c @ c) * scale
    center = mean + c * scale
    d = np.linalg.norm(X - center, axis=1) - radius
    return SphereFit(center=center, radius=radius, rms=float(np.sqrt(np.mean(d * d))))


@dataclass
class CenterReport:
    centers: np.ndarray  # (m, n), NaN outside the interior
    mean: np.ndarray
    spread: float
    radius: float
    consistent: bool


def recover_center(samples: CurveSamples, data: FrenetData | None = None,
                   R: float | None = None, tol: float = CENTER_TOL,
                   margin: int = 8) -> CenterReport:
    """Per-sample center m = alpha + (1/k1) e2 - mu e3 - nu e4.

    Coefficients carry no factor of R (the decomposition is derived for unit
    speed). ``spread`` is the largest distance of an interior center from
    their mean; a spherical curve gives a constant center.
    """
    n = samples.n
    if n not in (3, 4):
        raise ValidationError("center recovery is implemented for R^3 and R^4")
    if data is None:
        data = frenet.curvature_profile(samples)
    inner = np.flatnonzero(~data.boundary)
    if len(inner) < 4 * margin + 32:
        raise ValidationError("too few interior samples for center recovery")
    sl = slice(inner[0], inner[-1] + 1)
    s = data.s[sl]
    k = data.curvatures[sl]
    E = data.frames[sl]
    if n == 3:
        a = -1.0 / k[:, 0]
        mu = _values(k[:, 0], s, 1) / (k[:, 0] ** 2 * k[:, 1])
        nu = np.zeros_like(mu)
    else:
        a, mu, nu = osculating_coefficients(k[:, 0], k[:, 1], k[:, 2], s)
    offset = a[:, None] * E[:, 1] + mu[:, None] * E[:, 2]
    if n == 4:
        offset += nu[:, None] * E[:, 3]
    centers = samples.points[sl] - offset
    _, edge = grid_derivatives(s, k[:, 0], 2 if n == 4 else 1)
    keep = ~edge
    keep[:margin] = keep[len(s) - margin:] = False
    if keep.sum() < 16:
        raise ValidationError("too few interior samples for center recovery")
    mean = centers[keep].mean(axis=0)
    spread = float(np.max(np.linalg.norm(centers[keep] - mean, axis=1)))
    radius = float(np.mean(np.linalg.norm(offset[keep], axis=1)))
    consistent = spread < tol and (R is None or abs(radius - R) < tol)
    out = np.full_like(samples.points, np.nan)
    out[inner[0] + np.flatnonzero(keep)] = centers[keep]
    return CenterReport(centers=out, mean=mean, spread=spread, radius=radius,
                        consistent=bool(consistent))


# ---------------------------------------------------------------------------
# reduced equation for spherical ccr-curves in R^4


@dataclass
class ReducedSolution:
    """f(s) = 1/k1(s)^2 as a polynomial (ascending coefficients)."""

    kind: str
    coefficients: tuple[float, ...]

    @property
    def poly(self):
        return np.polynomial.Polynomial(self.coefficients)

    def __call__(self, s, order: int = 0):
        return self.poly.deriv(order)(np.asarray(s, dtype=float)) if order else self.poly(
            np.asarray(s, dtype=float))

    def validity(self) -> tuple[float, float]:
        """Largest open interval around the vertex (or s = 0) on which f > 0."""
        p = self.poly
        if p.degree() <= 0:
            return (-math.inf, math.inf) if self.coefficients[0] > 0 else (0.0, 0.0)
        roots = np.sort([r.real for r in p.roots() if abs(r.imag) < 1e-12])
        probe = -p.coef[1] / (2 * p.coef[2]) if p.degree() == 2 else 0.0
        if p(probe) <= 0:
            probe = 0.5 * (roots[0] + roots[-1]) if len(roots) else probe
        lo = max([r for r in roots if r < probe], default=-math.inf)
        hi = min([r for r in roots if r > probe], default=math.inf)
        return float(lo), float(hi)

    def k1_profile(self):
        """k1 = 1/sqrt(f) when f = A - B^2 s^2 (A > 0), else None."""
        c = list(self.coefficients) + [0.0] * 3
        if c[1] == 0 and c[0] > 0 and c[2] < 0:
            return RationalSqrtK1(1.0 / math.sqrt(c[0]), math.sqrt(-c[2] / c[0]))
        return None


def constant_solution(c2: float, c3: float) -> ReducedSolution:
    return ReducedSolution("constant", (c3 * c3 / (c2 * c2 + c3 * c3),))


def printed_quadratic_families(c2: float, c3: float) -> list[ReducedSolution]:
    """The two degree-2 displays, when their square root is real.

    They solve the reduced equation with sigma = +1.
    """
    disc = c3 * c3 - 8.0 * c2 * c2
    if disc < 0:
        return []
    r = c3 * math.sqrt(disc)
    quad = 0.5 * (2 * c2 * c2 - c3 * c3 - r)
    const = (-2 * c2 * c2 + c3 * c3 - r) / (2 * (c2 * c2 + c3 * c3))
    return [
        ReducedSolution("quadratic-family-1", (const, 0.0, quad)),
        ReducedSolution("quadratic-family-2", (0.0, 2 * c2, quad)),
    ]


def minus_sign_quadratics(c2: float, c3: float) -> list[ReducedSolution]:
    """Even quadratic solutions A + B s^2 of the sigma = -1 equation.

    Matching powers of s gives B^2 + (c3^2 + 2 c2^2) B + c2^2 (c2^2 + c3^2) = 0,
    so B = -c2^2 or B = -(c2^2 + c3^2), and A = -c2^2 / B.
    """
    out = []
    for B in (-(c2 * c2), -(c2 * c2 + c3 * c3)):
        out.append(ReducedSolution("custom", (-(c2 * c2) / B, 0.0, B)))
    return out


def reduced_residual(f, c2: float, c3: float, s, sign: int = -1) -> np.ndarray:
    """Pointwise |f + f'^2/(4c2^2) + (f/c3^2)(-f''/(2c2) + sign c2)^2 - 1|."""
    if c2 == 0 or c3 == 0:
        raise ValidationError("c2 and c3 must be nonzero")
    if sign not in (1, -1):
        raise ValidationError("sign must be +1 or -1")
    s = np.asarray(s, dtype=float)
    if isinstance(f, ReducedSolution):
        f0, f1, f2 = f(s), f(s, 1), f(s, 2)
    else:
        f0, f1, f2 = _values(f, s, 0), _values(f, s, 1), _values(f, s, 2)
    if np.any(~(f0 > 0)):
        raise ValidationError("f must be positive on the evaluation range")
    inner = -f2 / (2.0 * c2) + sign * c2
    return np.abs(f0 + f1 * f1 / (4.0 * c2 * c2) + f0 / (c3 * c3) * inner * inner - 1.0)


def accept_solution(sol: ReducedSolution, c2, c3, s, sign: int = -1, tol: float = 1e-9) -> bool:
    """Real coefficients and residual below ``tol`` on the grid."""
    if not all(math.isfinite(c) for c in sol.coefficients):
        return False
    try:
        return bool(np.max(reduced_residual(sol, c2, c3, s, sign)) < tol)
    except ValidationError:
        return False


# ---------------------------------------------------------------------------
# closed forms


def alpha_c(c: float, s) -> np.ndarray:
    """Spherical generalized helix in R^3 by arc length, |s| < 1/c."""
    s = np.asarray(s, dtype=float)
    q = math.sqrt(1.0 + c * c)
    root = np.sqrt(1.0 - (c * s) ** 2)
    ph = q * np.arcsin(c * s) / c
    return np.stack([
        root * np.cos(ph) + c * c * s / q * np.sin(ph),
        -root * np.sin(ph) + c * c * s / q * np.cos(ph),
        c * s / q,
    ], axis=-1)


def helix_r3(c: float, t) -> np.ndarray:
    """The same helix with s = sin(t)/c; lies on the unit sphere."""
    if c <= 0:
        raise ValidationError("c must be positive")
    t = np.asarray(t, dtype=float)
    q = math.sqrt(1.0 + c * c)
    w = q / c
    return np.stack([
        np.cos(t) * np.cos(w * t) + c / q * np.sin(t) * np.sin(w * t),
        -np.cos(t) * np.sin(w * t) + c / q * np.sin(t) * np.cos(w * t),
        np.sin(t) / q,
    ], axis=-1)


def constant_spherical_condition(r1, r2, m1, m2, rtol: float = 1e-12) -> bool:
    """r1^2 m2^2 + r2^2 m1^2 == m1^2 m2^2 (r1^2 + r2^2), relative tolerance."""
    lhs = r1 * r1 * m2 * m2 + r2 * r2 * m1 * m1
    rhs = m1 * m1 * m2 * m2 * (r1 * r1 + r2 * r2)
    return abs(lhs - rhs) <= rtol * max(abs(lhs), abs(rhs))


def constant_curvature_curve(r1, r2, m1, m2, s) -> np.ndarray:
    """Unit-speed flat-torus geodesic in R^4; on the unit sphere iff the condition holds."""
    s = np.asarray(s, dtype=float)
    N = math.sqrt(r1 * r1 + r2 * r2)
    return np.stack([
        r1 / m1 * np.sin(m1 * s), -r1 / m1 * np.cos(m1 * s),
        r2 / m2 * np.sin(m2 * s), -r2 / m2 * np.cos(m2 * s),
    ], axis=-1) / N


# ---------------------------------------------------------------------------
# worked example


WORKED_C2 = 0.5
WORKED_C3 = math.sqrt(3.0) / 2.0
WORKED_POINT = (0.0, -math.sqrt(3.0) / 2.0, 0.0, 0.5)


def frame_from_indicatrix(derivs: np.ndarray, offdiag) -> np.ndarray:
    """Frame rows e_1..e_n at t = 0 from derivatives of e_1(t).

    Uses e_{i+1} = (e_i' + beta_{i-1} e_{i-1}) / beta_i, i.e. row i of
    E' = F E solved for e_{i+1}; each e_i is tracked as a combination of
    e_1, e_1', e_1'', ...
    """
    n = len(offdiag) + 1
    coeffs = [np.eye(n)[0]]  # e_1 = 1 * e_1^(0)
    prev = np.zeros(n)
    for i in range(n - 1):
        shifted = np.roll(coeffs[-1], 1)
        shifted[0] = 0.0
        back = offdiag[i - 1] * (coeffs[-2] if i else prev)
        coeffs.append((shifted + back) / offdiag[i])
    return np.array(coeffs) @ derivs


def example_522(steps: int = 10_000, domain=(-0.5, 0.5)) -> CurveSamples:
    """Spherical ccr-curve with c2 = 1/2, c3 = sqrt(3)/2 and k1 = 2/sqrt(1-4s^2).

    The initial frame is the Frenet frame at t = 0 of
    e_1(t) = (cos(sqrt(3/2) t), sin(sqrt(3/2) t), cos(t/sqrt2), sin(t/sqrt2)) / sqrt2,
    which puts the curve on the unit sphere about the origin.
    """
    if steps < 64:
        raise ValidationError("example_522 needs steps >= 64")
    m1, m2 = math.sqrt(1.5), math.sqrt(0.5)
    derivs = np.zeros((4, 4))
    for k in range(4):
        c, s_ = math.cos(k * math.pi / 2), math.sin(k * math.pi / 2)
        derivs[k] = [m1**k * c, m1**k * s_, m2**k * c, m2**k * s_]
    derivs /= math.sqrt(2.0)
    derivs[np.abs(derivs) < 1e-15] = 0.0
    E0 = frame_from_indicatrix(derivs, (1.0, WORKED_C2, WORKED_C3))
    spec = CcrSpec(
        dimension=4,
        ratios=(WORKED_C2, WORKED_C3),
        k1=RationalSqrtK1(2.0, 2.0),
        domain=tuple(domain),
        initial_point=WORKED_POINT,
        initial_frame=E0,
    )
    return synthesize(spec, steps)
