"""Numerical substrate shared by the geometry modules.

Everything here is small, dense and deterministic: Gram-Schmidt with a
rank tolerance, the skew-symmetric tridiagonal eigenproblem solved by
Sturm bisection, invariant 2-planes, adaptive Simpson quadrature, a
fixed-step RK4 integrator and uniform-grid finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

RANK_TOL = 1e-12
GEOM_TOL = 1e-6
EPS = float(np.finfo(float).eps)


class CcrError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(CcrError, ValueError):
    """Bad input: violated precondition, malformed data, bad parameters."""


class NumericalError(CcrError, ArithmeticError):
    """A numerical procedure failed to reach its accuracy target."""


class RankDeficiencyError(NumericalError):
    """Derivatives or frame vectors are linearly dependent."""


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class SkewTridiag:
    """Skew-symmetric tridiagonal matrix with zero diagonal.

    ``offdiag[i]`` sits at position (i, i+1); position (i+1, i) holds its
    negative.
    """

    offdiag: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(b) for b in self.offdiag)
        if len(vals) < 1:
            raise ValidationError("need at least one off-diagonal entry (n >= 2)")
        if not all(math.isfinite(b) for b in vals):
            raise ValidationError("off-diagonal entries must be finite")
        object.__setattr__(self, "offdiag", vals)

    @property
    def n(self) -> int:
        return len(self.offdiag) + 1

    def matrix(self) -> np.ndarray:
        b = np.asarray(self.offdiag)
        return np.diag(b, 1) - np.diag(b, -1)

    def symmetric_surrogate(self) -> np.ndarray:
        b = np.asarray(self.offdiag)
        return np.diag(b, 1) + np.diag(b, -1)


@dataclass(frozen=True)
class Spectrum:
    frequencies: np.ndarray
    has_zero: bool

    @property
    def count(self) -> int:
        return len(self.frequencies)


@dataclass(frozen=True)
class PlaneBasis:
    """Orthonormal pair with ``F u = frequency * v`` and ``F v = -frequency * u``."""

    u: np.ndarray
    v: np.ndarray
    frequency: float

    def projector(self) -> np.ndarray:
        return np.outer(self.u, self.u) + np.outer(self.v, self.v)


# ---------------------------------------------------------------------------
# orthonormalization


def orthonormalize(vectors, tol: float = RANK_TOL) -> tuple[list[np.ndarray], int]:
    """Gram-Schmidt in input order, stopping at the first dependent vector.

    A vector counts as dependent when its residual norm, after removing the
    components along the previous outputs, drops below ``tol`` times its own
    norm. The returned list has ``rank`` entries spanning the first ``rank``
    inputs.
    """
    vecs = [np.asarray(v, dtype=float) for v in vectors]
    if not vecs:
        return [], 0
    n = vecs[0].shape[0]
    if any(v.shape != (n,) for v in vecs):
        raise ValidationError("all vectors must have the same dimension")
    if len(vecs) > n:
        raise ValidationError(f"at most {n} vectors in R^{n}")

    basis: list[np.ndarray] = []
    for v in vecs:
        scale = np.linalg.norm(v)
        if not np.isfinite(scale):
            raise ValidationError("non-finite vector component")
        w = v.copy()
        # two passes of modified Gram-Schmidt keep orthogonality at eps level
        for _ in range(2):
            for e in basis:
                w -= np.dot(e, w) * e
        r = np.linalg.norm(w)
        if scale == 0.0 or r <= tol * scale:
            break
        basis.append(w / r)
    return basis, len(basis)


def _cofactor_vector(rows: np.ndarray) -> np.ndarray:
    """Vector r with det([rows; r]) = |r|^2 and r orthogonal to every row.

    ``rows`` has shape (..., n-1, n).
    """
    n = rows.shape[-1]
    out = np.empty(rows.shape[:-2] + (n,))
    for i in range(n):
        minor = np.delete(rows, i, axis=-1)
        sign = -1.0 if (n - 1 + i) % 2 else 1.0
        out[..., i] = sign * (np.linalg.det(minor) if n > 1 else 1.0)
    return out


def complete_orientation(frame, tol: float = RANK_TOL) -> np.ndarray:
    """Unit vector completing ``frame`` (n-1 orthonormal rows) to a positive basis."""
    rows = np.atleast_2d(np.asarray(frame, dtype=float))
    m, n = rows.shape
    if m != n - 1:
        raise ValidationError(f"expected {n - 1} vectors in R^{n}, got {m}")
    gram = rows @ rows.T
    if np.max(np.abs(gram - np.eye(m))) > 1e-8:
        raise ValidationError("input frame is not orthonormal")
    r = _cofactor_vector(rows)
    norm = np.linalg.norm(r)
    if norm < tol:
        raise RankDeficiencyError("input frame is rank deficient")
    return r / norm


# ---------------------------------------------------------------------------
# skew-tridiagonal eigenproblem


def _sturm_count(beta2: Sequence[float], x: float, pivmin: float) -> int:
    """Number of eigenvalues < x of the zero-diagonal symmetric tridiagonal."""
    d = -x
    if abs(d) < pivmin:
        d = -pivmin
    count = 1 if d < 0.0 else 0
    for b2 in beta2:
        d = -x - b2 / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0.0:
            count += 1
    return count


def tridiag_frequencies(m: SkewTridiag) -> Spectrum:
    """Positive frequencies b with +-i b the nonzero eigenvalues of ``m``.

    ``F = i D S D^{-1}`` with ``D = diag(1, i, i^2, ...)`` and ``S`` the
    zero-diagonal symmetric tridiagonal with the same off-diagonals, so the
    frequencies are the positive eigenvalues of ``S``. These are bracketed
    by Sturm counts and bisected down to a few ulps.
    """
    beta = m.offdiag
    if any(b == 0.0 for b in beta):
        raise ValidationError(
            "zero off-diagonal entry: the curve lies in a lower-dimensional subspace"
        )
    n = m.n
    beta2 = [b * b for b in beta]
    absb = [abs(b) for b in beta] + [0.0]
    bound = max(absb[i] + (absb[i - 1] if i else 0.0) for i in range(n))
    pivmin = max(min(beta2), 1.0) * 1e-300 + EPS * EPS * max(beta2)
    half = n // 2
    freqs = []
    for k in range(n - half, n):
        lo, hi = 0.0, bound * (1.0 + 4 * EPS) + pivmin
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi or hi - lo <= 2.0 * EPS * hi:
                break
            if _sturm_count(beta2, mid, pivmin) <= k:
                lo = mid
            else:
                hi = mid
        freqs.append(0.5 * (lo + hi))
    return Spectrum(frequencies=np.array(freqs), has_zero=bool(n % 2))


def _near_null_space(N: np.ndarray, dim: int, tol: float) -> np.ndarray:
    """Orthonormal basis (dim, n) of the null space of symmetric ``N``.

    Two sweeps of shifted inverse iteration produce candidates; they are
    ranked by residual and fed through Gram-Schmidt.
    """
    n = N.shape[0]
    scale = max(np.max(np.abs(N)), 1.0)
    shift = 64 * EPS * scale
    A = N + shift * np.eye(n)
    try:
        X = np.linalg.solve(A, np.eye(n))
        X = np.linalg.solve(A, X / np.linalg.norm(X, axis=0))
    except np.linalg.LinAlgError:
        A = N + 1e3 * shift * np.eye(n)
        X = np.linalg.solve(A, np.eye(n))
    X = X / np.linalg.norm(X, axis=0)
    resid = np.linalg.norm(N @ X, axis=0)
    order = np.argsort(resid, kind="stable")
    basis: list[np.ndarray] = []
    for j in order:
        cand, rank = orthonormalize(basis + [X[:, j]], tol=1e-6)
        if rank == len(basis) + 1:
            basis = cand
        if len(basis) == dim:
            break
    if len(basis) < dim:
        raise NumericalError("could not isolate the invariant subspace")
    Q = np.array(basis)
    if np.max(np.linalg.norm(N @ Q.T, axis=0)) > tol * scale:
        raise NumericalError(
            "invariant subspace residual too large (near-degenerate frequencies)"
        )
    return Q


def invariant_planes(
    m: SkewTridiag, s: Spectrum | None = None, tol: float = 1e-9
) -> tuple[list[PlaneBasis], np.ndarray | None]:
    """Invariant 2-planes of ``m``, one per frequency, plus the kernel axis for odd n."""
    if s is None:
        s = tridiag_frequencies(m)
    F = m.matrix()
    n = m.n
    freqs = np.asarray(s.frequencies)
    if len(freqs) > 1:
        gaps = np.diff(freqs) / freqs[1:]
        if np.min(gaps) < 1e-9:
            raise NumericalError("frequencies too close to separate invariant planes")
    F2 = F @ F
    planes = []
    for b in freqs:
        Q = _near_null_space(F2 + b * b * np.eye(n), 2, tol)
        u = Q[0]
        v = F @ u / b
        v -= np.dot(u, v) * u
        v /= np.linalg.norm(v)
        planes.append(PlaneBasis(u=u, v=v, frequency=float(b)))
    axis = None
    if s.has_zero:
        axis = _near_null_space(F.T @ F, 1, tol)[0]
        k = int(np.argmax(np.abs(axis) > 1e-12))
        if axis[k] < 0:
            axis = -axis
    return planes, axis


def rotation_generator(plane: PlaneBasis) -> np.ndarray:
    """Skew matrix acting as ``frequency`` times a quarter turn on ``plane``."""
    u, v, b = plane.u, plane.v, plane.frequency
    return b * (np.outer(v, u) - np.outer(u, v))


# ---------------------------------------------------------------------------
# ODE integration and quadrature


def rk4_solve(
    field: Callable[[float, np.ndarray], np.ndarray],
    y0,
    interval: tuple[float, float],
    steps: int,
) -> np.ndarray:
    """Classical fixed-step RK4. Returns ``steps + 1`` states including both ends."""
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    a, b = map(float, interval)
    h = (b - a) / steps
    y = np.array(y0, dtype=float)
    out = np.empty((steps + 1,) + y.shape)
    out[0] = y
    for i in range(steps):
        t = a + i * h
        k1 = np.asarray(field(t, y))
        k2 = np.asarray(field(t + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(field(t + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(field(t + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NumericalError(f"non-finite state at step {i + 1}")
        out[i + 1] = y
    return out


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 40,
) -> float:
    """Adaptive Simpson quadrature to absolute tolerance ``tol``."""
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    if a > b:
        return -integrate(f, b, a, tol, max_depth)

    def ev(x):
        y = float(f(x))
        if not math.isfinite(y):
            raise NumericalError(f"integrand not finite at {x!r}")
        return y

    def simpson(lo, hi, flo, fm, fhi):
        return (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi)

    def recurse(lo, hi, flo, fm, fhi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = ev(lm), ev(rm)
        left = simpson(lo, mid, flo, flm, fm)
        right = simpson(mid, hi, fm, frm, fhi)
        delta = left + right - whole
        if abs(delta) <= max(15.0 * eps, floor):
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise NumericalError(
                f"adaptive Simpson did not reach tol={tol:g} on [{a:g}, {b:g}]"
            )
        return recurse(lo, mid, flo, flm, fm, left, eps / 2, depth + 1) + recurse(
            mid, hi, fm, frm, fhi, right, eps / 2, depth + 1
        )

    fa, fb, fm = ev(a), ev(b), ev(0.5 * (a + b))
    whole = simpson(a, b, fa, fm, fb)
    # halving eps at every level would demand accuracy below rounding on
    # deep subintervals (integrable endpoint singularities)
    floor = 16.0 * EPS * max(abs(whole), abs(fa) * (b - a), abs(fb) * (b - a))
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


# ---------------------------------------------------------------------------
# finite differences


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple[int, ...], order: int) -> tuple[float, ...]:
    """Exact finite-difference weights at 0 for the given integer offsets (Fornberg)."""
    x = [Fraction(o) for o in offsets]
    npts = len(x)
    if order >= npts:
        raise ValidationError("stencil too small for the requested order")
    c = [[Fraction(0)] * (order + 1) for _ in range(npts)]
    c[0][0] = Fraction(1)
    c1 = Fraction(1)
    for i in range(1, npts):
        c2 = Fraction(1)
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            for k in range(min(i, order), -1, -1):
                prev = c[i - 1][k - 1] if k else 0
                c[i][k] = c1 * (k * prev - x[i - 1] * c[i - 1][k]) / c2
            for k in range(min(i, order), -1, -1):
                prev = c[j][k - 1] if k else 0
                c[j][k] = (x[i] * c[j][k] - k * prev) / c3
        c1 = c2
    return tuple(float(c[i][order]) for i in range(npts))


def central_halfwidth(order: int, accuracy: int = 4) -> int:
    """Half-width of the central stencil of even ``accuracy`` for a derivative of ``order``."""
    return (order - 1) // 2 + accuracy // 2


def check_uniform(s) -> float:
    """Return the grid spacing, raising if ``s`` is not strictly increasing and uniform."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or len(s) < 2:
        raise ValidationError("grid must be one-dimensional with at least 2 points")
    d = np.diff(s)
    h = (s[-1] - s[0]) / (len(s) - 1)
    if np.any(d <= 0):
        raise ValidationError("grid must be strictly increasing")
    if np.max(np.abs(d - h)) > 1e-9 * h:
        raise ValidationError("grid is not uniform")
    return float(h)


def derivatives_from_samples(
    s, values, max_order: int, stride: int | Sequence[int] = 1, accuracy: int = 4
) -> tuple[np.ndarray, np.ndarray]:
    """Derivatives up to ``max_order`` of uniformly sampled values.

    Parameters
    ----------
    s : (m,) uniform grid
    values : (m,) or (m, n) samples
    max_order : highest derivative order
    stride : stencil spacing in grid steps, scalar or one per order. A
        stride above one trades truncation error for noise amplification
        on finely sampled data.
    accuracy : even order of accuracy of the stencils.

    Returns
    -------
    derivs : (max_order + 1, m, ...) array, ``derivs[0]`` the values
    boundary : (m,) bool, True where a one-sided stencil was used for
        some order; those samples are lower confidence.
    """
    h = check_uniform(s)
    y = np.asarray(values, dtype=float)
    m = y.shape[0]
    if max_order < 1:
        raise ValidationError("max_order must be >= 1")
    if accuracy < 2 or accuracy % 2:
        raise ValidationError("accuracy must be a positive even integer")
    if m < max_order + accuracy + 1:
        raise ValidationError(
            f"need at least {max_order + accuracy + 1} samples for order {max_order}, got {m}"
        )
    strides = [stride] * max_order if np.isscalar(stride) else list(stride)
    if len(strides) != max_order:
        raise ValidationError("one stride per derivative order required")

    out = np.empty((max_order + 1,) + y.shape)
    out[0] = y
    boundary = np.zeros(m, dtype=bool)
    idx = np.arange(m)
    for k in range(1, max_order + 1):
        p = central_halfwidth(k, accuracy)
        width = k + accuracy  # one-sided stencil length
        st = max(1, min(int(strides[k - 1]), (m - 1) // (width - 1)))
        hk = h * st
        acc = np.zeros_like(y)
        inner = (idx >= p * st) & (idx < m - p * st)
        w = fd_weights(tuple(range(-p, p + 1)), k)
        lo, hi = p * st, m - p * st
        if hi > lo:
            for off, wt in zip(range(-p, p + 1), w):
                acc[lo:hi] += wt * y[lo + off * st : hi + off * st]
        for i in idx[~inner]:
            # shift the window so that it stays inside the grid
            start = -(width // 2)
            start = max(start, -(i // st))
            start = min(start, (m - 1 - i) // st - (width - 1))
            offs = tuple(range(start, start + width))
            wts = fd_weights(offs, k)
            acc[i] = sum(wt * y[i + o * st] for o, wt in zip(offs, wts))
        out[k] = acc / hk**k
        boundary |= ~inner
    return out, boundary
