"""Intrinsic Frenet apparatus of unit-speed curves on S^3, the unit sphere in R^4.

With extrinsic frame e_1..e_4 and curvatures k_1, k_2, k_3 the intrinsic
quantities are

    t = e_1,   n = (k_1 e_2 + alpha) / kappa,   kappa = sqrt(k_1^2 - 1),
    tau = <n', b> = (k_1 k_2 / kappa) <e_3, b>.

Writing nu = <alpha, e_4>, the last expression equals k_1^2 k_2 |nu| / kappa^2
up to the orientation of b. ``IntrinsicData.tau`` holds the closed form
k_1^2 k_2 / kappa^2, which drops the factor |nu|, and ``tau_covariant`` holds
the covariant value. The two agree only where |<alpha, e_4>| = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import frenet
from .ccr import CcrSpec, synthesize
from .frenet import CONSTANCY_TOL, CurveSamples, FrenetData
from .numkit import ValidationError, _cofactor_vector, derivatives_from_samples

KAPPA_FLOOR = 1e-5
SPHERE_TOL = 1e-6
HELIX_TOL = 1e-4


def cross4(u, v, w) -> np.ndarray:
    """Vector orthogonal to u, v, w with det(u, v, w, r) = |r|^2.

    Its length is the 3-volume spanned by the inputs. Broadcasts over
    leading axes.
    """
    rows = np.stack(np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (u, v, w))), axis=-2)
    if rows.shape[-1] != 4:
        raise ValidationError("cross4 takes vectors in R^4")
    return _cofactor_vector(rows)


@dataclass
class IntrinsicData:
    """Per-sample intrinsic frame and curvatures.

    ``t, n, b`` have shape (m, 4); entries at geodesic samples are NaN.
    ``{t, n, b, alpha}`` is positively oriented.
    """

    s: np.ndarray
    alpha: np.ndarray
    t: np.ndarray
    n: np.ndarray
    b: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    tau_covariant: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    geodesic: np.ndarray
    boundary: np.ndarray

    @property
    def valid(self) -> np.ndarray:
        return ~(self.geodesic | self.boundary)


def intrinsic_apparatus(samples: CurveSamples, data: FrenetData | None = None,
                        sphere_tol: float = SPHERE_TOL) -> IntrinsicData:
    """Intrinsic frame, curvature and torsion of a curve sampled on S^3."""
    if samples.n != 4:
        raise ValidationError("intrinsic apparatus needs a curve in R^4")
    alpha = samples.points
    off = np.max(np.abs(np.linalg.norm(alpha, axis=1) - 1.0))
    if off > sphere_tol:
        raise ValidationError(f"curve leaves the unit sphere by {off:.3g}")
    if data is None:
        data = frenet.curvature_profile(samples)
    if np.max(np.abs(data.speed[~data.boundary] - 1.0)) > 1e-6:
        raise ValidationError("curve must be parametrized by arc length")
    E = data.frames
    k1, k2 = data.curvatures[:, 0], data.curvatures[:, 1]
    kappa = np.sqrt(np.maximum(k1 * k1 - 1.0, 0.0))
    geodesic = kappa < KAPPA_FLOOR
    with np.errstate(divide="ignore", invalid="ignore"):
        normal = k1[:, None] * E[:, 1] + alpha
        n = normal / np.linalg.norm(normal, axis=1)[:, None]
        t = E[:, 0]
        b = -cross4(alpha, t, n)  # det(t, n, b, alpha) = +1
        tau = k1 * k1 * k2 / (kappa * kappa)
        tau_cov = k1 * k2 / kappa * np.einsum("ij,ij->i", E[:, 2], b)
    n[geodesic] = np.nan
    b[geodesic] = np.nan
    tau[geodesic] = np.nan
    tau_cov[geodesic] = np.nan
    return IntrinsicData(
        s=data.s, alpha=alpha, t=t, n=n, b=b, kappa=kappa, tau=tau,
        tau_covariant=tau_cov, k1=k1, k2=k2, geodesic=geodesic,
        boundary=data.boundary.copy(),
    )


def covariant_residuals(data: IntrinsicData, stride: int = 4) -> np.ndarray:
    """Max norms of the three intrinsic Frenet equations per sample, (m, 3).

    The covariant derivative is the grid derivative with its alpha component
    removed; ``tau_covariant`` is used for the torsion.
    """
    s = data.s
    out = np.full((len(s), 3), np.nan)
    ok = data.valid
    idx = np.flatnonzero(ok)
    if len(idx) < 16:
        raise ValidationError("too few valid samples")
    sl = slice(idx[0], idx[-1] + 1)
    alpha = data.alpha[sl]

    def cov(v):
        d = derivatives_from_samples(s[sl], v, 1, stride=stride, accuracy=8)[0][1]
        return d - np.einsum("ij,ij->i", d, alpha)[:, None] * alpha

    t, n, b = data.t[sl], data.n[sl], data.b[sl]
    kap, tau = data.kappa[sl, None], data.tau_covariant[sl, None]
    r = np.stack([
        np.linalg.norm(cov(t) - kap * n, axis=1),
        np.linalg.norm(cov(n) + kap * t - tau * b, axis=1),
        np.linalg.norm(cov(b) + tau * n, axis=1),
    ], axis=1)
    out[sl] = r
    edge = 8 * stride
    out[: idx[0] + edge] = np.nan
    out[idx[-1] + 1 - edge:] = np.nan
    return out


@dataclass
class HelixVerdict:
    is_helix: bool
    b_estimate: float
    sign_branch: int
    residual: float


def helix_test(data: IntrinsicData, tol: float = HELIX_TOL, covariant: bool = True) -> HelixVerdict:
    """Test tau = 0 or tau = b kappa + sign for a constant b and sign = +-1.

    ``b`` is fitted by least squares on each branch; the residual is the max
    deviation relative to max |tau|. Equal residuals resolve to sign +1.
    """
    tau_all = data.tau_covariant if covariant else data.tau
    use = data.valid & np.isfinite(tau_all)
    kap, tau = data.kappa[use], tau_all[use]
    if len(tau) < 2:
        raise ValidationError("helix test needs at least two valid samples")
    scale = float(np.max(np.abs(tau)))
    if scale < tol:
        return HelixVerdict(True, 0.0, 1, scale)
    best = None
    for sign in (1, -1):
        b = float(kap @ (tau - sign) / (kap @ kap))
        res = float(np.max(np.abs(tau - b * kap - sign))) / scale
        if best is None or res < best.residual:
            best = HelixVerdict(res < tol, b, sign, res)
    return best


@dataclass
class PropositionReport:
    ccr: bool
    is_helix: bool
    constant_curvatures: bool
    implication_holds: bool
    ratio_spread: np.ndarray
    curvature_spread: np.ndarray
    helix: HelixVerdict


def proposition_harness(source, steps: int = 4000, tol: float = HELIX_TOL,
                        constancy_tol: float = CONSTANCY_TOL) -> PropositionReport:
    """Check that a spherical ccr intrinsic helix has constant curvatures.

    ``source`` is a CcrSpec (synthesized with ``steps``) or samples of a
    unit-speed curve on the unit sphere in R^4.
    """
    samples = synthesize(source, steps) if isinstance(source, CcrSpec) else source
    data = frenet.curvature_profile(samples)
    intr = intrinsic_apparatus(samples, data)
    ratios = frenet.ratio_analysis(data, tol=constancy_tol)
    helix = helix_test(intr, tol)
    use = ~data.boundary
    k = data.curvatures[use]
    spread = np.std(k, axis=0) / np.abs(np.mean(k, axis=0))
    constant = bool(np.all(spread < constancy_tol))
    ccr = ratios.is_ccr
    return PropositionReport(
        ccr=ccr,
        is_helix=helix.is_helix,
        constant_curvatures=constant,
        implication_holds=(not (ccr and helix.is_helix)) or constant,
        ratio_spread=np.asarray(ratios.spread),
        curvature_spread=spread,
        helix=helix,
    )
