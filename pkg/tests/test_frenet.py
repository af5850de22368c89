import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from ccrcurves import frenet
from ccrcurves.frenet import AnalyticCurve, CurveSamples
from ccrcurves.numkit import RankDeficiencyError, ValidationError

t_sym = sp.Symbol("t", real=True)


def gram_curvatures(expr, n):
    """Unsigned k_1..k_{n-1} from Gram determinants G_i of alpha', ..., alpha^(i).

    k_i = sqrt(G_{i-1} G_{i+1}) / (G_i |alpha'|), with G_0 = 1.
    """
    derivs = [sp.diff(expr, t_sym, k) for k in range(1, n + 1)]

    def gram(i):
        if i == 0:
            return sp.Integer(1)
        M = sp.Matrix([[derivs[a].dot(derivs[b]) for b in range(i)] for a in range(i)])
        return M.det()

    speed = sp.sqrt(derivs[0].dot(derivs[0]))
    return [sp.sqrt(gram(i - 1) * gram(i + 1)) / (gram(i) * speed) for i in range(1, n)]


def sympy_curve(expr, n):
    fns = [sp.lambdify(t_sym, list(sp.diff(expr, t_sym, k)), "math") for k in range(n + 1)]
    return AnalyticCurve(
        point=lambda t: np.array(fns[0](t), dtype=float).ravel(),
        dimension=n,
        derivatives=[(lambda f: lambda t: np.array(f(t), dtype=float).ravel())(f) for f in fns[1:]],
    )


class TestAnalyticCurves:
    def test_circle_radius_two(self):
        c = AnalyticCurve(lambda s: [2 * math.cos(s / 2), 2 * math.sin(s / 2)], 2)
        p = frenet.frenet_apparatus(c, 0.3)
        assert abs(p.curvatures[0] - 0.5) < 1e-8
        assert abs(p.speed - 1.0) < 1e-8

    @pytest.mark.parametrize("a,b", [(1.0, 1.0), (2.0, 0.5), (0.3, 1.7)])
    def test_helix_against_symbolic(self, a, b):
        expr = sp.Matrix([a * sp.cos(t_sym), a * sp.sin(t_sym), b * t_sym])
        curve = sympy_curve(expr, 3)
        p = frenet.frenet_apparatus(curve, 0.4)
        assert np.allclose(p.curvatures, [a / (a * a + b * b), b / (a * a + b * b)], atol=1e-12)

    def test_helix_without_derivative_oracles(self):
        c = AnalyticCurve(lambda t: [math.cos(t), math.sin(t), t], 3)
        p = frenet.frenet_apparatus(c, 1.0)
        assert np.allclose(p.curvatures, [0.5, 0.5], atol=1e-6)

    def test_r4_curve_against_gram_determinants(self):
        expr = sp.Matrix([sp.cos(t_sym), 2 * sp.sin(t_sym), sp.cos(3 * t_sym), t_sym**2 / 3])
        curve = sympy_curve(expr, 4)
        ks = gram_curvatures(expr, 4)
        for t in (0.3, 1.1, 2.0):
            p = frenet.frenet_apparatus(curve, t)
            exact = [float(k.subs(t_sym, t)) for k in ks]
            assert np.allclose(np.abs(p.curvatures), exact, rtol=1e-9)
            assert abs(np.linalg.det(p.frame) - 1.0) < 1e-10

    def test_outside_domain(self):
        c = AnalyticCurve(lambda s: [s, s * s], 2, domain=(0.0, 1.0))
        with pytest.raises(ValidationError):
            frenet.frenet_apparatus(c, 2.0)

    def test_straight_line_rank_deficient(self):
        c = AnalyticCurve(lambda s: [s, 2 * s, 3 * s], 3, derivatives=[lambda s: [1, 2, 3], lambda s: [0, 0, 0], lambda s: [0, 0, 0]])
        with pytest.raises(RankDeficiencyError):
            frenet.frenet_apparatus(c, 0.0)


class TestSamples:
    def test_grid_validation(self):
        with pytest.raises(ValidationError):
            CurveSamples(np.array([0.0, 1.0, 1.5]), np.zeros((3, 2)))
        with pytest.raises(ValidationError):
            CurveSamples(np.linspace(0, 1, 4), np.full((4, 2), np.nan))

    def test_unit_circle_curvature(self):
        s = np.linspace(0, 2 * math.pi, 100)
        c = CurveSamples(s, np.c_[np.cos(s), np.sin(s)], arclength=True)
        d = frenet.curvature_profile(c)
        assert np.max(np.abs(d.curvatures[:, 0] - 1.0)) < 1e-8

    def test_straight_line_error(self):
        s = np.linspace(0, 1, 200)
        with pytest.raises(RankDeficiencyError):
            frenet.curvature_profile(CurveSamples(s, np.outer(s, [1.0, 2.0, 3.0])))

    def test_too_few_samples(self):
        s = np.linspace(0, 1, 10)
        with pytest.raises(ValidationError):
            frenet.curvature_profile(CurveSamples(s, np.c_[np.cos(s), np.sin(s)]))

    def test_k1_of_spherical_example(self, worked_frenet):
        s = worked_frenet.s
        inner = (~worked_frenet.boundary) & (np.abs(s) <= 0.4)
        k1 = worked_frenet.curvatures[inner, 0]
        assert np.max(np.abs(k1 - 2 / np.sqrt(1 - 4 * s[inner] ** 2))) < 1e-5
        j = np.argmin(np.abs(s))
        assert abs(worked_frenet.curvatures[j, 0] - 2.0) < 1e-8

    def test_frames_orthonormal_positive(self, worked_frenet):
        E = worked_frenet.frames
        gram = np.einsum("mij,mkj->mik", E, E)
        assert np.max(np.abs(gram - np.eye(4))) < 1e-8
        assert np.max(np.abs(np.linalg.det(E) - 1.0)) < 1e-8
        assert np.all(worked_frenet.curvatures[:, :2] > 0)

    def test_reparametrization_invariance(self):
        # helix by arc length versus the same helix at parameter u with s = u + u^3/10
        a, b = 1.0, 0.5
        w = math.hypot(a, b)
        helix = lambda s: np.c_[a * np.cos(s / w), a * np.sin(s / w), b * s / w]  # noqa: E731
        u = np.linspace(0.0, 3.0, 3001)
        s_of_u = u + u**3 / 10
        arc = frenet.curvature_profile(CurveSamples(u, helix(u), arclength=True))
        rep = frenet.curvature_profile(CurveSamples(u, helix(s_of_u)))
        inner = ~(arc.boundary | rep.boundary)
        assert np.max(np.abs(arc.curvatures[inner] - rep.curvatures[inner])) < 1e-5
        assert np.allclose(rep.speed[inner], 1 + 3 * u[inner] ** 2 / 10, atol=1e-6)

    @given(st.floats(0.2, 3.0), st.floats(0.2, 3.0))
    def test_helix_family_oracle(self, a, b):
        w = math.hypot(a, b)
        s = np.linspace(0, 6, 1500)
        c = CurveSamples(s, np.c_[a * np.cos(s / w), a * np.sin(s / w), b * s / w], arclength=True)
        d = frenet.curvature_profile(c)
        inner = ~d.boundary
        assert np.allclose(d.curvatures[inner], [a / w**2, b / w**2], atol=1e-6)


class TestRatios:
    def test_spherical_example(self, worked_frenet):
        r = frenet.ratio_analysis(worked_frenet)
        assert r.is_ccr
        assert np.allclose(r.ratios, [0.5, math.sqrt(3) / 2], atol=1e-6)

    def test_constant_curvature_torus_geodesic(self):
        s = np.linspace(0, 10, 3000)
        r1, r2, m1, m2 = 1.0, 2.0, 1.0, 3.0
        N = math.hypot(r1, r2)
        P = np.c_[r1 / m1 * np.sin(m1 * s), -r1 / m1 * np.cos(m1 * s),
                  r2 / m2 * np.sin(m2 * s), -r2 / m2 * np.cos(m2 * s)] / N
        r = frenet.ratio_analysis(frenet.curvature_profile(CurveSamples(s, P, arclength=True)))
        assert r.is_ccr

    def test_moment_curve_not_ccr(self):
        c = frenet.arclength_resample(
            AnalyticCurve(lambda t: [t, t * t, t**3, t**4], 4), 0.5, 1.5, 1500,
            derivative=lambda t: np.array([1, 2 * t, 3 * t * t, 4 * t**3]),
        )
        r = frenet.ratio_analysis(frenet.curvature_profile(c))
        assert not r.verdicts.all()


class TestResidual:
    def test_unit_circle(self):
        c = AnalyticCurve(lambda s: [math.cos(s), math.sin(s)], 2,
                          derivatives=[lambda s: [-math.sin(s), math.cos(s)],
                                       lambda s: [-math.cos(s), -math.sin(s)]])
        assert frenet.frenet_residual(c, 0.7) < 1e-8

    def test_helix(self):
        c = AnalyticCurve(lambda t: [math.cos(t), math.sin(t), t], 3)
        assert frenet.frenet_residual(c, 0.5) < 1e-6

    def test_noisy_samples_report(self):
        rng = np.random.default_rng(3)
        s = np.linspace(0, 6, 600)
        P = np.c_[np.cos(s), np.sin(s), 0.5 * s] + 1e-3 * rng.normal(size=(600, 3))
        r = frenet.frenet_residual(CurveSamples(s, P), 3.0)
        assert np.isfinite(r) and r >= 0
