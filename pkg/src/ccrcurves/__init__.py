"""Numerical toolkit for curves with constant curvature ratios (ccr-curves)."""

from .ccr import (
    CcrSpec,
    ConstantK1,
    FunctionK1,
    RationalSqrtK1,
    TableK1,
    TorusFitReport,
    TorusModel,
    frenet_matrix,
    indicatrix,
    synthesize,
    twisted,
    verify_torus,
    warp,
)
from .frenet import (
    AnalyticCurve,
    CurveSamples,
    FrenetData,
    RatioReport,
    curvature_profile,
    frenet_apparatus,
    ratio_analysis,
)
from .numkit import CcrError, NumericalError, RankDeficiencyError, ValidationError

__version__ = "0.1.0"

__all__ = [
    "AnalyticCurve",
    "CcrError",
    "CcrSpec",
    "ConstantK1",
    "CurveSamples",
    "FrenetData",
    "FunctionK1",
    "NumericalError",
    "RankDeficiencyError",
    "RatioReport",
    "RationalSqrtK1",
    "TableK1",
    "TorusFitReport",
    "TorusModel",
    "ValidationError",
    "curvature_profile",
    "frenet_apparatus",
    "frenet_matrix",
    "indicatrix",
    "ratio_analysis",
    "synthesize",
    "twisted",
    "verify_torus",
    "warp",
]
