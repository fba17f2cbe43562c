"""Explicit maximal symplectic ball packings of the complex projective plane.

The Fubini-Study form is normalized so that a projective line has area pi;
the standard form on C^n is sum dx_i ^ dy_i, so the ball B(r) has volume
pi^2 r^4 / 2 and CP^2 has volume pi^2 / 2.
"""

__version__ = "0.1.0"

from .projective import (
    CP2_VOLUME,
    FormDefect,
    ProjectivePoint,
    TangentVector,
    fubini_study,
    mc_volume,
    pullback_defect,
)
from .sampling import SampleCloud

__all__ = [
    "CP2_VOLUME",
    "FormDefect",
    "ProjectivePoint",
    "SampleCloud",
    "TangentVector",
    "fubini_study",
    "mc_volume",
    "pullback_defect",
]
