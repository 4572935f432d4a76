"""Controllability analysis of planar bilinear systems ``x' = (A + uB) x``.

The package decides the Lie algebra rank condition (with a certificate pair
or a failure point), controllability of the induced flow on the projective
line, and the trace and spectrum based sufficient criteria, and it simulates
both flows under piecewise-constant controls.
"""

__version__ = "0.1.0"

from .angular import (
    AngularCase,
    PqrCoefficients,
    ProjectivePoint,
    ProjectiveVerdict,
    angular_lift,
    angular_rhs,
    classify_case,
    pqr,
    project_field,
    projective_controllable,
    solve_angular_closed_form,
)
from .delta import DeltaClassification, DeltaQuadratic, classify_exists_negative, delta_quadratic, negative_set
from .larc import (
    LarcVerdict,
    LieAlgebraBasis,
    QuadraticForm,
    decide_larc,
    generate_lie_algebra,
    independence_form,
    indicator,
    rank_at,
)
from .mat2 import Mat2, Vec2, adjugate, bracket, char_discriminant, det_pencil, eigenvalues
from .sim import (
    ControlSchedule,
    StepTooLarge,
    Trajectory,
    consistency_planar_vs_angular,
    integrate_angular,
    integrate_planar,
    reach_angle,
)
from .spectrum import (
    ControllabilityVerdict,
    SpectrumSummary,
    Status,
    controllability_verdict,
    eigenvalues_of_pencil,
    sigma_re_range,
    zero_in_interior_sigma_re,
)
from .system import BilinearSystem, ControlSet
