"""Real parts of the pencil spectrum and the final controllability verdict.

The eigenvalues of ``A + uB`` are ``(tr A + u tr B +/- sqrt(Delta(u))) / 2``.
Their real parts over the admissible controls form a subset of the Lyapunov
spectrum, and 0 in its interior is the last ingredient (besides the rank
condition and controllability on the projective line) of the sufficient
criteria implemented by :func:`controllability_verdict`.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .angular import ProjectiveVerdict, projective_controllable
from .delta import DeltaQuadratic, delta_quadratic
from .larc import DEFAULT_SEED, LarcVerdict, decide_larc
from .mat2 import Mat2, default_eps, zero_tol
from .system import ControlSet

DEFAULT_U_MAX = 1e3
DEFAULT_GRID_N = 2001

TRACE_NONZERO = "trace_nonzero"
TRACE_ZERO_PRODUCT_DISCRIMINANT = "trace_zero_product_discriminant"
BOUNDED_CONTROL_RANGE = "bounded_control_range"


def eigenvalues_of_pencil(a: Mat2, b: Mat2, u: float) -> tuple[complex, complex]:
    d = delta_quadratic(a, b)(u)
    s = a.trace() + u * b.trace()
    root = cmath.sqrt(d)
    pair = (0.5 * (s - root), 0.5 * (s + root))
    return tuple(sorted(pair, key=lambda z: (z.real, z.imag)))  # type: ignore[return-value]


def product_discriminant(a: Mat2, b: Mat2) -> float:
    """``tr(AB)^2 - 4 det(AB)``."""
    ab = a @ b
    return ab.trace() ** 2 - 4.0 * ab.det()


def trace_is_zero(b: Mat2, eps: float | None = None) -> bool:
    return abs(b.trace()) <= zero_tol(b, eps=eps)


def zero_in_interior_sigma_re(a: Mat2, b: Mat2, pcontrollable: bool,
                              eps: float | None = None) -> tuple[bool, str | None]:
    """Whether 0 is interior to the real-part spectrum over all real controls.

    Both tests presuppose that the projective system is controllable. With
    ``tr B != 0`` the answer is always yes; with ``tr B = 0`` it is yes
    exactly when ``tr(AB)^2 - 4 det(AB) > 0``.
    """
    if not pcontrollable:
        return False, None
    if not trace_is_zero(b, eps):
        return True, TRACE_NONZERO
    value = product_discriminant(a, b)
    return value > zero_tol(a, b, eps=eps, degree=4), TRACE_ZERO_PRODUCT_DISCRIMINANT


def _critical_controls(d: DeltaQuadratic, tr_b: float) -> list[float]:
    """Controls where ``tr(B)/2 +/- Delta'(u) / (4 sqrt(Delta))`` can vanish.

    Squaring gives ``(2 alpha u + beta)^2 = 4 tr(B)^2 Delta(u)``, a quadratic.
    """
    t2 = tr_b * tr_b
    qa = 4.0 * d.alpha * d.alpha - 4.0 * t2 * d.alpha
    qb = 4.0 * d.alpha * d.beta - 4.0 * t2 * d.beta
    qc = d.beta * d.beta - 4.0 * t2 * d.gamma
    if qa == 0.0:
        return [-qc / qb] if qb != 0.0 else []
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0:
        # double root smeared by rounding: keep the vertex
        return [-qb / (2.0 * qa)] if disc > -1e-12 * (qb * qb + abs(4.0 * qa * qc)) else []
    root = math.sqrt(disc)
    return [(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)]


def _real_part_branches(a: Mat2, b: Mat2, us: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = delta_quadratic(a, b)
    delta = (d.alpha * us + d.beta) * us + d.gamma
    half_s = 0.5 * (a.trace() + us * b.trace())
    spread = 0.5 * np.sqrt(np.maximum(delta, 0.0))
    return half_s - spread, half_s + spread


def sigma_re_range(a: Mat2, b: Mat2, control_set: ControlSet | None = None,
                   grid_n: int = DEFAULT_GRID_N, u_max: float = DEFAULT_U_MAX
                   ) -> list[tuple[float, float]]:
    """``{Re lambda_{1,2}(u)}`` over the controls as merged closed intervals.

    Unbounded control sets are clipped to ``[-u_max, u_max]``. Besides the
    grid, the window ends, the zeros of Delta and the stationary points of
    both branches are evaluated, so the extremes over the window are exact.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if control_set is None:
        control_set = ControlSet.reals()
    lo, hi = control_set.clip(u_max)
    d = delta_quadratic(a, b)
    extra = [lo, hi] + d.roots() + _critical_controls(d, b.trace())
    if abs(d.alpha) > 0:
        extra.append(-d.beta / (2.0 * d.alpha))
    us = np.concatenate([np.linspace(lo, hi, grid_n),
                         [u for u in extra if math.isfinite(u) and lo <= u <= hi]])
    low, high = _real_part_branches(a, b, us)
    spans = sorted([(float(low.min()), float(low.max())), (float(high.min()), float(high.max()))])
    merged = [spans[0]]
    for s_lo, s_hi in spans[1:]:
        if s_lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], s_hi))
        else:
            merged.append((s_lo, s_hi))
    return merged


def zero_strictly_inside(intervals, tol: float = 0.0) -> bool:
    return any(lo < -tol and hi > tol for lo, hi in intervals)


@dataclass(frozen=True)
class SpectrumSummary:
    trace_B: float
    re_range: list[tuple[float, float]]
    u_window: tuple[float, float]
    zero_in_interior: bool
    lemma_used: str | None
    product_discriminant: float


def spectrum_summary(a: Mat2, b: Mat2, control_set: ControlSet, pcontrollable: bool,
                     eps: float | None = None, grid_n: int = DEFAULT_GRID_N,
                     u_max: float = DEFAULT_U_MAX) -> SpectrumSummary:
    re_range = sigma_re_range(a, b, control_set, grid_n=grid_n, u_max=u_max)
    if control_set.is_reals:
        inside, tag = zero_in_interior_sigma_re(a, b, pcontrollable, eps=eps)
    else:
        tol = zero_tol(a, b, eps=eps)
        inside, tag = pcontrollable and zero_strictly_inside(re_range, tol), BOUNDED_CONTROL_RANGE
        if not pcontrollable:
            tag = None
    return SpectrumSummary(b.trace(), re_range, control_set.clip(u_max), inside, tag,
                           product_discriminant(a, b))


class Status(str, enum.Enum):
    CONTROLLABLE = "Controllable"
    NOT_CONTROLLABLE = "NotControllable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Reason:
    condition: str
    holds: bool
    evidence: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ControllabilityVerdict:
    status: Status
    reasons: list[Reason]
    criterion: str | None = None

    def reason(self, condition: str) -> Reason | None:
        return next((r for r in self.reasons if r.condition == condition), None)


LARC = "lie_algebra_rank_condition"
PROJECTIVE = "projective_controllability"
TRACE_B = "trace_B_nonzero"
PRODUCT_DISCRIMINANT = "product_discriminant_positive"
ZERO_INTERIOR = "zero_in_interior_sigma_re"


def controllability_verdict(
    a: Mat2,
    b: Mat2,
    control_set: ControlSet | None = None,
    eps: float | None = None,
    seed: int = DEFAULT_SEED,
    larc: LarcVerdict | None = None,
    projective: ProjectiveVerdict | None = None,
    spectrum: SpectrumSummary | None = None,
) -> ControllabilityVerdict:
    """Combine the necessary conditions with the sufficient spectrum tests.

    Precomputed stage results may be passed in to avoid recomputation; they
    must belong to the same ``(A, B, control_set)``.
    """
    if control_set is None:
        control_set = ControlSet.reals()
    if eps is None:
        eps = default_eps()
    reasons: list[Reason] = []

    if larc is None:
        larc = decide_larc(a, b, eps=eps, seed=seed)
    evidence = {"dim": larc.basis.dim, "decided_by": larc.decided_by}
    if larc.certificate is not None:
        evidence["certificate"] = larc.certificate.label
        evidence["certificate_indicator"] = larc.certificate.indicator
    if larc.failure_point is not None:
        evidence["failure_point"] = list(larc.failure_point.as_tuple())
    reasons.append(Reason(LARC, larc.holds, evidence))
    if not larc.holds:
        return ControllabilityVerdict(Status.NOT_CONTROLLABLE, reasons)

    if projective is None:
        projective = projective_controllable(a, b, control_set, eps=eps)
    reasons.append(Reason(PROJECTIVE, projective.controllable,
                          {"witness_u": projective.witness, "delta_case": projective.case_label}))
    if not projective.controllable:
        return ControllabilityVerdict(Status.NOT_CONTROLLABLE, reasons)

    if spectrum is None:
        spectrum = spectrum_summary(a, b, control_set, True, eps=eps)
    tr_b = b.trace()
    trace_nonzero = not trace_is_zero(b, eps)
    reasons.append(Reason(TRACE_B, trace_nonzero, {"trace_B": tr_b}))

    if not control_set.is_reals:
        holds = spectrum.zero_in_interior
        reasons.append(Reason(ZERO_INTERIOR, holds, {"re_range": [list(r) for r in spectrum.re_range]}))
        if holds:
            return ControllabilityVerdict(Status.CONTROLLABLE, reasons, BOUNDED_CONTROL_RANGE)
        return ControllabilityVerdict(Status.INCONCLUSIVE, reasons)

    if trace_nonzero:
        return ControllabilityVerdict(Status.CONTROLLABLE, reasons, TRACE_NONZERO)

    value = product_discriminant(a, b)
    positive = value > zero_tol(a, b, eps=eps, degree=4)
    reasons.append(Reason(PRODUCT_DISCRIMINANT, positive, {"value": value}))
    if positive:
        return ControllabilityVerdict(Status.CONTROLLABLE, reasons, TRACE_ZERO_PRODUCT_DISCRIMINANT)
    reasons.append(Reason(ZERO_INTERIOR, False, {"re_range": [list(r) for r in spectrum.re_range]}))
    return ControllabilityVerdict(Status.INCONCLUSIVE, reasons)
