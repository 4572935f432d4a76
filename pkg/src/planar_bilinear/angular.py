"""The induced flow on the projective line.

Writing a unit state as ``(cos t, sin t)`` turns ``x' = (A + uB) x`` into the
scalar equation ``theta' = (P cos 2theta + Q sin 2theta + R) / 2`` with
``P, Q, R`` affine in ``u``. Substituting ``v = tan(theta)`` gives the Riccati
equation ``v' = ((R - P) v^2 + 2 Q v + (R + P)) / 2``, which integrates in
closed form. The solution family splits into six cases by ``R - P``, ``Q``,
``P`` and ``Delta = P^2 + Q^2 - R^2``.

Closed forms are evaluated as a homogeneous pair ``(num, den)`` with
``v = num / den`` so that the passage of ``v`` through infinity (``theta``
crossing pi/2) is an ordinary point. Initial angles with ``|tan| > 1`` are
handled in the chart ``w = -cot(theta)``, where the same family applies with
``(P, Q, R) -> (-P, -Q, R)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .delta import classify_exists_negative, delta_quadratic, intersect
from .mat2 import Mat2, Vec2, default_eps
from .system import ControlSet

HALF_PI = 0.5 * math.pi

LINEAR_IN_V = "LinearInV"
AFFINE_DRIFT = "AffineDrift"
FROZEN = "Frozen"
DOUBLE_ROOT = "DoubleRoot"
TWO_REAL_ROOTS = "TwoRealRoots"
ROTATIONAL = "Rotational"
CASE_TAGS = (LINEAR_IN_V, AFFINE_DRIFT, FROZEN, DOUBLE_ROOT, TWO_REAL_ROOTS, ROTATIONAL)


class UnsupportedTime(ArithmeticError):
    """The closed form overflowed at the requested time."""


@dataclass(frozen=True)
class PqrCoefficients:
    P: float
    Q: float
    R: float
    S: float
    u: float = 0.0

    def scale(self) -> float:
        return max(abs(self.P), abs(self.Q), abs(self.R))


def pqr(a: Mat2, b: Mat2, u: float) -> PqrCoefficients:
    return PqrCoefficients(
        P=(a.a12 + a.a21) + u * (b.a12 + b.a21),
        Q=(a.a22 - a.a11) + u * (b.a22 - b.a11),
        R=(a.a21 - a.a12) + u * (b.a21 - b.a12),
        S=(a.a22 + a.a11) + u * (b.a22 + b.a11),
        u=u,
    )


def project_field(a: Mat2, s: Vec2, tol: float = 1e-9) -> Vec2:
    """Tangential part ``(A - s^T A s I) s`` of ``A s`` at a unit vector ``s``."""
    if abs(s.norm() - 1.0) > tol:
        raise ValueError(f"project_field needs a unit vector, |s| = {s.norm()}")
    As = a.apply(s)
    return As - s * s.dot(As)


def angular_rhs(c: PqrCoefficients, theta: float) -> float:
    return 0.5 * (c.P * math.cos(2.0 * theta) + c.Q * math.sin(2.0 * theta) + c.R)


def delta_of_pqr(c: PqrCoefficients) -> float:
    return c.P * c.P + c.Q * c.Q - c.R * c.R


@dataclass(frozen=True)
class AngularCase:
    tag: str
    parameters: dict = field(default_factory=dict)
    # distance of the deciding quantities from their zero thresholds
    margin: float = math.inf


def _tolerances(P: float, Q: float, R: float, eps: float | None) -> tuple[float, float]:
    if eps is None:
        eps = default_eps()
    scale = 1.0 + max(abs(P), abs(Q), abs(R))
    return eps * scale, eps * scale * scale


def _tag(P: float, Q: float, R: float, tol1: float, tol2: float) -> str:
    delta = P * P + Q * Q - R * R
    # checked first so that Delta < 0 can never land in an R = P case
    if delta < -tol2:
        return ROTATIONAL
    if abs(R - P) <= tol1:
        if abs(Q) > tol1:
            return LINEAR_IN_V
        if abs(P) > tol1:
            return AFFINE_DRIFT
        return FROZEN
    if abs(delta) <= tol2:
        return DOUBLE_ROOT
    return TWO_REAL_ROOTS


def classify_case(c: PqrCoefficients, eps: float | None = None) -> AngularCase:
    P, Q, R = c.P, c.Q, c.R
    tol1, tol2 = _tolerances(P, Q, R, eps)
    tag = _tag(P, Q, R, tol1, tol2)
    delta = P * P + Q * Q - R * R
    a = R - P
    if tag == LINEAR_IN_V:
        params = {"rate": Q, "equilibrium_v": -P / Q}
        margin = min(abs(Q) - tol1, tol1 - abs(a))
    elif tag == AFFINE_DRIFT:
        # R = P and Q = 0 for every control would force A, B lower triangular
        # with equal diagonals, and then the rank condition fails
        params = {"slope": P}
        margin = min(abs(P) - tol1, tol1 - abs(Q), tol1 - abs(a))
    elif tag == FROZEN:
        params = {}
        margin = tol1 - max(abs(P), abs(Q), abs(a))
    elif tag == DOUBLE_ROOT:
        params = {"R_minus_P": a, "equilibrium_v": -Q / a}
        margin = tol2 - abs(delta)
    elif tag == TWO_REAL_ROOTS:
        s = math.sqrt(delta)
        params = {"sqrt_delta": s, "equilibria_v": sorted(((-Q - s) / a, (-Q + s) / a))}
        margin = min(delta - tol2, abs(a) - tol1)
    else:
        w = math.sqrt(-delta)
        params = {"omega": w, "period": 2.0 * math.pi / w, "direction": 1 if R > 0 else -1}
        margin = -delta - tol2
    return AngularCase(tag, params, margin)


@dataclass(frozen=True)
class ProjectivePoint:
    """A line through the origin, as its angle in (-pi/2, pi/2]."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", reduce_angle(self.theta))

    @property
    def v(self) -> float:
        return math.inf if self.theta == HALF_PI else math.tan(self.theta)

    def distance(self, other: "ProjectivePoint | float") -> float:
        other_theta = other.theta if isinstance(other, ProjectivePoint) else other
        return projective_distance(self.theta, other_theta)


def reduce_angle(theta: float) -> float:
    """Representative of ``theta`` modulo pi in (-pi/2, pi/2]."""
    y = theta - math.pi * math.ceil((theta - HALF_PI) / math.pi)
    if y <= -HALF_PI:
        y += math.pi
    return y


def projective_distance(a: float, b: float) -> float:
    d = (a - b) % math.pi
    return min(d, math.pi - d)


def _chart_pair(P, Q, R, tag, v0, t):
    """Homogeneous ``(num, den)`` of ``v(t)`` for a finite start ``v0``."""
    a = R - P
    if tag == FROZEN:
        return v0, 1.0
    if tag == AFFINE_DRIFT:
        # v' = (R + P) / 2, which is P when R = P exactly
        return v0 + 0.5 * (R + P) * t, 1.0
    if tag == LINEAR_IN_V:
        c = 0.5 * (R + P)
        k = Q * v0 + c
        if Q * t <= 0.0:
            e = math.exp(Q * t)
            return k * e - c, Q
        e = math.exp(-Q * t)
        return k - c * e, Q * e
    z0 = a * v0 + Q
    if tag == DOUBLE_ROOT:
        # v = Q/(P - R) + 2/((P - R)(t + C1)) with denominators cleared
        g = 2.0 - z0 * t
        return 2.0 * z0 - Q * g, a * g
    if tag == TWO_REAL_ROOTS:
        s = math.sqrt(P * P + Q * Q - R * R)
        kn, kd = z0 - s, z0 + s  # (z - s)/(z + s) = (kn/kd) exp(s t)
        if s * t <= 0.0:
            e = math.exp(s * t)
            top, bot = kd + kn * e, kd - kn * e
        else:
            e = math.exp(-s * t)
            top, bot = kd * e + kn, kd * e - kn
        return s * top - Q * bot, a * bot
    raise ValueError(tag)


def _rotational_chart_angle(P, Q, R, v0, t):
    """Continuous angle in the chart for Delta < 0, counting passes through infinity."""
    a = R - P
    w = math.sqrt(R * R - P * P - Q * Q)
    c2 = math.atan((a * v0 + Q) / w)
    phi = 0.5 * w * t + c2
    k = math.floor((phi + HALF_PI) / math.pi)
    phi_r = phi - k * math.pi
    # v = (w tan(phi) - Q) / a on the principal branch of phi
    num = w * math.sin(phi_r) - Q * math.cos(phi_r)
    den = a * math.cos(phi_r)
    sgn = 1.0 if a > 0 else -1.0
    return math.atan2(num * sgn, abs(den)) + sgn * k * math.pi


def _chart_setup(c: PqrCoefficients, theta0: float):
    """Pick the chart in which ``|tan|`` of the start angle is at most 1."""
    base = reduce_angle(theta0)
    if abs(base) <= 0.25 * math.pi:
        return c.P, c.Q, c.R, base, 0.0
    # w = -cot(theta) = tan(theta - pi/2)
    shifted = reduce_angle(base - HALF_PI)
    return -c.P, -c.Q, c.R, shifted, HALF_PI


def angular_lift(c: PqrCoefficients, theta0: float, t: float, eps: float | None = None) -> float:
    """Closed-form solution as a continuous (unwrapped) angle with ``theta(0) = theta0``."""
    P, Q, R, phi0, _ = _chart_setup(c, theta0)
    tol1, tol2 = _tolerances(P, Q, R, eps)
    tag = _tag(P, Q, R, tol1, tol2)
    v0 = math.tan(phi0)
    try:
        if tag == ROTATIONAL:
            start = _rotational_chart_angle(P, Q, R, v0, 0.0)
            return theta0 + (_rotational_chart_angle(P, Q, R, v0, t) - start)
        num, den = _chart_pair(P, Q, R, tag, v0, t)
    except OverflowError as exc:
        raise UnsupportedTime(f"closed form overflowed at t={t}") from exc
    if not (math.isfinite(num) and math.isfinite(den)) or (num == 0.0 and den == 0.0):
        raise UnsupportedTime(f"closed form is not representable at t={t}")
    chart_theta = math.atan2(num, den)
    speed = angular_rhs(c, theta0)
    if speed == 0.0 or t == 0.0:
        return theta0
    forward = (speed > 0) == (t > 0)
    return theta0 + _travel(chart_theta - phi0, forward)


def _travel(diff: float, forward: bool) -> float:
    """Lift an angle change known modulo pi to the actual signed travel.

    Off the rotational case the motion is monotone and stops short of the
    next equilibrium, so the travel lies within one half-turn in the
    direction of motion. Values within 1e-12 of a half-turn are rounding
    around a start that is itself (almost) an equilibrium.
    """
    step = diff % math.pi
    if forward:
        return step if step < math.pi - 1e-12 else 0.0
    return step - math.pi if step > 1e-12 else 0.0


def solve_angular_closed_form(c: PqrCoefficients, theta0: float, t: float,
                              eps: float | None = None) -> ProjectivePoint:
    """Exact solution through ``theta(0) = theta0``, reduced to (-pi/2, pi/2]."""
    return ProjectivePoint(angular_lift(c, theta0, t, eps=eps))


def integration_constant(c: PqrCoefficients, v0: float, eps: float | None = None) -> dict:
    """The per-case constant fixing the solution through ``v(0) = v0``.

    ``C1`` (double root) and ``C2`` (rotational) follow the textbook
    antiderivatives. For two real roots the constant is returned as the ratio
    ``K = (z0 - s)/(z0 + s)``, ``z0 = (R - P) v0 + Q``, which also covers
    starts between the equilibria where its logarithm does not exist.
    """
    P, Q, R = c.P, c.Q, c.R
    tag = classify_case(c, eps).tag
    a = R - P
    if tag == DOUBLE_ROOT:
        denom = (P - R) * v0 - Q
        return {"C1": 2.0 / denom if denom else math.inf}
    if tag == ROTATIONAL:
        w = math.sqrt(-delta_of_pqr(c))
        return {"C2": math.atan((a * v0 + Q) / w)}
    if tag == TWO_REAL_ROOTS:
        s = math.sqrt(delta_of_pqr(c))
        z0 = a * v0 + Q
        return {"K": (z0 - s) / (z0 + s) if z0 + s else math.inf}
    if tag == LINEAR_IN_V:
        return {"amplitude": (Q * v0 + P) / Q}
    return {"v0": v0}


@dataclass(frozen=True)
class ProjectiveVerdict:
    controllable: bool
    witness: float | None
    intervals: tuple[tuple[float, float], ...]
    case_label: str


def _witness(interval: tuple[float, float]) -> float:
    lo, hi = interval
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(lo):
        return hi - 1.0
    if math.isinf(hi):
        return lo + 1.0
    return 0.5 * (lo + hi)


def projective_controllable(a: Mat2, b: Mat2, control_set: ControlSet | None = None,
                            eps: float | None = None) -> ProjectiveVerdict:
    """Whether some admissible constant control gives ``Delta(u) < 0``."""
    if control_set is None:
        control_set = ControlSet.reals()
    cls = classify_exists_negative(delta_quadratic(a, b, eps=eps))
    feasible = intersect(cls.negative_set, control_set.lo, control_set.hi)
    if not feasible:
        return ProjectiveVerdict(False, None, (), cls.case_label)
    return ProjectiveVerdict(True, _witness(feasible[0]), feasible, cls.case_label)
