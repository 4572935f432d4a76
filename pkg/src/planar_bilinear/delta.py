"""The eigenvalue discriminant of the pencil as a quadratic in the control.

``Delta(u) = tr(A + uB)^2 - 4 det(A + uB) = alpha u^2 + beta u + gamma`` and
its own discriminant is ``beta^2 - 4 alpha gamma = -16 det[A, B]``, so the
sign of ``det[A, B]`` together with the sign of ``alpha`` decides whether the
pencil ever has complex eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mat2 import Mat2, adjugate, bracket, char_discriminant, zero_tol

INF = math.inf

CASE_LABELS = ("A1", "A2", "B1", "B2", "C1_neg", "C1_nonneg", "C2_neg", "C2_pos")

Interval = tuple[float, float]


@dataclass(frozen=True)
class DeltaQuadratic:
    alpha: float
    beta: float
    gamma: float
    det_bracket: float
    # zero threshold for the coefficients and for det[A, B]
    coef_tol: float = 0.0
    bracket_tol: float = 0.0

    def __call__(self, u: float) -> float:
        return (self.alpha * u + self.beta) * u + self.gamma

    def discriminant(self) -> float:
        return self.beta * self.beta - 4.0 * self.alpha * self.gamma

    def roots(self) -> list[float]:
        """Real roots, ascending. Linear and constant degenerations included."""
        a, b, c = self.alpha, self.beta, self.gamma
        if abs(a) <= self.coef_tol:
            if abs(b) <= self.coef_tol:
                return []
            return [-c / b]
        disc = self.discriminant()
        if disc < 0:
            return []
        root = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(root, b if b != 0 else 1.0))
        r1 = q / a
        r2 = c / q if q != 0 else r1
        return sorted({r1, r2})


def delta_quadratic(a: Mat2, b: Mat2, eps: float | None = None) -> DeltaQuadratic:
    tr_a, tr_b = a.trace(), b.trace()
    return DeltaQuadratic(
        alpha=char_discriminant(b),
        beta=2.0 * (2.0 * (a @ b).trace() - tr_a * tr_b),
        gamma=char_discriminant(a),
        det_bracket=bracket(a, b).det(),
        coef_tol=zero_tol(a, b, eps=eps, degree=2),
        bracket_tol=zero_tol(a, b, eps=eps, degree=4),
    )


def delta_extremum(d: DeltaQuadratic) -> tuple[float, float] | None:
    """Vertex ``(u*, Delta(u*))``: a maximum if alpha < 0, a minimum if alpha > 0."""
    if abs(d.alpha) <= d.coef_tol or d.alpha == 0.0:
        return None
    u_star = -d.beta / (2.0 * d.alpha)
    return u_star, 4.0 * d.det_bracket / d.alpha


@dataclass(frozen=True)
class DeltaClassification:
    case_label: str
    exists_negative: bool
    negative_set: tuple[Interval, ...]
    a_complex: bool
    b_complex: bool
    b_repeated: bool
    trace_condition: bool
    margin: float

    def contains(self, u: float) -> bool:
        return any(lo < u < hi for lo, hi in self.negative_set)


def negative_set(d: DeltaQuadratic) -> tuple[Interval, ...]:
    """``{u : Delta(u) < 0}`` as disjoint open intervals."""
    tol = d.coef_tol
    if abs(d.alpha) <= tol:
        if abs(d.beta) <= tol:
            return ((-INF, INF),) if d.gamma < -tol else ()
        r = -d.gamma / d.beta
        return ((-INF, r),) if d.beta > 0 else ((r, INF),)
    roots = d.roots()
    if d.alpha > 0:
        if len(roots) == 2 and roots[0] < roots[1]:
            return ((roots[0], roots[1]),)
        return ()
    if not roots:
        return ((-INF, INF),)
    if len(roots) == 1:
        return ((-INF, roots[0]), (roots[0], INF))
    return ((-INF, roots[0]), (roots[1], INF))


def classify_exists_negative(d: DeltaQuadratic) -> DeltaClassification:
    """Sign classification by ``det[A,B]`` and ``alpha`` (cases A, B, C).

    The eigenvalue flags of the matrices are read off the coefficients:
    ``gamma < 0`` iff A has complex eigenvalues, ``alpha < 0`` iff B does,
    ``alpha = 0`` iff B has a repeated real eigenvalue, and ``beta = 0`` iff
    ``tr(adj(A) B) = tr(AB)``.
    """
    tol = d.coef_tol
    a_complex = d.gamma < -tol
    b_complex = d.alpha < -tol
    b_repeated = abs(d.alpha) <= tol
    trace_condition = abs(d.beta) <= tol

    if d.det_bracket < -d.bracket_tol:
        label, exists = ("A1" if b_repeated else "A2"), True
    elif d.det_bracket > d.bracket_tol:
        label, exists = ("B1", True) if d.alpha < 0 else ("B2", False)
    elif b_repeated:
        exists = trace_condition and a_complex
        label = "C1_neg" if exists else "C1_nonneg"
    else:
        exists = d.alpha < 0
        label = "C2_neg" if exists else "C2_pos"

    nset = negative_set(d) if exists else ()
    if exists and not nset:
        # tolerance routing said yes but the roots coincide; keep the vertex gap
        exists = False
    # small values mean the label sits next to a case boundary
    margin = min(abs(d.det_bracket), abs(d.alpha))
    return DeltaClassification(label, exists, nset, a_complex, b_complex, b_repeated,
                               trace_condition, margin)


def trace_identity_terms(a: Mat2, b: Mat2) -> tuple[float, float, float]:
    """``beta``, ``tr(adj(A)B) - tr(AB)`` and ``2 tr(AB) - tr(A) tr(B)``; all vanish together."""
    tab = (a @ b).trace()
    return (
        2.0 * (2.0 * tab - a.trace() * b.trace()),
        (adjugate(a) @ b).trace() - tab,
        2.0 * tab - a.trace() * b.trace(),
    )


def intersect(intervals, lo: float, hi: float) -> tuple[Interval, ...]:
    """Open intervals clipped to the closed control range ``[lo, hi]``."""
    out = []
    for a, b in intervals:
        left, right = max(a, lo), min(b, hi)
        if left < right:
            out.append((left, right))
    return tuple(out)

