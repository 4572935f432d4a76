"""Lie algebra rank condition for ``x' = (A + uB) x`` on the punctured plane.

A pair of matrices ``(M, N)`` has *negative indicator* when
``tr(adj(M) N)^2 - 4 det(adj(M) N) < 0``; exactly then ``Mx`` and ``Nx`` are
independent at every ``x != 0``. The rank condition holds iff the system Lie
algebra contains such a pair.

The decision itself does not search for that pair. It looks at one
non-degenerate quadratic form ``x -> det(M_i x | M_j x)`` built from two basis
elements: off its (at most two) projective roots the rank is already 2, so
checking the rank at those roots decides the question. The certificate pair
is then searched separately and its absence never changes the verdict.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .mat2 import Mat2, Vec2, adjugate, bracket, col_det, default_eps, stack_vectors, zero_tol

# a bracket word: "A", "B", or a pair of words
Word = Union[str, tuple]

DEFAULT_SEED = 20240229
DEFAULT_RANDOM_TRIALS = 256


def word_str(word: Word) -> str:
    if isinstance(word, str):
        return word
    left, right = word
    return f"[{word_str(left)},{word_str(right)}]"


@dataclass(frozen=True)
class QuadraticForm:
    """``c0 x1^2 + c1 x1 x2 + c2 x2^2``."""

    c0: float
    c1: float
    c2: float

    def __call__(self, x: Vec2) -> float:
        return self.c0 * x.x1 * x.x1 + self.c1 * x.x1 * x.x2 + self.c2 * x.x2 * x.x2

    def discriminant(self) -> float:
        return self.c1 * self.c1 - 4.0 * self.c0 * self.c2

    def scale(self) -> float:
        return max(abs(self.c0), abs(self.c1), abs(self.c2))

    def is_zero(self, tol: float) -> bool:
        return self.scale() <= tol

    def projective_roots(self, tol: float) -> list[Vec2]:
        """Real projective roots as unit vectors, first nonzero coordinate positive.

        A discriminant within ``tol**2`` of zero (relative to the form's size)
        is treated as a double root.
        """
        disc = self.discriminant()
        size = self.scale()
        if disc < -tol * max(size, 1.0):
            return []
        if disc <= tol * max(size, 1.0):
            # a double root; a rounding-sized positive discriminant would
            # split it into two roots about sqrt(disc) away from the truth
            disc = 0.0
        if abs(self.c0) <= tol:
            raw = [Vec2(1.0, 0.0), Vec2(self.c2, -self.c1)]
        else:
            root = math.sqrt(disc)
            # stable pair of roots of c0 r^2 + c1 r + c2 with r = x1/x2
            qq = -0.5 * (self.c1 + math.copysign(root, self.c1 if self.c1 != 0 else 1.0))
            cand = [qq / self.c0]
            cand.append(self.c2 / qq if qq != 0.0 else qq / self.c0)
            raw = [Vec2(r, 1.0) for r in cand]
        roots: list[Vec2] = []
        for v in raw:
            if v.is_zero():
                continue
            u = _canonical_direction(v.unit())
            if not any(abs(col_det(u, w)) <= 1e-15 and u.dot(w) > 0 for w in roots):
                roots.append(u)
        return roots


def _canonical_direction(x: Vec2) -> Vec2:
    if x.x1 < 0 or (x.x1 == 0 and x.x2 < 0):
        return Vec2(-x.x1, -x.x2)
    return x


def independence_form(a: Mat2, b: Mat2) -> QuadraticForm:
    """Coefficients of ``x -> det(Ax | Bx)``."""
    a1, a2 = a.col(0), a.col(1)
    b1, b2 = b.col(0), b.col(1)
    return QuadraticForm(col_det(a1, b1), col_det(a1, b2) + col_det(a2, b1), col_det(a2, b2))


def indicator(a: Mat2, b: Mat2) -> float:
    """``tr^2(adj(A) B) - 4 det(adj(A) B)``; negative iff Ax, Bx never align."""
    m = adjugate(a) @ b
    tr = m.trace()
    return tr * tr - 4.0 * m.det()


@dataclass(frozen=True)
class LieAlgebraBasis:
    generators: tuple[Mat2, ...]
    words: tuple[Word, ...]

    @property
    def dim(self) -> int:
        return len(self.generators)

    def word_labels(self) -> list[str]:
        return [word_str(w) for w in self.words]

    def vectors(self) -> np.ndarray:
        return stack_vectors(self.generators)

    def coordinates(self, m: Mat2) -> np.ndarray:
        """Least-squares coordinates of ``m`` in the generators."""
        if self.dim == 0:
            return np.zeros(0)
        coef, *_ = np.linalg.lstsq(self.vectors().T, np.array(m.as_vector()), rcond=None)
        return coef

    def combine(self, coef) -> Mat2:
        vec = np.asarray(coef, dtype=float) @ self.vectors() if self.dim else np.zeros(4)
        return Mat2(*map(float, vec))

    def residual(self, m: Mat2) -> float:
        """Distance from ``m`` to the span, in the Frobenius norm."""
        if self.dim == 0:
            return m.norm_fro()
        back = self.combine(self.coordinates(m))
        return (m - back).norm_fro()


def generate_lie_algebra(a: Mat2, b: Mat2, eps: float | None = None) -> LieAlgebraBasis:
    """Breadth-first bracket closure of ``{A, B}`` inside gl(2, R)."""
    if eps is None:
        eps = default_eps()
    gens: list[Mat2] = []
    words: list[Word] = []
    ortho: list[np.ndarray] = []

    def adjoin(m: Mat2, word: Word) -> bool:
        v = np.array(m.as_vector())
        r = v.copy()
        for _ in range(2):  # re-orthogonalise once for stability
            for q in ortho:
                r -= (q @ r) * q
        rn = float(np.linalg.norm(r))
        if rn <= eps * (1.0 + float(np.linalg.norm(v))):
            return False
        ortho.append(r / rn)
        gens.append(m)
        words.append(word)
        return True

    adjoin(a, "A")
    adjoin(b, "B")
    pending = list(itertools.combinations(range(len(gens)), 2))
    while pending and len(gens) < 4:
        i, j = pending.pop(0)
        if adjoin(bracket(gens[i], gens[j]), (words[i], words[j])):
            k = len(gens) - 1
            pending.extend((m, k) for m in range(k))
    return LieAlgebraBasis(tuple(gens), tuple(words))


def _rank_tol_scale(columns: np.ndarray) -> float:
    return 1.0 + (float(np.abs(columns).max()) if columns.size else 0.0)


def rank_at(basis: LieAlgebraBasis, x: Vec2, eps: float | None = None) -> int:
    """Dimension of ``span{M x : M in basis}`` (0, 1 or 2)."""
    if x.is_zero():
        raise ValueError("rank_at is undefined at x = 0")
    if eps is None:
        eps = default_eps()
    if basis.dim == 0:
        return 0
    cols = np.array([m.apply(x).as_tuple() for m in basis.generators]).T
    sv = np.linalg.svd(cols, compute_uv=False)
    tol = eps * _rank_tol_scale(cols)
    return int(np.count_nonzero(sv > tol))


@dataclass(frozen=True)
class Certificate:
    """A pair in the Lie algebra with negative indicator."""

    first: Mat2
    second: Mat2
    first_coords: tuple[float, ...]
    second_coords: tuple[float, ...]
    indicator: float
    source: str  # "basis", "shortcut" or "random"
    label: str


@dataclass(frozen=True)
class LarcVerdict:
    holds: bool
    basis: LieAlgebraBasis
    certificate: Certificate | None = None
    failure_point: Vec2 | None = None
    certificate_found: bool = False
    decided_by: str = ""
    checked_roots: tuple[Vec2, ...] = field(default_factory=tuple)


def shortcut_products(a: Mat2, b: Mat2) -> tuple[float, float]:
    """``det(A) det[A,B]`` and ``det(B) det[A,B]``; either > 0 implies the rank condition."""
    db = bracket(a, b).det()
    return a.det() * db, b.det() * db


def canonical_pair_indicators(a: Mat2, b: Mat2) -> list[tuple[str, str, float]]:
    """Indicators of the pairs built from the words up to depth two."""
    ab = bracket(a, b)
    named = {
        "A": a,
        "B": b,
        "[A,B]": ab,
        "[A,[A,B]]": bracket(a, ab),
        "[B,[A,B]]": bracket(b, ab),
    }
    pairs = [
        ("A", "B"),
        ("A", "[A,B]"),
        ("B", "[A,B]"),
        ("A", "[A,[A,B]]"),
        ("B", "[A,[A,B]]"),
        ("A", "[B,[A,B]]"),
        ("B", "[B,[A,B]]"),
        ("[A,B]", "[A,[A,B]]"),
        ("[A,B]", "[B,[A,B]]"),
    ]
    return [(p, q, indicator(named[p], named[q])) for p, q in pairs]


def find_certificate(
    a: Mat2,
    b: Mat2,
    basis: LieAlgebraBasis,
    eps: float | None = None,
    seed: int = DEFAULT_SEED,
    trials: int = DEFAULT_RANDOM_TRIALS,
) -> Certificate | None:
    """Look for a negative-indicator pair: basis pairs, shortcuts, then random mixes."""
    if eps is None:
        eps = default_eps()
    labels = basis.word_labels()
    dim = basis.dim

    def accept(m: Mat2, n: Mat2, cm, cn, source: str, label: str) -> Certificate | None:
        value = indicator(m, n)
        if value < -zero_tol(m, n, eps=eps, degree=4):
            return Certificate(m, n, tuple(map(float, cm)), tuple(map(float, cn)),
                               value, source, label)
        return None

    eye = np.eye(dim)
    for i, j in itertools.combinations(range(dim), 2):
        cert = accept(basis.generators[i], basis.generators[j], eye[i], eye[j],
                      "basis", f"({labels[i]}, {labels[j]})")
        if cert is not None:
            return cert

    ab = bracket(a, b)
    for m, name in ((a, "A"), (b, "B")):
        if m.det() * ab.det() > 0:
            cert = accept(m, ab, basis.coordinates(m), basis.coordinates(ab),
                          "shortcut", f"({name}, [A,B])")
            if cert is not None:
                return cert

    if dim < 2:
        return None
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        cm = rng.standard_normal(dim)
        cn = rng.standard_normal(dim)
        cert = accept(basis.combine(cm), basis.combine(cn), cm, cn, "random", "random combination")
        if cert is not None:
            return cert
    return None


def decide_larc(
    a: Mat2,
    b: Mat2,
    eps: float | None = None,
    seed: int = DEFAULT_SEED,
    trials: int = DEFAULT_RANDOM_TRIALS,
) -> LarcVerdict:
    """Decide the rank condition and attach a certificate or a failure point."""
    if eps is None:
        eps = default_eps()
    basis = generate_lie_algebra(a, b, eps=eps)

    if basis.dim <= 1:
        point = Vec2(1.0, 0.0)
        if basis.dim == 1:
            m = basis.generators[0]
            kernel = _kernel_direction(m, eps)
            if kernel is not None:
                point = kernel
        return LarcVerdict(False, basis, failure_point=point, decided_by="dimension")

    forms = []
    for i, j in itertools.combinations(range(basis.dim), 2):
        m, n = basis.generators[i], basis.generators[j]
        q = independence_form(m, n)
        tol = zero_tol(m, n, eps=eps, degree=2)
        if not q.is_zero(tol):
            forms.append((q, tol, i, j))
    if not forms:
        return LarcVerdict(False, basis, failure_point=Vec2(1.0, 0.0), decided_by="all forms vanish")

    definite = [f for f in forms if f[0].discriminant() < -f[1] * max(f[0].scale(), 1.0)]
    if definite:
        q, tol, i, j = min(definite, key=lambda f: f[0].discriminant() / max(f[0].scale(), 1e-300) ** 2)
        m, n = basis.generators[i], basis.generators[j]
        eye = np.eye(basis.dim)
        labels = basis.word_labels()
        cert = Certificate(m, n, tuple(map(float, eye[i])), tuple(map(float, eye[j])),
                           indicator(m, n), "basis", f"({labels[i]}, {labels[j]})")
        if cert.indicator >= 0:  # tolerance disagreement between the two formulas
            cert = find_certificate(a, b, basis, eps=eps, seed=seed, trials=trials)
        return LarcVerdict(True, basis, certificate=cert, certificate_found=cert is not None,
                           decided_by="definite form")

    # every failure point is a common root of all forms; simple roots are the
    # best conditioned, so look at the form whose roots are furthest apart
    q, tol, _, _ = max(forms, key=lambda f: (f[0].discriminant() / f[0].scale() ** 2, f[0].scale() / f[1]))
    roots = q.projective_roots(tol)
    for x in roots:
        if rank_at(basis, x, eps=eps) <= 1:
            return LarcVerdict(False, basis, failure_point=x, decided_by="rank at root",
                               checked_roots=tuple(roots))

    cert = find_certificate(a, b, basis, eps=eps, seed=seed, trials=trials)
    return LarcVerdict(True, basis, certificate=cert, certificate_found=cert is not None,
                       decided_by="rank at roots", checked_roots=tuple(roots))


def _kernel_direction(m: Mat2, eps: float) -> Vec2 | None:
    """Unit kernel direction of a singular ``m``, else None."""
    if abs(m.det()) > zero_tol(m, eps=eps, degree=2):
        return None
    # kernel of a rank-1 matrix is orthogonal to its largest row
    r1, r2 = Vec2(m.a11, m.a12), Vec2(m.a21, m.a22)
    row = r1 if r1.norm() >= r2.norm() else r2
    if row.norm() == 0.0:
        return Vec2(1.0, 0.0)
    return _canonical_direction(Vec2(-row.x2, row.x1).unit())
