"""Exact 2x2 matrix kernel.

Every other module works with :class:`Mat2` and :class:`Vec2` values. The
operations here are closed-form scalar arithmetic; nothing is delegated to
general-purpose linear algebra because every object is 2x2.

Zero tests follow one policy throughout the package: a quantity is zero when
its magnitude is at most ``eps * (1 + |A|_max + |B|_max) ** degree``, where
``degree`` is the polynomial degree of the quantity in the matrix entries.
The default ``eps`` is ``1e-9`` and can be overridden with the
``PLANAR_BILINEAR_TOL`` environment variable.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_EPS = 1e-9


def default_eps() -> float:
    """Zero-test epsilon, honouring ``PLANAR_BILINEAR_TOL`` if set."""
    raw = os.environ.get("PLANAR_BILINEAR_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_EPS
    value = float(raw)
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"PLANAR_BILINEAR_TOL must be a positive finite number, got {raw!r}")
    return value


@dataclass(frozen=True, slots=True)
class Vec2:
    x1: float
    x2: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError(f"Vec2 entries must be finite, got ({self.x1}, {self.x2})")

    @classmethod
    def of(cls, values: Sequence[float]) -> "Vec2":
        x1, x2 = values
        return cls(float(x1), float(x2))

    def norm(self) -> float:
        return math.hypot(self.x1, self.x2)

    def dot(self, other: "Vec2") -> float:
        return self.x1 * other.x1 + self.x2 * other.x2

    def is_zero(self) -> bool:
        return self.x1 == 0.0 and self.x2 == 0.0

    def unit(self) -> "Vec2":
        m = max(abs(self.x1), abs(self.x2))
        if m == 0.0:
            raise ValueError("cannot normalise the zero vector")
        # rescale first: the norm of a subnormal vector is itself inexact
        y1, y2 = self.x1 / m, self.x2 / m
        n = math.hypot(y1, y2)
        return Vec2(y1 / n, y2 / n)

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x1 - other.x1, self.x2 - other.x2)

    def __mul__(self, c: float) -> "Vec2":
        return Vec2(c * self.x1, c * self.x2)

    __rmul__ = __mul__

    def to_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2])

    def as_tuple(self) -> tuple[float, float]:
        return (self.x1, self.x2)


@dataclass(frozen=True, slots=True)
class Mat2:
    """Row-major 2x2 real matrix ``[[a11, a12], [a21, a22]]``."""

    a11: float
    a12: float
    a21: float
    a22: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a11, self.a12, self.a21, self.a22)):
            raise ValueError(f"Mat2 entries must be finite, got {self.rows()}")

    @classmethod
    def of(cls, rows: Sequence[Sequence[float]] | np.ndarray) -> "Mat2":
        """Build from nested rows, e.g. ``Mat2.of([[2, -1], [0, 1]])``."""
        arr = np.asarray(rows, dtype=float)
        if arr.shape != (2, 2):
            raise ValueError(f"expected a 2x2 array, got shape {arr.shape}")
        return cls(float(arr[0, 0]), float(arr[0, 1]), float(arr[1, 0]), float(arr[1, 1]))

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def zero(cls) -> "Mat2":
        return cls(0.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_columns(cls, c1: Vec2, c2: Vec2) -> "Mat2":
        return cls(c1.x1, c2.x1, c1.x2, c2.x2)

    def rows(self) -> list[list[float]]:
        return [[self.a11, self.a12], [self.a21, self.a22]]

    def to_array(self) -> np.ndarray:
        return np.array(self.rows())

    def as_vector(self) -> tuple[float, float, float, float]:
        """Coordinates in the 4-dimensional space gl(2, R)."""
        return (self.a11, self.a12, self.a21, self.a22)

    def col(self, j: int) -> Vec2:
        if j == 0:
            return Vec2(self.a11, self.a21)
        if j == 1:
            return Vec2(self.a12, self.a22)
        raise IndexError(j)

    @property
    def T(self) -> "Mat2":
        return Mat2(self.a11, self.a21, self.a12, self.a22)

    def trace(self) -> float:
        return self.a11 + self.a22

    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def norm_max(self) -> float:
        return max(abs(self.a11), abs(self.a12), abs(self.a21), abs(self.a22))

    def norm_fro(self) -> float:
        return math.sqrt(self.a11**2 + self.a12**2 + self.a21**2 + self.a22**2)

    def apply(self, x: Vec2) -> Vec2:
        return Vec2(self.a11 * x.x1 + self.a12 * x.x2, self.a21 * x.x1 + self.a22 * x.x2)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a11 + other.a11, self.a12 + other.a12,
                    self.a21 + other.a21, self.a22 + other.a22)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a11 - other.a11, self.a12 - other.a12,
                    self.a21 - other.a21, self.a22 - other.a22)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a11, -self.a12, -self.a21, -self.a22)

    def __mul__(self, c: float) -> "Mat2":
        return Mat2(c * self.a11, c * self.a12, c * self.a21, c * self.a22)

    __rmul__ = __mul__

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )


def col_det(u: Vec2, v: Vec2) -> float:
    """Determinant of the matrix with columns ``u`` and ``v``."""
    return u.x1 * v.x2 - u.x2 * v.x1


def bracket(a: Mat2, b: Mat2) -> Mat2:
    """Commutator ``AB - BA`` (always traceless)."""
    # factored so that [A, A] is exactly zero and the trace exactly vanishes
    d = a.a12 * b.a21 - a.a21 * b.a12
    return Mat2(
        d,
        a.a12 * (b.a22 - b.a11) - b.a12 * (a.a22 - a.a11),
        a.a21 * (b.a11 - b.a22) - b.a21 * (a.a11 - a.a22),
        -d,
    )


def adjugate(a: Mat2) -> Mat2:
    """Classical adjoint, ``tr(A) I - A``."""
    return Mat2(a.a22, -a.a12, -a.a21, a.a11)


def char_discriminant(m: Mat2) -> float:
    """``tr(M)^2 - 4 det(M)``; negative iff M has a non-real eigenvalue pair."""
    # (a11 - a22)^2 + 4 a12 a21 avoids cancelling the trace against itself
    d = m.a11 - m.a22
    return d * d + 4.0 * m.a12 * m.a21


def det_pencil(a: Mat2, b: Mat2, r: float) -> float:
    """``det(A + rB)`` expanded as ``det A + tr(adj(A) B) r + det(B) r^2``."""
    return a.det() + (adjugate(a) @ b).trace() * r + b.det() * r * r


def eigenvalues(m: Mat2) -> tuple[complex, complex]:
    """Roots of ``l^2 - tr(M) l + det(M)``, sorted by real then imaginary part."""
    tr = m.trace()
    disc = char_discriminant(m)
    if disc >= 0.0:
        root = math.sqrt(disc)
        # avoid cancellation in the smaller-magnitude root
        if tr >= 0.0:
            big = 0.5 * (tr + root)
        else:
            big = 0.5 * (tr - root)
        small = m.det() / big if big != 0.0 else 0.0
        pair = (complex(big, 0.0), complex(small, 0.0))
    else:
        im = 0.5 * math.sqrt(-disc)
        pair = (complex(0.5 * tr, -im), complex(0.5 * tr, im))
    return tuple(sorted(pair, key=lambda z: (z.real, z.imag)))  # type: ignore[return-value]


def zero_tol(*mats: Mat2, eps: float | None = None, degree: int = 1) -> float:
    """Absolute-plus-relative zero threshold for a degree-``degree`` quantity."""
    if eps is None:
        eps = default_eps()
    scale = 1.0 + sum(m.norm_max() for m in mats)
    return eps * scale**degree


def as_mat2(value: Mat2 | Sequence[Sequence[float]] | np.ndarray) -> Mat2:
    if isinstance(value, Mat2):
        return value
    return Mat2.of(value)


def stack_vectors(mats: Iterable[Mat2]) -> np.ndarray:
    """Rows are the gl(2) coordinates of the given matrices."""
    return np.array([m.as_vector() for m in mats], dtype=float).reshape(-1, 4)
