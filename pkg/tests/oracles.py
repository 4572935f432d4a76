"""Independent reference computations used by the tests.

Nothing here imports the package's algorithms; only the Mat2 container.
"""

import math

import numpy as np

from planar_bilinear.mat2 import Mat2


def _arr(m):
    return m.to_array() if isinstance(m, Mat2) else np.asarray(m, dtype=float)


def bracket_words(a, b, depth=3):
    """Right-nested brackets [g1, [g2, ... [gk, h]]] of A and B up to ``depth``.

    These span the generated Lie algebra; since its dimension is at most 4,
    depth 3 already reaches the closure.
    """
    a, b = _arr(a), _arr(b)
    layer = [a, b]
    words = list(layer)
    for _ in range(depth):
        layer = [g @ x - x @ g for g in (a, b) for x in layer]
        words.extend(layer)
    return words


def _rank_tol(words, rel):
    return rel * max(1.0, max(np.abs(w).max() for w in words))


def brute_rank(words, x, rel=1e-9):
    x = np.asarray(x, dtype=float)
    cols = np.stack([w @ x for w in words], axis=1)
    sv = np.linalg.svd(cols, compute_uv=False)
    return int(np.count_nonzero(sv > _rank_tol(words, rel) * np.linalg.norm(x)))


def circle_points(n):
    ang = np.pi * np.arange(n) / n
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)


def brute_force_larc(a, b, n=720):
    """(minimum rank over n circle points, words) from SVD of the word columns."""
    words = bracket_words(a, b)
    stack = np.stack(words)  # (k, 2, 2)
    cols = np.einsum("kij,nj->nik", stack, circle_points(n))  # (n, 2, k)
    sv = np.linalg.svd(cols, compute_uv=False)
    ranks = np.count_nonzero(sv > _rank_tol(words, 1e-9), axis=1)
    return int(ranks.min()), words


def expm_series(m, t=1.0):
    """Matrix exponential by scaling and squaring with a Taylor series."""
    m = _arr(m) * t
    norm = np.abs(m).sum(axis=1).max()
    k = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0 else 0
    x = m / (2 ** k)
    term = np.eye(2)
    out = np.eye(2)
    for j in range(1, 30):
        term = term @ x / j
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def rotation(phi):
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def structured_systems(rng, count):
    """Systems sitting on or near the boundary of the rank condition.

    Families: conjugated upper-triangular pairs (common eigenvector on a
    grid direction), commuting pairs B = cA + dI (these still satisfy the
    condition when A has complex eigenvalues), proportional pairs and
    diagonal pairs.
    """
    out = []
    for k in range(count):
        family = k % 4
        if family == 0:
            phi = math.pi * rng.integers(0, 720) / 720
            r = rotation(phi)
            ua = np.triu(rng.normal(size=(2, 2)))
            ub = np.triu(rng.normal(size=(2, 2)))
            a, b = r @ ua @ r.T, r @ ub @ r.T
        elif family == 1:
            a = rng.normal(size=(2, 2))
            b = rng.normal() * a + rng.normal() * np.eye(2)
        elif family == 2:
            a = rng.normal(size=(2, 2))
            b = rng.normal() * a
        else:
            a = np.diag(rng.normal(size=2))
            b = np.diag(rng.normal(size=2))
        out.append((Mat2.of(a), Mat2.of(b)))
    return out
