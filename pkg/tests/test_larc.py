import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import mats, random_mat, rel_close
from oracles import brute_force_larc, brute_rank, bracket_words, circle_points, structured_systems
from planar_bilinear.larc import (
    QuadraticForm,
    canonical_pair_indicators,
    decide_larc,
    generate_lie_algebra,
    independence_form,
    indicator,
    rank_at,
    shortcut_products,
)
from planar_bilinear.mat2 import Mat2, Vec2, adjugate, bracket, col_det

EX1 = (Mat2.of([[-1, 1], [0, 1]]), Mat2.of([[0, 1], [-1, 0]]))
EX2 = (Mat2.of([[1, 0], [0, 0]]), Mat2.of([[0, 1], [-1, 0]]))
EX3 = (Mat2.of([[1, 2], [0, 1]]), Mat2.of([[2, 3], [0, 2]]))
EJ1 = (Mat2.of([[2, -1], [0, 1]]), Mat2.of([[0, 1], [-1, 0]]))


def test_independence_form_rotation():
    # det(x | Jx) = |x|^2 for the counter-clockwise generator J
    q = independence_form(Mat2.identity(), Mat2.of([[0, -1], [1, 0]]))
    assert (q.c0, q.c1, q.c2) == (1.0, 0.0, 1.0)
    # the clockwise generator flips the sign; still definite
    q = independence_form(Mat2.identity(), Mat2.of([[0, 1], [-1, 0]]))
    assert (q.c0, q.c1, q.c2) == (-1.0, 0.0, -1.0)
    assert q.discriminant() < 0


def test_independence_form_commuting_example():
    assert independence_form(*EX3).discriminant() == pytest.approx(0.0, abs=1e-12)


def test_independence_form_matches_direct_determinant(rng):
    a, b = random_mat(rng), random_mat(rng)
    q = independence_form(a, b)
    for x in circle_points(64):
        v = Vec2(*x)
        assert q(v) == pytest.approx(col_det(a.apply(v), b.apply(v)), abs=1e-12)


def test_indicator_reference_values():
    assert indicator(*EX1) == pytest.approx(5.0, abs=1e-12)
    assert indicator(*EJ1) == pytest.approx(-7.0, abs=1e-12)
    a, b = EX2
    ab = bracket(a, b)
    assert indicator(ab, bracket(b, ab)) == pytest.approx(-16.0, abs=1e-12)


def test_generate_lie_algebra_dimensions():
    assert generate_lie_algebra(*EX3).dim == 2
    assert generate_lie_algebra(*EX2).dim == 4
    assert generate_lie_algebra(Mat2.identity(), Mat2.identity()).dim == 1
    assert generate_lie_algebra(Mat2.zero(), Mat2.zero()).dim == 0
    # two traceless generators stay inside sl(2)
    assert generate_lie_algebra(*EX1).dim == 3


def test_generate_lie_algebra_dimension_oracle(rng):
    for a, b in structured_systems(rng, 40) + [(random_mat(rng), random_mat(rng)) for _ in range(10)]:
        words = bracket_words(a, b, depth=3)
        expected = np.linalg.matrix_rank(np.stack([w.ravel() for w in words]), tol=1e-8)
        assert generate_lie_algebra(a, b).dim == expected


def test_rank_at_examples():
    basis = generate_lie_algebra(*EX3)
    assert rank_at(basis, Vec2(1, 0)) == 1
    ident = generate_lie_algebra(Mat2.identity(), Mat2.identity())
    assert rank_at(ident, Vec2(0.3, -2.0)) == 1
    ex1 = generate_lie_algebra(*EX1)
    for x in circle_points(32):
        assert rank_at(ex1, Vec2(*x)) == 2
    with pytest.raises(ValueError):
        rank_at(ex1, Vec2(0, 0))


def test_decide_examples():
    v1 = decide_larc(*EX1)
    assert v1.holds and v1.failure_point is None
    assert shortcut_products(*EX1)[0] == pytest.approx(5.0)

    v2 = decide_larc(*EX2)
    assert v2.holds
    assert v2.certificate.indicator == pytest.approx(-16.0)
    assert v2.certificate.label == "([A,B], [B,[A,B]])"

    v3 = decide_larc(*EX3)
    assert not v3.holds and v3.certificate is None
    assert v3.failure_point == Vec2(1.0, 0.0)


def test_decide_degenerate_inputs():
    v = decide_larc(Mat2.zero(), Mat2.zero())
    assert not v.holds and v.failure_point == Vec2(1.0, 0.0) and v.basis.dim == 0
    v = decide_larc(Mat2.of([[0, 1], [0, 0]]), Mat2.zero())
    assert not v.holds and v.failure_point == Vec2(1.0, 0.0)


def test_canonical_pairs_example2():
    values = [v for _, _, v in canonical_pair_indicators(*EX2)]
    assert values == pytest.approx([0, 0, 4, 0, 0, 4, 16, 4, -16], abs=1e-12)


def test_projective_roots_convention():
    # x1 x2 = 0: the axes
    roots = QuadraticForm(0.0, 1.0, 0.0).projective_roots(1e-12)
    assert roots == [Vec2(1.0, 0.0), Vec2(0.0, 1.0)]
    # (x1 - x2)(x1 + 2 x2) = x1^2 + x1 x2 - 2 x2^2
    roots = QuadraticForm(1.0, 1.0, -2.0).projective_roots(1e-12)
    for r in roots:
        assert r.x1 > 0 and r.norm() == pytest.approx(1.0)
    assert sorted(round(r.x2 / r.x1, 12) for r in roots) == [-0.5, 1.0]
    assert QuadraticForm(1.0, 0.0, 1.0).projective_roots(1e-12) == []


def test_oracle_structured_systems(rng):
    for a, b in structured_systems(rng, 60):
        verdict = decide_larc(a, b)
        min_rank, words = brute_force_larc(a, b)
        if verdict.holds:
            assert min_rank == 2
        else:
            x = np.array(verdict.failure_point.as_tuple())
            assert brute_rank(words, x) <= 1


def test_certificates_sound(rng):
    systems = [EX1, EX2, EJ1] + [(random_mat(rng), random_mat(rng)) for _ in range(30)]
    for a, b in systems:
        verdict = decide_larc(a, b)
        assert verdict.holds
        cert = verdict.certificate
        assert verdict.certificate_found and cert is not None
        assert cert.indicator < 0
        assert indicator(cert.first, cert.second) == pytest.approx(cert.indicator)
        for m, coords in ((cert.first, cert.first_coords), (cert.second, cert.second_coords)):
            back = verdict.basis.combine(coords)
            assert (back - m).norm_max() <= 1e-10 * (1 + m.norm_max())


def test_certificate_search_is_deterministic():
    a, b = Mat2.of([[1, 0], [0, -1]]), Mat2.of([[0, 1], [0, 0]])
    first = decide_larc(a, b)
    second = decide_larc(a, b)
    assert first == second


def test_bracket_closure(rng):
    for a, b in [EX1, EX2, EX3] + [(random_mat(rng), random_mat(rng)) for _ in range(20)]:
        basis = generate_lie_algebra(a, b)
        scale = 1.0 + max((g.norm_fro() for g in basis.generators), default=0.0)
        for g in basis.generators:
            for h in basis.generators:
                assert basis.residual(bracket(g, h)) <= 1e-9 * scale ** 2


def _scale(*ms):
    return 1.0 + sum(m.norm_max() for m in ms)


@settings(max_examples=200, deadline=None)
@given(mats, mats)
def test_indicator_via_determinants(a, b):
    tr = (adjugate(a) @ b).trace()
    assert rel_close(indicator(a, b), tr * tr - 4.0 * a.det() * b.det(), _scale(a, b) ** 4, 1e-12)


@settings(max_examples=200, deadline=None)
@given(mats, mats)
def test_indicator_equals_form_discriminant(a, b):
    q = independence_form(a, b)
    assert rel_close(indicator(a, b), q.discriminant(), _scale(a, b) ** 4, 1e-12)


@settings(max_examples=100, deadline=None)
@given(mats, mats)
def test_failure_points_have_low_rank(a, b):
    verdict = decide_larc(a, b)
    assert verdict.holds == (verdict.failure_point is None)
    if not verdict.holds:
        assert verdict.certificate is None
        assert math.isclose(verdict.failure_point.norm(), 1.0)
        assert rank_at(verdict.basis, verdict.failure_point) <= 1
