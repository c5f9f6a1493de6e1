"""
Tests for generalized metrics, projections and adapted frames
"""

from fractions import Fraction

import pytest

from core.construct import CATALOG_NAMES, catalog, exact_metric, tilted_metric
from core.courant import CourantAlgebroid, pairing, random_section
from core.errors import InputError, SingularGram
from core.metric import (MINUS, PLUS, GenMetric, adapted_frame, eigen_check, metric_validate,
                         project, remixed_frame, require_metric)


def _point_algebroid(P):
    r = len(P)
    return CourantAlgebroid.build((), P, [[] for _ in range(r)],
                                  [[[0] * r for _ in range(r)] for _ in range(r)], name='point')


class TestValidation:
    @pytest.mark.parametrize('name', CATALOG_NAMES)
    def test_catalog_metrics_valid(self, name):
        spec = catalog(name)
        assert metric_validate(spec.algebroid, spec.metric).passed

    def test_not_an_involution(self, bidiagonal):
        A = bidiagonal.algebroid
        G = GenMetric.from_rows([[2 * int(i == j) for j in range(6)] for i in range(6)])
        report = metric_validate(A, G)
        assert not report.verdict('involution').passed
        assert '(G^2)[0][0]' in report.verdict('involution').witness

    def test_not_self_adjoint(self):
        A = _point_algebroid([[1, 0], [0, -1]])
        G = GenMetric.from_rows([[1, 1], [0, -1]])
        report = metric_validate(A, G)
        assert report.verdict('involution').passed
        assert not report.verdict('self_adjoint').passed

    def test_zero_rank_side_allowed(self):
        A = _point_algebroid([[1, 0], [0, 1]])
        report = metric_validate(A, GenMetric.from_rows([[1, 0], [0, 1]]))
        assert report.passed
        assert 'zero-rank side' in report.verdict('nondegenerate_minus').detail

    def test_shape_mismatch(self, abelian):
        report = metric_validate(abelian.algebroid, GenMetric.from_rows([[1, 0], [0, 1]]))
        assert not report.passed
        assert report.verdicts[0].check == 'shape'

    def test_require_metric_raises(self, bidiagonal):
        G = GenMetric.from_rows([[0] * 6 for _ in range(6)])
        with pytest.raises(InputError):
            require_metric(bidiagonal.algebroid, G)

    def test_exact_metric_shape(self):
        G = exact_metric([[0, 1], [-1, 0]])
        assert G.matrix == [[0, -1, 1, 0], [1, 0, 0, 1], [2, 0, 0, 1], [0, 2, -1, 0]]

    def test_tilted_metric_needs_nondegenerate_graph(self):
        # the graph of T = 1 is a null line for the split pairing
        A = _point_algebroid([[1, 0], [0, -1]])
        with pytest.raises(SingularGram):
            tilted_metric(A, [[1]])


class TestProjections:
    def test_projections_split_a_section(self, exact_h, rng):
        A, G = exact_h.algebroid, exact_h.metric
        for _ in range(3):
            a, b = random_section(A, rng), random_section(A, rng)
            a_plus, a_minus = project(A, G, a, PLUS), project(A, G, a, MINUS)
            assert a_plus + a_minus == a
            assert G.apply(a_plus) == a_plus
            assert G.apply(a_minus) == -a_minus
            assert pairing(A, a_plus, project(A, G, b, MINUS)).is_zero()

    def test_projection_is_idempotent(self, bidiagonal):
        A, G = bidiagonal.algebroid, bidiagonal.metric
        a = A.section([1, 2, 3, 4, 5, 6])
        once = project(A, G, a, '+')
        assert project(A, G, once, 'plus') == once

    def test_bad_sign(self, bidiagonal):
        A, G = bidiagonal.algebroid, bidiagonal.metric
        with pytest.raises(InputError):
            project(A, G, A.frame(0), 'x')

    def test_bidiagonal_sides(self, bidiagonal):
        A, G = bidiagonal.algebroid, bidiagonal.metric
        # V+ is the diagonal, V- the antidiagonal
        assert project(A, G, A.frame(0), PLUS) == A.section([Fraction(1, 2), 0, 0,
                                                              Fraction(1, 2), 0, 0])
        assert project(A, G, A.frame(0), MINUS) == A.section([Fraction(1, 2), 0, 0,
                                                               Fraction(-1, 2), 0, 0])


class TestAdaptedFrame:
    @pytest.mark.parametrize('name', CATALOG_NAMES)
    def test_frames_are_dual_eigenbases(self, name):
        spec = catalog(name)
        frame = adapted_frame(spec.algebroid, spec.metric)
        assert frame.r_plus + frame.r_minus == spec.algebroid.rank
        assert eigen_check(spec.algebroid, spec.metric, frame).passed

    def test_ranks(self, bidiagonal, exact_h):
        frame = adapted_frame(bidiagonal.algebroid, bidiagonal.metric)
        assert (frame.r_plus, frame.r_minus) == (3, 3)
        frame = adapted_frame(exact_h.algebroid, exact_h.metric)
        assert (frame.r_plus, frame.r_minus) == (3, 3)
        assert [label for label, _ in frame.labelled()][:2] == ['e0+', 'e1+']

    def test_remixed_frame(self, bidiagonal):
        A, G = bidiagonal.algebroid, bidiagonal.metric
        frame = adapted_frame(A, G)
        mix = [[1, 1, 0], [0, 1, 0], [0, 2, 3]]
        new = remixed_frame(A, frame, mix, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        assert new.plus_basis[1] == frame.plus_basis[0] + frame.plus_basis[1] \
            + frame.plus_basis[2].scale(2)
        assert eigen_check(A, G, new).passed

    def test_remix_must_be_invertible(self, bidiagonal):
        A, G = bidiagonal.algebroid, bidiagonal.metric
        frame = adapted_frame(A, G)
        singular = [[1, 1, 0], [1, 1, 0], [0, 0, 1]]
        with pytest.raises(InputError):
            remixed_frame(A, frame, singular, singular)
