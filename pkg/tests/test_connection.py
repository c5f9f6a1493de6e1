"""
Tests for generalized connections: compatibility, metric and pure-type checks, divergence, torsion
"""

import itertools

import pytest

from conftest import connection_for
from core.connection import (DivergenceOp, GenConnection, adjoint_of_Da, apply,
                             divergence_apply, divergence_defect, divergence_from_connection,
                             divergence_of_connection, induced_derivative_on_endos, is_metric,
                             is_pure_type, naive_curvature, torsion3)
from core.construct import CATALOG_NAMES, catalog
from core.courant import pairing, random_function, random_section
from core.errors import InputError


def _with_entries(A, entries):
    """Connection that is zero except Gamma[i][j] = given section"""
    Gamma = [[A.zero_section() for _ in range(A.rank)] for _ in range(A.rank)]
    for (i, j), s in entries.items():
        Gamma[i][j] = s
    return GenConnection.create(A, Gamma)


class TestCreate:
    def test_rejects_incompatible_coefficients(self, abelian):
        A = abelian.algebroid
        with pytest.raises(InputError, match='compatible'):
            _with_entries(A, {(0, 0): A.frame(0)})

    def test_rejects_wrong_shape(self, abelian):
        A = abelian.algebroid
        with pytest.raises(InputError):
            GenConnection.create(A, [[A.zero_section()]])

    def test_skew_rotation_is_compatible(self, bidiagonal):
        A = bidiagonal.algebroid
        D = _with_entries(A, {(0, 0): A.frame(1), (0, 1): -A.frame(0)})
        assert apply(A, D, A.frame(0), A.frame(0)) == A.frame(1)


class TestCanonical:
    @pytest.mark.parametrize('name', CATALOG_NAMES)
    def test_metric_and_pure_type(self, name):
        spec = catalog(name)
        D = connection_for(name)
        assert is_metric(spec.algebroid, spec.metric, D).passed
        report = is_pure_type(spec.algebroid, spec.metric, D)
        assert report.passed, report.first_failure()

    def test_zero_connection_has_mixed_torsion(self, bidiagonal):
        A, G = bidiagonal.algebroid, bidiagonal.metric
        D = GenConnection.zero(A)
        assert is_metric(A, G, D).passed
        report = is_pure_type(A, G, D)
        assert not report.verdict('mixed_torsion_vanishes').passed
        assert not report.verdict('mixed_derivative_is_projected_bracket').passed
        assert report.verdict('characterizations_agree').passed

    def test_rotation_in_one_factor_is_not_metric(self, bidiagonal):
        A, G = bidiagonal.algebroid, bidiagonal.metric
        D = _with_entries(A, {(0, 0): A.frame(1), (0, 1): -A.frame(0)})
        report = is_metric(A, G, D)
        assert not report.passed
        assert report.verdict('commutes_with_metric').witness.startswith('[Gamma_0, G]')

    def test_metric_means_parallel_G(self, exact_h, rng):
        A, G = exact_h.algebroid, exact_h.metric
        D = connection_for('exact_chart_H')
        a = random_section(A, rng)
        derivative = induced_derivative_on_endos(A, D, a, G.matrix)
        assert all(x.is_zero() for row in derivative for x in row)


class TestDivergence:
    def test_leibniz_rule(self, exact_h, rng):
        A = exact_h.algebroid
        D = connection_for('exact_chart_H')
        a, f = random_section(A, rng), random_function(A, rng)
        lhs = divergence_of_connection(A, D, a.scale(f))
        assert lhs == f * divergence_of_connection(A, D, a) + A.lie(a, f)

    def test_operator_matches_connection(self, exact_h, rng):
        A = exact_h.algebroid
        D = connection_for('exact_chart_H')
        dv = divergence_from_connection(A, D)
        for _ in range(3):
            a = random_section(A, rng)
            assert divergence_apply(A, dv, a) == divergence_of_connection(A, D, a)

    def test_defect(self, bidiagonal):
        A = bidiagonal.algebroid
        D = connection_for('so3_bidiagonal')
        assert divergence_defect(A, D, divergence_from_connection(A, D)) is None
        shifted = divergence_from_connection(A, D) + DivergenceOp.from_values(A, [1, 0, 0, 0, 0, 0])
        assert divergence_defect(A, D, shifted).startswith('div(e0)')

    def test_from_values_length(self, abelian):
        with pytest.raises(InputError):
            DivergenceOp.from_values(abelian.algebroid, [0, 0])


class TestTorsionAndCurvature:
    def test_torsion_is_totally_skew(self, bidiagonal):
        A = bidiagonal.algebroid
        D = _with_entries(A, {(2, 0): A.frame(4), (2, 4): -A.frame(0)})
        frame = A.frame_list()
        for i, j, k in itertools.product(range(0, 6, 2), repeat=3):
            value = torsion3(A, D, frame[i], frame[j], frame[k])
            assert value == -torsion3(A, D, frame[j], frame[i], frame[k])
            assert value == -torsion3(A, D, frame[i], frame[k], frame[j])

    def test_adjoint(self, exact_h, rng):
        A = exact_h.algebroid
        D = connection_for('exact_chart_H')
        a, b = random_section(A, rng), random_section(A, rng)
        lhs = adjoint_of_Da(A, D, a, b)
        for k in range(A.rank):
            c = A.frame(k)
            assert pairing(A, lhs, c) == pairing(A, b, apply(A, D, c, a))

    def test_naive_curvature_is_skew_in_first_pair(self, bidiagonal):
        A = bidiagonal.algebroid
        D = connection_for('so3_bidiagonal')
        frame = A.frame_list()
        for i, j in itertools.combinations(range(6), 2):
            c = frame[(i + j) % 6]
            assert naive_curvature(A, D, frame[i], frame[j], c) == \
                -naive_curvature(A, D, frame[j], frame[i], c)
