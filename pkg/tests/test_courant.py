"""
Tests for Courant algebroid data, the bracket and the axiom checker
"""

import pytest

from core.connection import endo_apply
from core.construct import CATALOG_NAMES, catalog
from core.courant import (CourantAlgebroid, Section, axiom_check, bracket, flat, pairing,
                          random_function, random_section, rho_star, sharp, trace1, trace_endo)
from core.errors import InputError
from core.polyalg import Poly, random_poly


def _so3_structure(perturb=None):
    eps = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (1, 0, 2): -1, (2, 1, 0): -1, (0, 2, 1): -1}
    s = [[[0] * 6 for _ in range(6)] for _ in range(6)]
    for block in (0, 3):
        for (i, j, k), v in eps.items():
            s[block + i][block + j][block + k] = v
    if perturb:
        i, j, k = perturb
        s[i][j][k] += 1
    return s


def _so3(pairing_diag=(1, 1, 1, -1, -1, -1), perturb=None):
    P = [[pairing_diag[i] if i == j else 0 for j in range(6)] for i in range(6)]
    return CourantAlgebroid.build((), P, [[] for _ in range(6)], _so3_structure(perturb),
                                  name='so3_test')


class TestConstruction:
    def test_pairing_must_be_symmetric(self):
        with pytest.raises(InputError):
            CourantAlgebroid.build((), [[1, 1], [0, 1]], [[], []], [[[0, 0]] * 2] * 2)

    def test_pairing_must_be_invertible(self):
        with pytest.raises(InputError):
            CourantAlgebroid.build((), [[1, 1], [1, 1]], [[], []], [[[0, 0]] * 2] * 2)

    def test_structure_shape(self):
        with pytest.raises(InputError):
            CourantAlgebroid.build((), [[1, 0], [0, 1]], [[], []], [[[0, 0]] * 2])

    def test_section_rank_checked(self, abelian):
        A = abelian.algebroid
        with pytest.raises(InputError):
            pairing(A, A.frame(0), Section((A.const(1),)))


class TestAxioms:
    @pytest.mark.parametrize('name', CATALOG_NAMES)
    def test_catalog_instances_pass(self, name):
        report = axiom_check(catalog(name).algebroid)
        assert report.passed, report.first_failure()

    def test_so3_product_pass(self):
        assert axiom_check(_so3()).passed

    def test_perturbed_structure_constant_breaks_jacobi(self):
        report = axiom_check(_so3(perturb=(0, 1, 2)))
        verdict = report.verdict('axiom1_jacobi')
        assert not verdict.passed
        assert verdict.witness

    def test_non_invariant_pairing(self):
        report = axiom_check(_so3(pairing_diag=(1, 2, 1, -1, -1, -1)))
        assert report.verdict('axiom1_jacobi').passed
        assert not report.verdict('axiom2_invariance').passed

    def test_nonzero_self_bracket_over_a_point(self):
        s = [[[0] * 4 for _ in range(4)] for _ in range(4)]
        s[0][0][1] = 1
        P = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
        A = CourantAlgebroid.build((), P, [[] for _ in range(4)], s, name='bad_symmetric_part')
        verdict = axiom_check(A).verdict('axiom3_symmetric_part')
        assert not verdict.passed
        assert verdict.witness.startswith('e0')

    def test_wrong_anchor_breaks_morphism(self):
        # rho(e1) = x d/dy, so [rho e0, rho e1] = d/dy while [e0, e1] = 0
        base = catalog('exact_chart_flat').algebroid
        x = Poly.var('x', base.base_vars)
        anchor = [[1, 0], [0, x], [0, 0], [0, 0]]
        structure = [[list(s.coeffs) for s in row] for row in base.structure]
        A = CourantAlgebroid.build(base.base_vars, base.P, anchor, structure, name='bad_anchor')
        verdict = axiom_check(A).verdict('anchor_morphism')
        assert not verdict.passed
        assert '(e0, e1)' in verdict.witness

    def test_deterministic_in_seed(self, exact_h):
        a = axiom_check(exact_h.algebroid, seed=5)
        b = axiom_check(exact_h.algebroid, seed=5)
        assert a == b


class TestBracket:
    def test_dorfman_example(self, exact_flat):
        A = exact_flat.algebroid
        x = Poly.var('x', A.base_vars)
        b = A.section([0, 0, 0, x])
        assert bracket(A, A.frame(0), b) == A.frame(3)

    def test_twisted_frame_bracket(self, exact_h):
        A = exact_h.algebroid
        # [d/dx, d/dy] = H(d/dx, d/dy, .) = dz
        assert bracket(A, A.frame(0), A.frame(1)) == A.frame(5)

    def test_leibniz_in_second_slot(self, exact_h, rng):
        A = exact_h.algebroid
        for _ in range(5):
            a, b = random_section(A, rng), random_section(A, rng)
            f = random_function(A, rng)
            lhs = bracket(A, a, b.scale(f))
            rhs = bracket(A, a, b).scale(f) + b.scale(A.lie(a, f))
            assert (lhs - rhs).is_zero()

    def test_anomaly_in_first_slot(self, exact_h, rng):
        A = exact_h.algebroid
        for _ in range(5):
            a, b = random_section(A, rng), random_section(A, rng)
            f = random_function(A, rng)
            lhs = bracket(A, a.scale(f), b)
            rhs = (bracket(A, a, b).scale(f) - a.scale(A.lie(b, f))
                   + rho_star(A, A.d(f)).scale(pairing(A, a, b)))
            assert (lhs - rhs).is_zero()

    def test_rho_star_is_dual_to_anchor(self, exact_h, rng):
        A = exact_h.algebroid
        for _ in range(5):
            f = random_function(A, rng)
            b = random_section(A, rng)
            assert pairing(A, rho_star(A, A.d(f)), b) == A.lie(b, f)

    def test_flat_sharp_inverse(self, exact_h, rng):
        A = exact_h.algebroid
        a = random_section(A, rng)
        assert sharp(A, flat(A, a)) == a


class TestTraces:
    def test_trace_matches_dual_frame_sum(self, exact_h, rng):
        A = exact_h.algebroid
        r = A.rank
        M = [[random_poly(A.base_vars, rng, 1, 3) for _ in range(r)] for _ in range(r)]
        expected = A.zero_poly()
        for i in range(r):
            image = endo_apply(M, A.frame(i))
            expected = expected + pairing(A, A.dual_frame(i), image)
        assert trace_endo(A, M) == expected

    def test_trace1_matches_dual_frame_sum(self, bidiagonal, rng):
        A = bidiagonal.algebroid
        r = A.rank
        B3 = [[[A.const(int(rng.integers(-3, 4))) for _ in range(r)] for _ in range(r)]
              for _ in range(r)]
        tr = trace1(A, B3)
        for j in range(r):
            expected = A.zero_poly()
            for i in range(r):
                expected = expected + pairing(A, A.dual_frame(i), Section(tuple(B3[i][j])))
            assert tr.coeffs[j] == expected

    def test_trace1_shape(self, abelian):
        with pytest.raises(InputError):
            trace1(abelian.algebroid, [[[0]]])
