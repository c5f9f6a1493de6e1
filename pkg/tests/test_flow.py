"""
Tests for the homogeneous generalized Ricci flow
"""

import numpy as np
import pandas as pd
import pytest

from conftest import connection_for
from core.connection import DivergenceOp
from core.construct import catalog, divergence_correction
from core.courant import CourantAlgebroid
from core.curvature import ricci
from core.errors import InputError, NotHomogeneous, RankOneSide, StepRejected, SymmetryLost
from core.flow import (DIAGNOSTIC_COLUMNS, flow_run, flow_step, initial_state, retract,
                       ricci_endomorphism, trajectory_frame, write_trajectory)
from core.metric import GenMetric
from core.settings import Settings


def _exact_sharp(name, dv=None):
    spec = catalog(name)
    A, G = spec.algebroid, spec.metric
    D = connection_for(name)
    if dv is not None:
        D = divergence_correction(A, G, D, dv)
    Ric = np.array([[float(x.constant_value()) for x in row]
                    for row in ricci(A, G, D, 'TOTAL', dv).values])
    P_inv = np.array([[float(x) for x in row] for row in A.P_inv])
    return P_inv @ Ric


def _final_G(A, state0, h, steps):
    return flow_run(A, state0, h, steps)[-1].G


class TestRicciEndomorphism:
    @pytest.mark.parametrize('name', ['so3_bidiagonal', 'so3_tilted', 'drinfeld_double_sl2'])
    def test_matches_exact_computation(self, name):
        spec = catalog(name)
        sharp = ricci_endomorphism(spec.algebroid, spec.metric)
        np.testing.assert_allclose(sharp, _exact_sharp(name), atol=1e-12)

    def test_matches_exact_with_divergence(self, bidiagonal):
        A, G = bidiagonal.algebroid, bidiagonal.metric
        dv = DivergenceOp.from_values(A, [1, 2, 3, 1, 2, 3])
        sharp = ricci_endomorphism(A, G, dv)
        np.testing.assert_allclose(sharp, _exact_sharp('so3_bidiagonal', dv), atol=1e-12)

    def test_anticommutes_with_G(self):
        spec = catalog('so3_tilted')
        G = np.array([[float(x) for x in row] for row in spec.metric.G])
        sharp = ricci_endomorphism(spec.algebroid, spec.metric)
        np.testing.assert_allclose(sharp @ G + G @ sharp, 0, atol=1e-12)

    def test_rank_one_side(self):
        P = [[1, 0], [0, -1]]
        A = CourantAlgebroid.build((), P, [[], []], [[[0, 0], [0, 0]], [[0, 0], [0, 0]]],
                                   name='split_plane')
        with pytest.raises(RankOneSide):
            ricci_endomorphism(A, GenMetric.from_rows(P))


class TestFlow:
    @pytest.mark.parametrize('name', ['abelian_point', 'so3_product'])
    def test_ricci_flat_instances_are_fixed(self, name):
        spec = catalog(name)
        state0 = initial_state(spec.algebroid, spec.metric)
        trajectory = flow_run(spec.algebroid, state0, 0.01, 10)
        assert len(trajectory) == 11
        np.testing.assert_allclose(trajectory[-1].G, state0.G, atol=1e-12)
        assert trajectory[-1].t == pytest.approx(0.1)

    def test_long_run_stays_on_involutions(self, bidiagonal):
        A = bidiagonal.algebroid
        trajectory = flow_run(A, initial_state(A, bidiagonal.metric), 1e-3, 1000)
        assert len(trajectory) == 1001
        for state in trajectory[1:]:
            assert state.diagnostics['involution_defect'] < 1e-8
            assert state.diagnostics['self_adjoint_defect'] < 1e-8
            assert state.diagnostics['ricci_symmetry_residual'] < 1e-8
            assert state.diagnostics['anticommutation_residual'] < 1e-8

    def test_fourth_order_convergence(self):
        spec = catalog('so3_tilted')
        A = spec.algebroid
        state0 = initial_state(A, spec.metric)
        assert np.max(np.abs(ricci_endomorphism(A, spec.metric))) > 1e-6
        coarse = _final_G(A, state0, 0.02, 5)
        medium = _final_G(A, state0, 0.01, 10)
        fine = _final_G(A, state0, 0.005, 20)
        ratio = np.max(np.abs(coarse - medium)) / np.max(np.abs(medium - fine))
        assert 12 <= ratio <= 20

    def test_divergence_held_constant(self, bidiagonal):
        A = bidiagonal.algebroid
        dv = DivergenceOp.from_values(A, [1, 0, 0, 1, 0, 0])
        assert initial_state(A, bidiagonal.metric, dv).diagnostics['compatibility_residual'] < 1e-12
        zero = DivergenceOp.zero(A)
        state = flow_step(A, initial_state(A, bidiagonal.metric, zero), 0.01)
        assert state.div == zero
        assert state.t == pytest.approx(0.01)

    def test_incompatible_start_rejected(self, bidiagonal):
        A = bidiagonal.algebroid
        dv = DivergenceOp.from_values(A, [1, 0, 0, 0, 0, 0])
        state0 = initial_state(A, bidiagonal.metric, dv)
        assert state0.diagnostics['compatibility_residual'] > 0.1
        with pytest.raises(SymmetryLost):
            flow_run(A, state0, 0.01, 3)

    def test_chart_instance_is_not_homogeneous(self, exact_flat):
        with pytest.raises(NotHomogeneous):
            initial_state(exact_flat.algebroid, exact_flat.metric)

    def test_bad_step(self, bidiagonal):
        A = bidiagonal.algebroid
        with pytest.raises(InputError):
            flow_run(A, initial_state(A, bidiagonal.metric), 0.0, 5)

    def test_tolerance_from_settings(self, bidiagonal):
        A = bidiagonal.algebroid
        dv = DivergenceOp.from_values(A, [1, 0, 0, 0, 0, 0])
        state0 = initial_state(A, bidiagonal.metric, dv)
        loose = Settings(flow_tolerance=1e6)
        assert len(flow_run(A, state0, 0.01, 1, loose)) == 2


class TestRetraction:
    def test_projects_onto_involutions(self):
        rng = np.random.default_rng(0)
        G = np.diag([1.0, 1.0, -1.0]) + 1e-3 * rng.standard_normal((3, 3))
        R = retract(G, 1e-8)
        np.testing.assert_allclose(R @ R, np.eye(3), atol=1e-12)

    def test_involution_is_fixed(self):
        G = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(retract(G, 1e-8), G, atol=1e-14)

    def test_no_real_square_root(self):
        with pytest.raises(StepRejected):
            retract(np.array([[0.0, 1.0], [-1.0, 0.0]]), 1e-8)


class TestTrajectoryOutput:
    def test_csv_columns(self, bidiagonal, tmp_path):
        A = bidiagonal.algebroid
        trajectory = flow_run(A, initial_state(A, bidiagonal.metric), 0.01, 3)
        path = write_trajectory(trajectory, tmp_path / 'out' / 'flow.csv')
        frame = pd.read_csv(path)
        expected = ['t'] + [f"g_{i}_{j}" for i in range(6) for j in range(6)] \
            + list(DIAGNOSTIC_COLUMNS)
        assert list(frame.columns) == expected
        assert 'anticommutation_residual' in frame.columns
        assert len(frame) == 4
        assert frame['t'].iloc[-1] == pytest.approx(0.03)

    def test_floats_round_trip(self, bidiagonal, tmp_path):
        A = bidiagonal.algebroid
        trajectory = flow_run(A, initial_state(A, bidiagonal.metric), 0.01, 2)
        frame = pd.read_csv(write_trajectory(trajectory, tmp_path / 'flow.csv'))
        assert frame.to_numpy().tolist() == trajectory_frame(trajectory).to_numpy().tolist()
