"""
Generalized Ricci flow for homogeneous instances
d/dt G = -2 Ric#(G, div) over a point, integrated in floats with RK4 and a
retraction back onto the involutions after each step.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd
from scipy import linalg

from .connection import DivergenceOp
from .courant import CourantAlgebroid
from .errors import InputError, NotHomogeneous, RankOneSide, StepRejected, SymmetryLost
from .metric import GenMetric
from .settings import Settings, get_settings

logger = logging.getLogger(__name__)

DIAGNOSTIC_COLUMNS = ('involution_defect', 'self_adjoint_defect', 'compatibility_residual',
                      'ricci_symmetry_residual', 'tangent_defect', 'anticommutation_residual')


@dataclass
class FlowState:
    """
    One point of a trajectory

    Attributes:
        t: flow time
        G: r x r float matrix
        div: divergence, constant in time
        diagnostics: defect norms at this state
    """
    t: float
    G: np.ndarray
    div: DivergenceOp
    diagnostics: Dict[str, float] = field(default_factory=dict)


class HomogeneousData:
    """Float frame data of a Courant algebroid over a point"""

    def __init__(self, A: CourantAlgebroid):
        if A.nvars:
            raise NotHomogeneous(f"{A.name} lives over a {A.nvars}-dimensional chart, "
                                 f"the flow needs a point")
        r = A.rank
        self.rank = r
        self.P = np.array([[float(x) for x in row] for row in A.pairing])
        self.P_inv = np.array([[float(x) for x in row] for row in A.P_inv])
        # C[i, j, k] = e_k-coefficient of [e_i, e_j]
        self.C = np.array([[[float(A.structure[i][j].coeffs[k].constant_value())
                             for k in range(r)] for j in range(r)] for i in range(r)])
        # ad[i, k, j] = C[i, j, k]
        self.ad = np.transpose(self.C, (0, 2, 1))


def _as_array(G: Union[GenMetric, np.ndarray]) -> np.ndarray:
    if isinstance(G, GenMetric):
        return np.array([[float(x) for x in row] for row in G.G])
    return np.asarray(G, dtype=float)


def _div_vector(dv: Optional[DivergenceOp], r: int) -> np.ndarray:
    if dv is None:
        return np.zeros(r)
    if len(dv.frame_values) != r:
        raise InputError(f"divergence has {len(dv.frame_values)} values, rank is {r}")
    return np.array([float(v.constant_value()) for v in dv.frame_values])


def _side_rank(Pi: np.ndarray) -> int:
    return int(round(float(np.trace(Pi))))


def _connection(data: HomogeneousData, G: np.ndarray, div: np.ndarray) -> np.ndarray:
    """Canonical connection corrected to divergence div; Gam[i, k, j] = e_k-coeff of D_{e_i} e_j"""
    r = data.rank
    ident = np.eye(r)
    projectors = [(ident + G) / 2, (ident - G) / 2]
    Gam = sum(np.einsum('km,imn,nj->ikj', Pi, data.ad, Pi) for Pi in projectors)

    ranks = [_side_rank(Pi) for Pi in projectors]
    if 1 in ranks:
        raise RankOneSide(ranks[0], ranks[1])
    eps = div - np.einsum('iij->j', Gam)
    if not np.any(eps):
        return Gam
    for Pi, m in zip(projectors, ranks):
        if m == 0:
            continue
        c = 1.0 / (1 - m)
        sharp = Pi @ data.P_inv @ eps
        gram = Pi.T @ data.P @ Pi
        on_side = eps @ Pi
        # B_{e_i} e_j = c (<Pi e_i, Pi e_j> eps# - eps(Pi e_j) Pi e_i)
        B = c * (np.einsum('ij,k->ikj', gram, sharp) - np.einsum('j,ki->ikj', on_side, Pi))
        Gam = Gam + B
    return Gam


def total_ricci(data: HomogeneousData, G: np.ndarray, Gam: np.ndarray) -> np.ndarray:
    """Ric[p, q] = tr(R(., e_p) e_q) with R(x, y) = R0(x+, y-) + R0(x-, y+)"""
    r = data.rank
    ident = np.eye(r)
    projectors = [(ident + G) / 2, (ident - G) / 2]
    Ric = np.zeros((r, r))
    for s in range(2):
        Ps, Po = projectors[s], projectors[1 - s]
        X = np.einsum('ik,imn->kmn', Ps, Gam)
        Y = np.einsum('ip,imn->pmn', Po, Gam)
        Z = np.einsum('ik,jp,ijl->kpl', Ps, Po, data.C)
        Ric += (np.einsum('kkm,pmq->pq', X, Y) - np.einsum('pkm,kmq->pq', Y, X)
                - np.einsum('kpl,lkq->pq', Z, Gam))
    return Ric


def _ricci_sharp(data: HomogeneousData, G: np.ndarray, div: np.ndarray):
    Gam = _connection(data, G, div)
    Ric = total_ricci(data, G, Gam)
    return data.P_inv @ Ric, Ric


def ricci_endomorphism(A: CourantAlgebroid, G: Union[GenMetric, np.ndarray],
                       dv: Optional[DivergenceOp] = None,
                       settings: Optional[Settings] = None) -> np.ndarray:
    """
    Ric# = P^-1 Ric for the canonical connection corrected to divergence dv

    Raises:
        NotHomogeneous: A is not over a point
        RankOneSide: a side of the splitting has rank 1
    """
    s = settings or get_settings()
    data = HomogeneousData(A)
    Gf = _as_array(G)
    sharp, _ = _ricci_sharp(data, Gf, _div_vector(dv, data.rank))
    anti = float(np.max(np.abs(sharp @ Gf + Gf @ sharp), initial=0.0))
    if anti > s.anticommutation_tolerance:
        logger.warning(f"{A.name}: Ric# G + G Ric# = {anti:.3e} exceeds tolerance")
    return sharp


def _norm(M: np.ndarray) -> float:
    return float(np.max(np.abs(M), initial=0.0))


def diagnostics(data: HomogeneousData, G: np.ndarray, div: np.ndarray) -> Dict[str, float]:
    """Defect norms of a state (max-abs norms)"""
    r = data.rank
    ident = np.eye(r)
    PG = data.P @ G
    sharp, Ric = _ricci_sharp(data, G, div)
    Gdot = -2 * sharp
    PGdot = data.P @ Gdot
    Pp, Pm = (ident + G) / 2, (ident - G) / 2
    # div([x-, y+]) over a point; both orders of the mixed pair
    mixed = np.einsum('ik,jp,ijl,l->kp', Pm, Pp, data.C, div)
    return {
        'involution_defect': _norm(G @ G - ident),
        'self_adjoint_defect': _norm(PG - PG.T),
        'compatibility_residual': max(_norm(mixed), _norm(mixed.T)),
        'ricci_symmetry_residual': _norm(Ric - Ric.T),
        'tangent_defect': max(_norm(PGdot - PGdot.T), _norm(G @ Gdot + Gdot @ G)),
        'anticommutation_residual': _norm(sharp @ G + G @ sharp),
    }


def retract(G: np.ndarray, tolerance: float) -> np.ndarray:
    """
    Nearest involution G (G^2)^(-1/2)

    Raises:
        StepRejected: the square root is complex or not finite
    """
    root = linalg.sqrtm(G @ G)
    if np.iscomplexobj(root):
        if _norm(np.imag(root)) > tolerance:
            raise StepRejected("G^2 has no real square root")
        root = np.real(root)
    try:
        result = G @ np.linalg.inv(root)
    except np.linalg.LinAlgError as e:
        raise StepRejected(f"retraction failed: {e}")
    if not np.all(np.isfinite(result)):
        raise StepRejected("retraction produced non-finite entries")
    return result


def initial_state(A: CourantAlgebroid, G: Union[GenMetric, np.ndarray],
                  dv: Optional[DivergenceOp] = None, t: float = 0.0) -> FlowState:
    data = HomogeneousData(A)
    dv = dv if dv is not None else DivergenceOp.zero(A)
    Gf = _as_array(G)
    return FlowState(t=t, G=Gf, div=dv, diagnostics=diagnostics(data, Gf, _div_vector(dv, data.rank)))


def flow_step(A: CourantAlgebroid, state: FlowState, h: float,
              settings: Optional[Settings] = None) -> FlowState:
    """
    One RK4 step of d/dt G = -2 Ric#(G) followed by the retraction

    Raises:
        StepRejected: retraction failed or left the involutions
        SymmetryLost: Ric is no longer symmetric at the new state
    """
    s = settings or get_settings()
    data = HomogeneousData(A)
    div = _div_vector(state.div, data.rank)

    def vector_field(G):
        return -2 * _ricci_sharp(data, G, div)[0]

    G0 = state.G
    k1 = vector_field(G0)
    k2 = vector_field(G0 + h / 2 * k1)
    k3 = vector_field(G0 + h / 2 * k2)
    k4 = vector_field(G0 + h * k3)
    G1 = retract(G0 + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4), s.flow_tolerance)

    diag = diagnostics(data, G1, div)
    if diag['involution_defect'] > s.flow_tolerance:
        raise StepRejected(f"|G^2 - 1| = {diag['involution_defect']:.3e} after retraction")
    if diag['ricci_symmetry_residual'] > s.flow_tolerance:
        raise SymmetryLost(f"Ricci symmetry residual {diag['ricci_symmetry_residual']:.3e} "
                           f"at t = {state.t + h:g}")
    logger.debug(f"{A.name}: t={state.t + h:g} " + ' '.join(f"{k}={v:.2e}" for k, v in diag.items()))
    return FlowState(t=state.t + h, G=G1, div=state.div, diagnostics=diag)


def flow_run(A: CourantAlgebroid, state0: FlowState, h: float, steps: int,
             settings: Optional[Settings] = None) -> List[FlowState]:
    """
    Integrate for a number of steps; the trajectory includes state0

    Raises:
        SymmetryLost: Ric not symmetric at state0 or along the way
    """
    s = settings or get_settings()
    if h <= 0 or steps < 0:
        raise InputError(f"need h > 0 and steps >= 0, got h={h}, steps={steps}")
    residual = state0.diagnostics.get('ricci_symmetry_residual')
    if residual is None:
        state0 = initial_state(A, state0.G, state0.div, state0.t)
        residual = state0.diagnostics['ricci_symmetry_residual']
    if residual > s.flow_tolerance:
        raise SymmetryLost(f"Ricci tensor is not symmetric at the initial state ({residual:.3e}); "
                           f"(G, div) is not compatible")
    trajectory = [state0]
    state = state0
    for _ in range(steps):
        state = flow_step(A, state, h, s)
        trajectory.append(state)
    logger.info(f"{A.name}: flow finished at t={state.t:g} after {steps} steps")
    return trajectory


def trajectory_frame(trajectory: List[FlowState]) -> pd.DataFrame:
    """t, G entries row-major (g_i_j), then the diagnostics"""
    rows = []
    for state in trajectory:
        row = {'t': state.t}
        r = state.G.shape[0]
        for i in range(r):
            for j in range(r):
                row[f"g_{i}_{j}"] = float(state.G[i, j])
        for name in DIAGNOSTIC_COLUMNS:
            row[name] = state.diagnostics.get(name, float('nan'))
        rows.append(row)
    return pd.DataFrame(rows)


def write_trajectory(trajectory: List[FlowState], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(trajectory).to_csv(path, index=False, float_format='%.17g')
    logger.info(f"Trajectory written to {path}")
    return path
