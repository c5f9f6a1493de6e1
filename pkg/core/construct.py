"""
Constructors and the instance catalog
Canonical metric pure-type connection, divergence correction, kernel
perturbations for the independence suite, tilted metrics and the named
example instances.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import ratlinalg as rl
from .connection import (DivergenceOp, GenConnection, divergence_apply, divergence_defect,
                         divergence_of_connection, is_metric, is_pure_type)
from .courant import (CourantAlgebroid, Section, axiom_check, bracket, random_function,
                      random_section)
from .errors import (ConstructionFailed, InputError, NonTensorialDefect, RankOneSide,
                     SingularGram, UnknownInstance)
from .metric import MINUS, PLUS, AdaptedFrame, GenMetric, adapted_frame, metric_validate, project
from .polyalg import Poly
from .settings import Settings, get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InstanceSpec:
    """A Courant algebroid bundled with a generalized metric and divergence"""
    name: str
    algebroid: CourantAlgebroid
    metric: Optional[GenMetric] = None
    divergence: Optional[DivergenceOp] = None
    connection: Optional[GenConnection] = None
    metadata: Dict = field(default_factory=dict, compare=False, hash=False)


# Canonical connection

def canonical_connection(A: CourantAlgebroid, G: GenMetric) -> GenConnection:
    """
    Gamma_ij = sum over sides s of P_s [e_i, P_s e_j], P_s = 1/2 (1 + s G)

    Metric by construction; mixed derivatives are projected brackets, so
    the torsion is of pure type. All three properties are checked.

    Raises:
        ConstructionFailed: the result is not a metric pure-type connection
    """
    r = A.rank
    Gamma = []
    for i in range(r):
        row = []
        e_i = A.frame(i)
        for j in range(r):
            total = A.zero_section()
            for sign in (PLUS, MINUS):
                e_j = project(A, G, A.frame(j), sign)
                if e_j.is_zero():
                    continue
                total = total + project(A, G, bracket(A, e_i, e_j), sign)
            row.append(total)
        Gamma.append(row)
    try:
        D = GenConnection.create(A, Gamma)
    except InputError as e:
        raise ConstructionFailed(f"{A.name}: canonical connection is not a connection: {e}")
    _validate_connection(A, G, D, 'canonical connection')
    return D


def _validate_connection(A: CourantAlgebroid, G: GenMetric, D: GenConnection, what: str,
                         dv: Optional[DivergenceOp] = None):
    for report in (is_metric(A, G, D), is_pure_type(A, G, D)):
        failure = report.first_failure()
        if failure is not None:
            logger.error(f"{A.name}: {what} failed {failure.check}: {failure.witness}")
            raise ConstructionFailed(f"{A.name}: {what} failed {failure.check}: {failure.witness}")
    if dv is not None:
        defect = divergence_defect(A, D, dv)
        if defect is not None:
            logger.error(f"{A.name}: {what} has the wrong divergence: {defect}")
            raise ConstructionFailed(f"{A.name}: {what} has the wrong divergence: {defect}")


# Adapted coordinates on one side

class _Side:
    """Basis vectors, Gram matrix and dual coordinates of V+ or V-"""

    def __init__(self, A: CourantAlgebroid, frame: AdaptedFrame, sign: int):
        self.sign = sign
        self.vectors = [[p.constant_value() for p in e.coeffs] for e in frame.basis(sign)]
        duals = [[p.constant_value() for p in e.coeffs] for e in frame.dual(sign)]
        self.m = len(self.vectors)
        P = A.P
        self.gram = [[sum((u[k] * P[k][l] * v[l] for k in range(A.rank) for l in range(A.rank)),
                          Fraction(0)) for v in self.vectors] for u in self.vectors]
        self.gram_inv = rl.inverse(self.gram) if self.m else []
        # coords[i][a] = <dual_a, e_i>
        self.coords = [[sum((d[k] * P[k][i] for k in range(A.rank)), Fraction(0))
                        for d in duals] for i in range(A.rank)]


def _correction_tensor(A: CourantAlgebroid, side: _Side, eps: Sequence[Poly]) -> List:
    """
    X[a][b][d] = (1/(1-m)) (g_ab eps#^d - eps_b delta_ad) in adapted coordinates

    eps holds the values of a covector on the side's basis; tr_1 X = eps.
    """
    m = side.m
    c = Fraction(1, 1 - m)
    sharp = [sum((eps[k].scalar_mul(side.gram_inv[d][k]) for k in range(m)), A.zero_poly())
             for d in range(m)]
    return [[[(sharp[d].scalar_mul(side.gram[a][b]) - (eps[b] if a == d else A.zero_poly()))
              .scalar_mul(c) for d in range(m)] for b in range(m)] for a in range(m)]


def _to_frame(A: CourantAlgebroid, parts) -> List[List[List[Poly]]]:
    """Sum of side tensors X (adapted coordinates) as B3[i][j][k] = e_k-coeff of B_{e_i} e_j"""
    r = A.rank
    B3 = [[[A.zero_poly() for _ in range(r)] for _ in range(r)] for _ in range(r)]
    for side, X in parts:
        m = side.m
        if not m:
            continue
        for i in range(r):
            for j in range(r):
                out = [A.zero_poly() for _ in range(m)]
                for a in range(m):
                    ca = side.coords[i][a]
                    if not ca:
                        continue
                    for b in range(m):
                        cb = side.coords[j][b]
                        if not cb:
                            continue
                        for d in range(m):
                            out[d] = out[d] + X[a][b][d].scalar_mul(ca * cb)
                for d in range(m):
                    if out[d].is_zero():
                        continue
                    for k in range(r):
                        v = side.vectors[d][k]
                        if v:
                            B3[i][j][k] = B3[i][j][k] + out[d].scalar_mul(v)
    return B3


def tensor_to_connection(A: CourantAlgebroid, B3) -> GenConnection:
    """Wrap an element of E* x End E as connection-shaped coefficients"""
    return GenConnection(tuple(tuple(Section(tuple(B3[i][j])) for j in range(A.rank))
                               for i in range(A.rank)))


# Divergence correction

def _check_tensorial(A: CourantAlgebroid, D0: GenConnection, dv: DivergenceOp,
                     eps: Sequence[Poly], settings: Settings):
    rng = np.random.default_rng(settings.seed)
    for _ in range(min(3, settings.random_trials)):
        a = random_section(A, rng, settings)
        lhs = divergence_apply(A, dv, a) - divergence_of_connection(A, D0, a)
        rhs = sum((x * y for x, y in zip(a.coeffs, eps)), A.zero_poly())
        if lhs != rhs:
            raise NonTensorialDefect(f"divergence defect on {a} is {lhs}, expected {rhs}")


def divergence_correction(A: CourantAlgebroid, G: GenMetric, D0: GenConnection,
                          dv_target: DivergenceOp, settings: Optional[Settings] = None) -> GenConnection:
    """
    D = D0 + B with divergence dv_target

    B(+-)_a b = (1/(1 - r(+-))) (<a, b> eps# - <eps#, b> a) on each side, where
    eps = dv_target - div_D0 restricted to that side.

    Raises:
        RankOneSide: rk V+ = 1 or rk V- = 1
        NonTensorialDefect: eps is not C-linear
        ConstructionFailed: result is not metric, pure-type, or has the wrong divergence
    """
    s = settings or get_settings()
    frame = adapted_frame(A, G)
    if frame.r_plus == 1 or frame.r_minus == 1:
        raise RankOneSide(frame.r_plus, frame.r_minus)
    if len(dv_target.frame_values) != A.rank:
        raise InputError(f"divergence has {len(dv_target.frame_values)} values, rank is {A.rank}")

    eps = [dv_target.frame_values[i] - divergence_of_connection(A, D0, A.frame(i))
           for i in range(A.rank)]
    if all(e.is_zero() for e in eps):
        return D0
    _check_tensorial(A, D0, dv_target, eps, s)

    parts = []
    for sign in (PLUS, MINUS):
        side = _Side(A, frame, sign)
        if not side.m:
            continue
        on_side = [sum((eps[k].scalar_mul(v[k]) for k in range(A.rank)), A.zero_poly())
                   for v in side.vectors]
        parts.append((side, _correction_tensor(A, side, on_side)))
    D = D0 + tensor_to_connection(A, _to_frame(A, parts))
    _validate_connection(A, G, D, 'divergence-corrected connection', dv_target)
    logger.debug(f"{A.name}: divergence correction applied")
    return D


def random_kernel_B(A: CourantAlgebroid, G: GenMetric, seed: int,
                    bound: Optional[int] = None) -> List[List[List[Poly]]]:
    """
    Seeded element of V+ x so(V+) (+) V- x so(V-) with tr_1 = 0

    Random skew matrices S_a give X_a = S_a g^-1; the trace defect is then
    removed with the correction ansatz. Sides of rank <= 1 contribute 0.
    """
    bound = get_settings().random_coeff_bound if bound is None else bound
    rng = np.random.default_rng(seed)
    frame = adapted_frame(A, G)
    parts = []
    for sign in (PLUS, MINUS):
        side = _Side(A, frame, sign)
        m = side.m
        if m <= 1:
            continue
        X = []
        for _ in range(m):
            S = [[Fraction(0)] * m for _ in range(m)]
            for b in range(m):
                for d in range(b + 1, m):
                    v = Fraction(int(rng.integers(-bound, bound + 1)))
                    S[b][d], S[d][b] = v, -v
            Xa = rl.matmul(S, side.gram_inv)
            X.append([[A.const(x) for x in row] for row in Xa])
        defect = [sum((X[a][b][a] for a in range(m)), A.zero_poly()) for b in range(m)]
        C = _correction_tensor(A, side, defect)
        X = [[[X[a][b][d] - C[a][b][d] for d in range(m)] for b in range(m)] for a in range(m)]
        parts.append((side, X))
    return _to_frame(A, parts)


def random_divergence(A: CourantAlgebroid, rng: np.random.Generator,
                      settings: Optional[Settings] = None) -> DivergenceOp:
    """Seeded divergence operator with random frame values (polynomial over a chart)"""
    s = settings or get_settings()
    if A.nvars:
        return DivergenceOp(tuple(random_function(A, rng, s) for _ in range(A.rank)))
    bound = s.random_coeff_bound
    return DivergenceOp(tuple(A.const(int(rng.integers(-bound, bound + 1)))
                              for _ in range(A.rank)))


# Metrics

def tilted_metric(A: CourantAlgebroid, T: Sequence[Sequence]) -> GenMetric:
    """
    Generalized metric whose V+ is the graph {(x, T x)} in E = g (+) g

    G = 2 Pi - 1 with Pi the pairing-orthogonal projection onto the graph.
    """
    r = A.rank
    if r % 2:
        raise InputError(f"tilted metric needs even rank, got {r}")
    m = r // 2
    T = rl.to_matrix(T)
    if rl.shape(T) != (m, m):
        raise InputError(f"tilt must be {m}x{m}")
    M = rl.identity(m) + T
    PM = rl.matmul(A.P, M)
    gram = rl.matmul(rl.transpose(M), PM)
    try:
        gram_inv = rl.inverse(gram)
    except InputError:
        raise SingularGram("pairing is degenerate on the graph of the tilt")
    Pi = rl.matmul(rl.matmul(M, gram_inv), rl.transpose(PM))
    return GenMetric.from_rows(rl.add(rl.scale(Pi, 2), rl.scale(rl.identity(r), -1)))


def exact_metric(B: Sequence[Sequence]) -> GenMetric:
    """Metric on T (+) T* from g = 1 and a constant skew B: [[-B, 1], [1 - B^2, B]]"""
    B = rl.to_matrix(B)
    n = len(B)
    ident = rl.identity(n)
    B2 = rl.matmul(B, B)
    top = [[-B[i][j] for j in range(n)] + ident[i] for i in range(n)]
    bottom = [[ident[i][j] - B2[i][j] for j in range(n)] + B[i] for i in range(n)]
    return GenMetric.from_rows(top + bottom)


# Catalog

def _levi_civita(i: int, j: int, k: int) -> int:
    if len({i, j, k}) < 3:
        return 0
    return 1 if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1


def _so3_double(name: str, signs: Sequence[int], metadata: Dict) -> CourantAlgebroid:
    """so(3) (+) so(3) with pairing signs[0] k (+) signs[1] k"""
    r = 6
    pairing = [[Fraction(0)] * r for _ in range(r)]
    for block, s in enumerate(signs):
        for i in range(3):
            pairing[3 * block + i][3 * block + i] = Fraction(s)
    structure = [[[0] * r for _ in range(r)] for _ in range(r)]
    for block in range(2):
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    structure[3 * block + i][3 * block + j][3 * block + k] = _levi_civita(i, j, k)
    return CourantAlgebroid.build((), pairing, [[] for _ in range(r)], structure,
                                  name=name, metadata=metadata)


def _abelian_point() -> InstanceSpec:
    P = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]
    A = CourantAlgebroid.build((), P, [[] for _ in range(4)],
                               [[[0] * 4 for _ in range(4)] for _ in range(4)],
                               name='abelian_point',
                               metadata={'description': 'abelian quadratic Lie algebra of signature (2, 2)'})
    return InstanceSpec('abelian_point', A, GenMetric.from_rows(P), DivergenceOp.zero(A),
                        metadata=dict(A.metadata))


def _so3_product() -> InstanceSpec:
    meta = {'description': 'so(3) x so(3), pairing k (+) (-k), V+ and V- the two factors'}
    A = _so3_double('so3_product', (1, -1), meta)
    G = GenMetric.from_rows([[int(i == j) * (1 if i < 3 else -1) for j in range(6)]
                             for i in range(6)])
    return InstanceSpec('so3_product', A, G, DivergenceOp.zero(A), metadata=meta)


def _so3_bidiagonal() -> InstanceSpec:
    meta = {'description': 'so(3) (+) so(3), pairing k (+) k, V+ diagonal and V- antidiagonal',
            'pairing_note': 'k (+) k so that the factor swap is self-adjoint'}
    A = _so3_double('so3_bidiagonal', (1, 1), meta)
    return InstanceSpec('so3_bidiagonal', A, tilted_metric(A, rl.identity(3)),
                        DivergenceOp.zero(A), metadata=meta)


SO3_TILT = [[1, 1, 0], [0, 1, 0], [0, 0, 2]]


def _so3_tilted() -> InstanceSpec:
    meta = {'description': 'so(3) (+) so(3), pairing k (+) k, V+ the graph of a rational shear',
            'tilt': [[str(x) for x in row] for row in SO3_TILT]}
    A = _so3_double('so3_tilted', (1, 1), meta)
    return InstanceSpec('so3_tilted', A, tilted_metric(A, SO3_TILT), DivergenceOp.zero(A),
                        metadata=meta)


def _drinfeld_double_sl2() -> InstanceSpec:
    # sl(2) basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h
    c = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    c[0][1][1], c[1][0][1] = 2, -2
    c[0][2][2], c[2][0][2] = -2, 2
    c[1][2][0], c[2][1][0] = 1, -1
    r = 6
    structure = [[[0] * r for _ in range(r)] for _ in range(r)]
    for i in range(3):
        for j in range(3):
            for k in range(3):
                structure[i][j][k] = c[i][j][k]
                # [x_i, xi^j] = ad*_{x_i} xi^j = -sum_k c_ik^j xi^k
                structure[i][3 + j][3 + k] = -c[i][k][j]
                structure[3 + j][i][3 + k] = c[i][k][j]
    P = [[int(abs(i - j) == 3) for j in range(r)] for i in range(r)]
    meta = {'description': 'sl(2) (+) sl(2)* with the canonical pairing and coadjoint bracket',
            'metric_note': 'G = [[0, K^-1], [K, 0]] with K the identity in the basis (h, e, f)'}
    A = CourantAlgebroid.build((), P, [[] for _ in range(r)], structure,
                               name='drinfeld_double_sl2', metadata=meta)
    G = GenMetric.from_rows(P)
    return InstanceSpec('drinfeld_double_sl2', A, G, DivergenceOp.zero(A), metadata=meta)


def _exact_chart(name: str, variables: Sequence[str], twist: int, B) -> InstanceSpec:
    """T (+) T* over a chart, frame (d/dx_i, dx_i), pairing 1/2 (xi(Y) + eta(X))"""
    n = len(variables)
    r = 2 * n
    half = Fraction(1, 2)
    P = [[half if abs(i - j) == n else 0 for j in range(r)] for i in range(r)]
    anchor = [[int(i == mu) for mu in range(n)] if i < n else [0] * n for i in range(r)]
    structure = [[[0] * r for _ in range(r)] for _ in range(r)]
    if twist:
        # [d_i, d_j] = H(d_i, d_j, .) for H = twist dx^dy^dz
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    structure[i][j][n + k] = twist * _levi_civita(i, j, k)
    meta = {'description': f"exact Courant algebroid T (+) T* over R^{n}"
                           + (f" twisted by H = {twist} dx^dy^dz" if twist else ''),
            'pairing_convention': 'half: <X + xi, Y + eta> = 1/2 (xi(Y) + eta(X))',
            'metric_note': 'g = 1 with constant skew B'}
    A = CourantAlgebroid.build(variables, P, anchor, structure, name=name, metadata=meta)
    return InstanceSpec(name, A, exact_metric(B), DivergenceOp.zero(A), metadata=meta)


_BUILDERS = {
    'abelian_point': _abelian_point,
    'so3_product': _so3_product,
    'so3_bidiagonal': _so3_bidiagonal,
    'so3_tilted': _so3_tilted,
    'drinfeld_double_sl2': _drinfeld_double_sl2,
    'exact_chart_flat': lambda: _exact_chart('exact_chart_flat', ('x', 'y'), 0,
                                             [[0, 1], [-1, 0]]),
    'exact_chart_H': lambda: _exact_chart('exact_chart_H', ('x', 'y', 'z'), 1,
                                          [[0, 1, 0], [-1, 0, 0], [0, 0, 0]]),
}

CATALOG_NAMES = tuple(_BUILDERS)


def validate_instance(spec: InstanceSpec, settings: Optional[Settings] = None):
    """
    Run axiom_check and metric_validate

    Raises:
        ConstructionFailed: first violated check
    """
    reports = [axiom_check(spec.algebroid, settings)]
    if spec.metric is not None:
        reports.append(metric_validate(spec.algebroid, spec.metric))
    for report in reports:
        failure = report.first_failure()
        if failure is not None:
            raise ConstructionFailed(f"{spec.name}: {failure.check} failed: {failure.witness}")


@lru_cache(maxsize=None)
def catalog(name: str) -> InstanceSpec:
    """
    Named example instance, validated

    Raises:
        UnknownInstance: name not in CATALOG_NAMES
    """
    builder = _BUILDERS.get(name)
    if builder is None:
        raise UnknownInstance(f"unknown instance '{name}' (known: {', '.join(CATALOG_NAMES)})")
    spec = builder()
    validate_instance(spec)
    logger.info(f"Loaded catalog instance {name}")
    return spec
