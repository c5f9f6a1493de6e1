"""
Generalized metrics
The splitting E = V+ (+) V-, projections a -> a(+-) = 1/2 (1 +- G) a and
adapted frames with their dual frames.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from . import ratlinalg as rl
from .courant import CourantAlgebroid, Section, pairing
from .errors import InputError, SingularGram
from .reports import CheckReport

logger = logging.getLogger(__name__)

PLUS = 1
MINUS = -1


def _sign(sign) -> int:
    if sign in (1, '+', 'plus'):
        return PLUS
    if sign in (-1, '-', 'minus'):
        return MINUS
    raise InputError(f"sign must be + or -, got {sign!r}")


@dataclass(frozen=True)
class GenMetric:
    """Constant generalized metric G (G^2 = 1, G self-adjoint)"""
    G: Tuple[Tuple[Fraction, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> 'GenMetric':
        return cls(tuple(tuple(Fraction(x) for x in row) for row in rows))

    @property
    def size(self) -> int:
        return len(self.G)

    @property
    def matrix(self) -> rl.Matrix:
        return [list(row) for row in self.G]

    def projector(self, sign) -> rl.Matrix:
        """1/2 (1 +- G)"""
        s = _sign(sign)
        n = self.size
        return [[(Fraction(int(i == j)) + s * self.G[i][j]) / 2 for j in range(n)]
                for i in range(n)]

    def apply(self, a: Section) -> Section:
        """G a"""
        return _apply_rational(self.matrix, a)


def _apply_rational(M: rl.Matrix, a: Section) -> Section:
    out = []
    for row in M:
        total = None
        for m, x in zip(row, a.coeffs):
            if m and not x.is_zero():
                term = x.scalar_mul(m)
                total = term if total is None else total + term
        out.append(total if total is not None else a.coeffs[0].scalar_mul(0))
    return Section(tuple(out))


def _check_shape(A: CourantAlgebroid, G: GenMetric):
    if G.size != A.rank or any(len(row) != A.rank for row in G.G):
        raise InputError(f"metric must be {A.rank}x{A.rank}, got {G.size} rows")


def _side_basis(M: rl.Matrix) -> List[List[Fraction]]:
    """Leftmost independent columns, scaled so the first nonzero entry is 1"""
    basis = []
    for j in rl.independent_columns(M):
        col = rl.column(M, j)
        lead = next(x for x in col if x)
        basis.append([x / lead for x in col])
    return basis


def _gram(A: CourantAlgebroid, basis: List[List[Fraction]]) -> rl.Matrix:
    P = A.P
    return [[sum((u[k] * P[k][l] * v[l] for k in range(A.rank) for l in range(A.rank)), Fraction(0))
             for v in basis] for u in basis]


def metric_validate(A: CourantAlgebroid, G: GenMetric) -> CheckReport:
    """Verify G^2 = 1, P G symmetric and nondegeneracy of the pairing on both eigenspaces"""
    report = CheckReport(name=f"metric:{A.name}")
    try:
        _check_shape(A, G)
    except InputError as e:
        report.add('shape', False, str(e))
        return report

    M = G.matrix
    sq = rl.matmul(M, M)
    ident = rl.identity(A.rank)
    witness = None
    for i in range(A.rank):
        for j in range(A.rank):
            if sq[i][j] != ident[i][j]:
                witness = f"(G^2)[{i}][{j}] = {sq[i][j]}"
                break
        if witness:
            break
    report.add('involution', witness is None, witness)

    PG = rl.matmul(A.P, M)
    witness = None
    for i in range(A.rank):
        for j in range(i + 1, A.rank):
            if PG[i][j] != PG[j][i]:
                witness = f"(PG)[{i}][{j}] = {PG[i][j]} but (PG)[{j}][{i}] = {PG[j][i]}"
                break
        if witness:
            break
    report.add('self_adjoint', witness is None, witness)

    ranks = {}
    for label, sign in (('plus', PLUS), ('minus', MINUS)):
        basis = _side_basis(G.projector(sign))
        ranks[label] = len(basis)
        gram = _gram(A, basis)
        ok = not basis or rl.rank(gram) == len(basis)
        detail = f"rank {len(basis)}" + (" (zero-rank side)" if not basis else '')
        report.add(f'nondegenerate_{label}', ok,
                   None if ok else f"Gram matrix of V{'+' if sign > 0 else '-'} is singular",
                   detail=detail)

    total = ranks['plus'] + ranks['minus']
    report.add('splitting', total == A.rank,
               None if total == A.rank else f"rk V+ + rk V- = {total} != {A.rank}")
    for v in report.verdicts:
        if not v.passed:
            logger.warning(f"{A.name}: metric check {v.check} failed, {v.witness}")
    return report


def require_metric(A: CourantAlgebroid, G: GenMetric):
    """Raise InputError unless G is a valid generalized metric for A"""
    report = metric_validate(A, G)
    failure = report.first_failure()
    if failure is not None:
        raise InputError(f"invalid generalized metric: {failure.check}: {failure.witness}")


def project(A: CourantAlgebroid, G: GenMetric, a: Section, sign) -> Section:
    """a(+-) = 1/2 (1 +- G) a"""
    _check_shape(A, G)
    A.check_section(a)
    return _apply_rational(G.projector(sign), a)


@dataclass(frozen=True)
class AdaptedFrame:
    """Bases of V+ and V- with dual bases, <dual_i, e_j> = delta_ij on each side"""
    plus_basis: Tuple[Section, ...]
    minus_basis: Tuple[Section, ...]
    plus_dual: Tuple[Section, ...]
    minus_dual: Tuple[Section, ...]

    @property
    def r_plus(self) -> int:
        return len(self.plus_basis)

    @property
    def r_minus(self) -> int:
        return len(self.minus_basis)

    def basis(self, sign) -> Tuple[Section, ...]:
        return self.plus_basis if _sign(sign) == PLUS else self.minus_basis

    def dual(self, sign) -> Tuple[Section, ...]:
        return self.plus_dual if _sign(sign) == PLUS else self.minus_dual

    def labelled(self):
        """(label, section) for the whole frame, V+ first"""
        return ([(f"e{i}+", e) for i, e in enumerate(self.plus_basis)]
                + [(f"e{i}-", e) for i, e in enumerate(self.minus_basis)])


def _dual_basis(A: CourantAlgebroid, basis: List[List[Fraction]]) -> List[List[Fraction]]:
    if not basis:
        return []
    gram = _gram(A, basis)
    try:
        inv = rl.inverse(gram)
    except InputError:
        raise SingularGram("Gram matrix of an eigenspace is singular")
    m = len(basis)
    return [[sum((inv[k][i] * basis[k][c] for k in range(m)), Fraction(0)) for c in range(A.rank)]
            for i in range(m)]


def adapted_frame(A: CourantAlgebroid, G: GenMetric) -> AdaptedFrame:
    """
    Adapted frame of the splitting

    Bases are the leftmost independent columns of 1/2 (1 +- G); duals come
    from inverting the Gram matrix of each side.

    Raises:
        SingularGram: a side's Gram matrix is singular
    """
    _check_shape(A, G)
    sides = {}
    for sign in (PLUS, MINUS):
        basis = _side_basis(G.projector(sign))
        dual = _dual_basis(A, basis)
        sides[sign] = ([A.section(v) for v in basis], [A.section(v) for v in dual])
    frame = AdaptedFrame(
        plus_basis=tuple(sides[PLUS][0]), minus_basis=tuple(sides[MINUS][0]),
        plus_dual=tuple(sides[PLUS][1]), minus_dual=tuple(sides[MINUS][1]))
    if frame.r_plus + frame.r_minus != A.rank:
        raise InputError(f"eigenspaces of G do not span E (ranks {frame.r_plus} + {frame.r_minus})")
    return frame


def remixed_frame(A: CourantAlgebroid, frame: AdaptedFrame, mix_plus: rl.Matrix,
                  mix_minus: rl.Matrix) -> AdaptedFrame:
    """
    Re-mix each side's basis by an invertible rational matrix

    New basis element j is sum_k mix[k][j] e_k on that side; duals are
    recomputed from the new Gram matrices.
    """
    def remix(basis, mix):
        if not basis:
            return [], []
        if rl.rank(mix) != len(basis):
            raise InputError("basis change matrix is singular")
        vectors = [[p.constant_value() for p in e.coeffs] for e in basis]
        new = [[sum((mix[k][j] * vectors[k][c] for k in range(len(basis))), Fraction(0))
                for c in range(A.rank)] for j in range(len(basis))]
        return [A.section(v) for v in new], [A.section(v) for v in _dual_basis(A, new)]

    pb, pd = remix(list(frame.plus_basis), mix_plus)
    mb, md = remix(list(frame.minus_basis), mix_minus)
    return AdaptedFrame(tuple(pb), tuple(mb), tuple(pd), tuple(md))


def eigen_check(A: CourantAlgebroid, G: GenMetric, frame: AdaptedFrame) -> CheckReport:
    """G e(+-) = +- e(+-), exact duality, and orthogonality of the two sides"""
    report = CheckReport(name=f"adapted_frame:{A.name}")
    witness = None
    for sign in (PLUS, MINUS):
        for i, e in enumerate(frame.basis(sign)):
            if not (G.apply(e) - e.scale(sign)).is_zero():
                witness = f"G e{i}{'+' if sign > 0 else '-'} != {sign} e{i}"
    report.add('eigenvectors', witness is None, witness)

    witness = None
    for sign in (PLUS, MINUS):
        for i, d in enumerate(frame.dual(sign)):
            for j, e in enumerate(frame.basis(sign)):
                if pairing(A, d, e) != int(i == j):
                    witness = f"<dual{i}, e{j}> = {pairing(A, d, e)} on side {sign}"
            for j, e in enumerate(frame.basis(-sign)):
                if not pairing(A, d, e).is_zero():
                    witness = f"dual{i} on side {sign} pairs with opposite e{j}"
    report.add('duality', witness is None, witness)
    return report
