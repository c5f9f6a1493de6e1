"""
Generalized connections
Covariant derivative in a frame, the adjoint (Da)*, divergences, torsion,
pure-type and metric tests, the naive curvature R0 and induced derivatives
on endomorphisms.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .courant import Covector, CourantAlgebroid, Section, bracket, pairing, sharp
from .errors import InputError
from .metric import MINUS, PLUS, GenMetric, adapted_frame, project
from .polyalg import Poly
from .reports import CheckReport

logger = logging.getLogger(__name__)

PolyMatrix = List[List[Poly]]


@dataclass(frozen=True)
class GenConnection:
    """
    Connection coefficients Gamma[i][j] = D_{e_i} e_j

    Use GenConnection.create to validate pairing compatibility.
    """
    Gamma: Tuple[Tuple[Section, ...], ...]

    @classmethod
    def create(cls, A: CourantAlgebroid, Gamma: Sequence[Sequence[Section]],
               validate: bool = True) -> 'GenConnection':
        """
        Build a connection on A

        Raises:
            InputError: wrong shape, or <Gamma_ij, e_k> + <e_j, Gamma_ik> != 0
        """
        r = A.rank
        if len(Gamma) != r or any(len(row) != r for row in Gamma):
            raise InputError(f"connection coefficients must be {r}x{r} sections")
        for row in Gamma:
            for s in row:
                A.check_section(s)
        D = cls(tuple(tuple(Section(tuple(c.with_variables(A.base_vars) for c in s.coeffs))
                            for s in row) for row in Gamma))
        if validate:
            witness = compatibility_witness(A, D)
            if witness is not None:
                logger.error(f"{A.name}: connection rejected, {witness}")
                raise InputError(f"connection is not compatible with the pairing: {witness}")
        return D

    @classmethod
    def zero(cls, A: CourantAlgebroid) -> 'GenConnection':
        """The coordinate connection Gamma = 0"""
        return cls(tuple(tuple(A.zero_section() for _ in range(A.rank)) for _ in range(A.rank)))

    def __add__(self, other: 'GenConnection') -> 'GenConnection':
        return GenConnection(tuple(tuple(x + y for x, y in zip(ra, rb))
                                   for ra, rb in zip(self.Gamma, other.Gamma)))

    def __sub__(self, other: 'GenConnection') -> 'GenConnection':
        return GenConnection(tuple(tuple(x - y for x, y in zip(ra, rb))
                                   for ra, rb in zip(self.Gamma, other.Gamma)))

    def matrix(self, i: int) -> PolyMatrix:
        """Gamma_i as an endomorphism matrix, M[k][j] = e_k-coefficient of D_{e_i} e_j"""
        r = len(self.Gamma)
        return [[self.Gamma[i][j].coeffs[k] for j in range(r)] for k in range(r)]

    def tensor(self) -> List[List[List[Poly]]]:
        """Gamma as an element of E* x E* x E (index order i, j, k)"""
        return [[list(s.coeffs) for s in row] for row in self.Gamma]


@dataclass(frozen=True)
class DivergenceOp:
    """Divergence operator determined by its values on the frame"""
    frame_values: Tuple[Poly, ...]

    @classmethod
    def zero(cls, A: CourantAlgebroid) -> 'DivergenceOp':
        return cls(tuple(A.zero_poly() for _ in range(A.rank)))

    @classmethod
    def from_values(cls, A: CourantAlgebroid, values: Sequence) -> 'DivergenceOp':
        if len(values) != A.rank:
            raise InputError(f"divergence needs {A.rank} frame values, got {len(values)}")
        return cls(tuple(v.with_variables(A.base_vars) if isinstance(v, Poly) else A.const(v)
                         for v in values))

    def __add__(self, other: 'DivergenceOp') -> 'DivergenceOp':
        return DivergenceOp(tuple(x + y for x, y in zip(self.frame_values, other.frame_values)))

    def __sub__(self, other: 'DivergenceOp') -> 'DivergenceOp':
        return DivergenceOp(tuple(x - y for x, y in zip(self.frame_values, other.frame_values)))

    def as_covector(self) -> Covector:
        return Covector(self.frame_values)


def _check_connection(A: CourantAlgebroid, D: GenConnection):
    if len(D.Gamma) != A.rank or any(len(row) != A.rank for row in D.Gamma):
        raise InputError(f"connection has wrong shape for rank {A.rank}")


def compatibility_witness(A: CourantAlgebroid, D: GenConnection) -> Optional[str]:
    """First (i, j, k) with <Gamma_ij, e_k> + <e_j, Gamma_ik> != 0"""
    r = A.rank
    frame = A.frame_list()
    for i in range(r):
        values = [[pairing(A, D.Gamma[i][j], frame[k]) for k in range(r)] for j in range(r)]
        for j in range(r):
            for k in range(j, r):
                defect = values[j][k] + values[k][j]
                if not defect.is_zero():
                    return f"(i, j, k) = ({i}, {j}, {k}): {defect}"
    return None


# Covariant derivative

def apply(A: CourantAlgebroid, D: GenConnection, a: Section, b: Section) -> Section:
    """D_a b = L_{rho a} b + sum_ij a^i b^j Gamma_ij"""
    _check_connection(A, D)
    A.check_section(a)
    A.check_section(b)
    if A.nvars:
        out = [A.lie(a, bj) for bj in b.coeffs]
    else:
        out = [A.zero_poly() for _ in range(A.rank)]
    for i, ai in enumerate(a.coeffs):
        if ai.is_zero():
            continue
        for j, bj in enumerate(b.coeffs):
            if bj.is_zero():
                continue
            g = D.Gamma[i][j]
            if g.is_zero():
                continue
            f = ai * bj
            for k, c in enumerate(g.coeffs):
                if not c.is_zero():
                    out[k] = out[k] + f * c
    return Section(tuple(out))


def adjoint_of_Da(A: CourantAlgebroid, D: GenConnection, a: Section, b: Section) -> Section:
    """(Da)* b, the section s with <s, c> = <b, D_c a> for all c"""
    values = tuple(pairing(A, b, apply(A, D, A.frame(k), a)) for k in range(A.rank))
    return sharp(A, Covector(values))


def divergence_of_connection(A: CourantAlgebroid, D: GenConnection, a: Section) -> Poly:
    """div a = tr(Da) = sum_i <dual_i, D_{e_i} a>"""
    total = A.zero_poly()
    for i in range(A.rank):
        # <dual_i, v> is the i-th coefficient of v
        total = total + apply(A, D, A.frame(i), a).coeffs[i]
    return total


def divergence_from_connection(A: CourantAlgebroid, D: GenConnection) -> DivergenceOp:
    """The divergence operator div_D as frame values"""
    return DivergenceOp(tuple(divergence_of_connection(A, D, A.frame(i)) for i in range(A.rank)))


def divergence_apply(A: CourantAlgebroid, dv: DivergenceOp, a: Section) -> Poly:
    """div(sum a^i e_i) = sum_i (a^i div(e_i) + L_{rho e_i} a^i)"""
    A.check_section(a)
    if len(dv.frame_values) != A.rank:
        raise InputError(f"divergence has {len(dv.frame_values)} values, rank is {A.rank}")
    total = A.zero_poly()
    for i, ai in enumerate(a.coeffs):
        if ai.is_zero():
            continue
        v = dv.frame_values[i]
        if not v.is_zero():
            total = total + ai * v
        if A.nvars:
            total = total + A.lie(A.frame(i), ai)
    return total


def divergence_defect(A: CourantAlgebroid, D: GenConnection, dv: DivergenceOp) -> Optional[str]:
    """First frame index where div_D and dv differ"""
    for i in range(A.rank):
        ours = divergence_of_connection(A, D, A.frame(i))
        if ours != dv.frame_values[i]:
            return f"div(e{i}): connection gives {ours}, operator gives {dv.frame_values[i]}"
    return None


# Torsion

def torsion(A: CourantAlgebroid, D: GenConnection, a: Section, b: Section) -> Section:
    """T(a,b) = D_a b - D_b a - [a,b] + (Da)* b"""
    return (apply(A, D, a, b) - apply(A, D, b, a) - bracket(A, a, b)
            + adjoint_of_Da(A, D, a, b))


def torsion3(A: CourantAlgebroid, D: GenConnection, a: Section, b: Section, c: Section) -> Poly:
    """<T(a,b), c>"""
    return pairing(A, torsion(A, D, a, b), c)


def is_pure_type(A: CourantAlgebroid, G: GenMetric, D: GenConnection) -> CheckReport:
    """
    Pure-type torsion test

    Checks that torsion3 vanishes on adapted-frame triples not all on one
    side, and that D_{a-+} b+- = [a-+, b+-]+- on adapted-frame pairs. The
    two characterizations are reported separately and must agree.
    """
    frame = adapted_frame(A, G)
    report = CheckReport(name=f"pure_type:{A.name}")
    labelled = frame.labelled()
    side = {label: (PLUS if label.endswith('+') else MINUS) for label, _ in labelled}

    T = {}
    witness = None
    for (la, a), (lb, b) in itertools.product(labelled, repeat=2):
        T[la, lb] = torsion(A, D, a, b)
    for (la, _), (lb, _), (lc, c) in itertools.product(labelled, repeat=3):
        if side[la] == side[lb] == side[lc]:
            continue
        value = pairing(A, T[la, lb], c)
        if not value.is_zero():
            witness = f"torsion3({la}, {lb}, {lc}) = {value}"
            break
    report.add('mixed_torsion_vanishes', witness is None, witness)

    witness = None
    for sign in (PLUS, MINUS):
        for i, a in enumerate(frame.basis(-sign)):
            for j, b in enumerate(frame.basis(sign)):
                lhs = apply(A, D, a, b)
                rhs = project(A, G, bracket(A, a, b), sign)
                if not (lhs - rhs).is_zero():
                    s, o = ('+', '-') if sign == PLUS else ('-', '+')
                    witness = f"D_(e{i}{o}) e{j}{s} = {lhs} but [e{i}{o}, e{j}{s}]{s} = {rhs}"
                    break
            if witness:
                break
        if witness:
            break
    report.add('mixed_derivative_is_projected_bracket', witness is None, witness)

    agree = report.verdicts[0].passed == report.verdicts[1].passed
    report.add('characterizations_agree', agree,
               None if agree else "torsion and derivative characterizations disagree")
    return report


def _poly_matmul(X: PolyMatrix, Y: PolyMatrix, zero: Poly) -> PolyMatrix:
    n = len(X)
    out = []
    for i in range(n):
        row = []
        for j in range(len(Y[0]) if Y else 0):
            total = zero
            for k in range(len(Y)):
                if not X[i][k].is_zero() and not Y[k][j].is_zero():
                    total = total + X[i][k] * Y[k][j]
            row.append(total)
        out.append(row)
    return out


def _rational_poly_matrix(A: CourantAlgebroid, M) -> PolyMatrix:
    return [[A.const(x) for x in row] for row in M]


def is_metric(A: CourantAlgebroid, G: GenMetric, D: GenConnection) -> CheckReport:
    """D G = 0, i.e. [Gamma_i, G] = 0 for every frame index i"""
    _check_connection(A, D)
    report = CheckReport(name=f"metric_connection:{A.name}")
    Gp = _rational_poly_matrix(A, G.matrix)
    zero = A.zero_poly()
    witness = None
    for i in range(A.rank):
        M = D.matrix(i)
        left = _poly_matmul(M, Gp, zero)
        right = _poly_matmul(Gp, M, zero)
        for k in range(A.rank):
            for j in range(A.rank):
                if left[k][j] != right[k][j]:
                    witness = f"[Gamma_{i}, G][{k}][{j}] = {left[k][j] - right[k][j]}"
                    break
            if witness:
                break
        if witness:
            break
    report.add('commutes_with_metric', witness is None, witness)
    return report


# Curvature

def naive_curvature(A: CourantAlgebroid, D: GenConnection, a: Section, b: Section,
                    c: Section) -> Section:
    """R0(a,b)c = D_a D_b c - D_b D_a c - D_[a,b] c"""
    return (apply(A, D, a, apply(A, D, b, c)) - apply(A, D, b, apply(A, D, a, c))
            - apply(A, D, bracket(A, a, b), c))


def gamma_along(A: CourantAlgebroid, D: GenConnection, a: Section) -> PolyMatrix:
    """Gamma_a = sum_i a^i Gamma_i"""
    r = A.rank
    out = [[A.zero_poly() for _ in range(r)] for _ in range(r)]
    for i, ai in enumerate(a.coeffs):
        if ai.is_zero():
            continue
        M = D.matrix(i)
        for k in range(r):
            for j in range(r):
                if not M[k][j].is_zero():
                    out[k][j] = out[k][j] + ai * M[k][j]
    return out


def induced_derivative_on_endos(A: CourantAlgebroid, D: GenConnection, a: Section,
                                B: PolyMatrix) -> PolyMatrix:
    """(D_a B) = L_{rho a} B + [Gamma_a, B]"""
    r = A.rank
    if len(B) != r or any(len(row) != r for row in B):
        raise InputError(f"endomorphism must be {r}x{r}")
    B = [[x.with_variables(A.base_vars) if isinstance(x, Poly) else A.const(x) for x in row]
         for row in B]
    Ga = gamma_along(A, D, a)
    zero = A.zero_poly()
    left = _poly_matmul(Ga, B, zero)
    right = _poly_matmul(B, Ga, zero)
    return [[A.lie(a, B[k][j]) + left[k][j] - right[k][j] for j in range(r)] for k in range(r)]


def endo_apply(B: PolyMatrix, b: Section) -> Section:
    """B b for a frame matrix B"""
    out = []
    for row in B:
        total = None
        for m, x in zip(row, b.coeffs):
            if not m.is_zero() and not x.is_zero():
                term = m * x
                total = term if total is None else total + term
        out.append(total if total is not None else b.coeffs[0].scalar_mul(0))
    return Section(tuple(out))


def tensor_apply(A: CourantAlgebroid, B: GenConnection, a: Section, b: Section) -> Section:
    """B_a b = sum_ij a^i b^j B_ij for a difference of connections B in E* x End E"""
    _check_connection(A, B)
    out = [A.zero_poly() for _ in range(A.rank)]
    for i, ai in enumerate(a.coeffs):
        if ai.is_zero():
            continue
        for j, bj in enumerate(b.coeffs):
            g = B.Gamma[i][j]
            if bj.is_zero() or g.is_zero():
                continue
            f = ai * bj
            for k, c in enumerate(g.coeffs):
                if not c.is_zero():
                    out[k] = out[k] + f * c
    return Section(tuple(out))
