"""
Courant algebroids in a frame
Bracket, pairing, anchor, musical maps, traces and the axiom checker for
(E, rho, <.,.>, [.,.]) presented over a polynomial chart with a constant
pairing matrix.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import ratlinalg as rl
from .errors import InputError
from .polyalg import Poly, PolyVecField, Scalar, lie_derivative, poly_print, random_poly
from .reports import CheckReport
from .settings import Settings, get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Section:
    """Section of E as coordinates in the frame {e_i}"""
    coeffs: Tuple[Poly, ...]

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def __add__(self, other: 'Section') -> 'Section':
        _check_rank(self, other)
        return Section(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: 'Section') -> 'Section':
        _check_rank(self, other)
        return Section(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> 'Section':
        return Section(tuple(-a for a in self.coeffs))

    def scale(self, f) -> 'Section':
        """Multiply by a function (Poly) or a rational"""
        if isinstance(f, Poly):
            return Section(tuple(f * c for c in self.coeffs))
        return Section(tuple(c.scalar_mul(f) for c in self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self.coeffs)

    def __str__(self):
        return '(' + ', '.join(poly_print(c) for c in self.coeffs) + ')'


@dataclass(frozen=True)
class Covector:
    """Section of E* as coordinates in the dual frame"""
    coeffs: Tuple[Poly, ...]

    def __call__(self, a: Section) -> Poly:
        if len(a.coeffs) != len(self.coeffs):
            raise InputError(f"rank mismatch: covector {len(self.coeffs)}, section {len(a.coeffs)}")
        total = None
        for alpha, x in zip(self.coeffs, a.coeffs):
            term = alpha * x
            total = term if total is None else total + term
        return total if total is not None else Poly.zero()

    def __add__(self, other: 'Covector') -> 'Covector':
        return Covector(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: 'Covector') -> 'Covector':
        return Covector(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, f) -> 'Covector':
        if isinstance(f, Poly):
            return Covector(tuple(f * c for c in self.coeffs))
        return Covector(tuple(c.scalar_mul(f) for c in self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __str__(self):
        return '[' + ', '.join(poly_print(c) for c in self.coeffs) + ']'


def _check_rank(a, b):
    if len(a.coeffs) != len(b.coeffs):
        raise InputError(f"rank mismatch: {len(a.coeffs)} vs {len(b.coeffs)}")


@dataclass(frozen=True)
class CourantAlgebroid:
    """
    Frame presentation of a Courant algebroid

    Attributes:
        base_vars: chart coordinates (empty over a point)
        rank: rank r of E
        pairing: constant symmetric invertible r x r matrix <e_i, e_j>
        anchor: rho(e_i) as polynomial vector fields
        structure: structure[i][j] = [e_i, e_j] for all ordered pairs
        name: label used in reports
        metadata: convention notes
    """
    base_vars: Tuple[str, ...]
    rank: int
    pairing: Tuple[Tuple[Fraction, ...], ...]
    anchor: Tuple[PolyVecField, ...]
    structure: Tuple[Tuple[Section, ...], ...]
    name: str = 'unnamed'
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        r, n = self.rank, len(self.base_vars)
        if len(self.pairing) != r or any(len(row) != r for row in self.pairing):
            raise InputError(f"pairing must be {r}x{r}")
        P = [list(row) for row in self.pairing]
        if not rl.is_symmetric(P):
            raise InputError("pairing matrix is not symmetric")
        try:
            P_inv = rl.inverse(P)
        except InputError:
            raise InputError("pairing matrix is degenerate")
        if len(self.anchor) != r:
            raise InputError(f"anchor must have {r} rows")
        for row in self.anchor:
            if tuple(row.variables) != self.base_vars:
                raise InputError(f"anchor rows must use variables {self.base_vars}")
        if len(self.structure) != r or any(len(row) != r for row in self.structure):
            raise InputError(f"structure must be {r}x{r}")
        for row in self.structure:
            for s in row:
                if s.rank != r:
                    raise InputError(f"structure entries must have {r} coefficients")
        object.__setattr__(self, '_pairing_inv', P_inv)
        object.__setattr__(self, '_n', n)

    @classmethod
    def build(cls, base_vars: Sequence[str], pairing, anchor, structure,
              name: str = 'unnamed', metadata: Optional[dict] = None) -> 'CourantAlgebroid':
        """
        Build from plain nested lists

        Args:
            base_vars: chart coordinates
            pairing: r x r rationals
            anchor: r x n entries (Poly or rationals)
            structure: r x r x r entries (Poly or rationals)
        """
        base_vars = tuple(base_vars)
        r = len(pairing)

        def poly(x):
            return x.with_variables(base_vars) if isinstance(x, Poly) else Poly.const(x, base_vars)

        anchor_rows = tuple(
            PolyVecField(base_vars, tuple(poly(x) for x in row)) for row in anchor)
        struct = tuple(
            tuple(Section(tuple(poly(x) for x in entry)) for entry in row) for row in structure)
        return cls(base_vars=base_vars, rank=r,
                   pairing=tuple(tuple(Fraction(x) for x in row) for row in pairing),
                   anchor=anchor_rows, structure=struct, name=name,
                   metadata=dict(metadata or {}))

    # Frame helpers

    @property
    def nvars(self) -> int:
        return self._n

    @property
    def P(self) -> rl.Matrix:
        return [list(row) for row in self.pairing]

    @property
    def P_inv(self) -> rl.Matrix:
        return [list(row) for row in self._pairing_inv]

    def zero_poly(self) -> Poly:
        return Poly.zero(self.base_vars)

    def const(self, value: Scalar) -> Poly:
        return Poly.const(value, self.base_vars)

    def zero_section(self) -> Section:
        return Section(tuple(self.zero_poly() for _ in range(self.rank)))

    def frame(self, i: int) -> Section:
        return Section(tuple(self.const(int(j == i)) for j in range(self.rank)))

    def frame_list(self) -> List[Section]:
        return [self.frame(i) for i in range(self.rank)]

    def section(self, values: Sequence) -> Section:
        """Section from rationals or Polys"""
        if len(values) != self.rank:
            raise InputError(f"expected {self.rank} coefficients, got {len(values)}")
        return Section(tuple(v.with_variables(self.base_vars) if isinstance(v, Poly)
                             else self.const(v) for v in values))

    def dual_frame(self, i: int) -> Section:
        """Full-frame dual element with <dual_i, e_j> = delta_ij"""
        return Section(tuple(self.const(self._pairing_inv[k][i]) for k in range(self.rank)))

    def check_section(self, a: Section):
        if a.rank != self.rank:
            raise InputError(f"section has {a.rank} coefficients, algebroid rank is {self.rank}")

    # Anchor

    def anchor_of(self, a: Section) -> PolyVecField:
        """rho(a) = sum_i a^i rho(e_i)"""
        self.check_section(a)
        comps = []
        for mu in range(self._n):
            total = self.zero_poly()
            for i, ai in enumerate(a.coeffs):
                rho = self.anchor[i].components[mu]
                if not ai.is_zero() and not rho.is_zero():
                    total = total + ai * rho
            comps.append(total)
        return PolyVecField(self.base_vars, tuple(comps))

    def lie(self, a: Section, f: Poly) -> Poly:
        """L_{rho a} f"""
        if self._n == 0 or f.is_constant():
            return self.zero_poly()
        return lie_derivative(self.anchor_of(a), f)

    def d(self, f: Poly) -> List[Poly]:
        """Exterior derivative of a function as a list of n Polys"""
        f = f.with_variables(self.base_vars) if f.variables != self.base_vars else f
        return [f.diff(v) for v in self.base_vars]


# Operations

def pairing(A: CourantAlgebroid, a: Section, b: Section) -> Poly:
    """<a, b> = a^T P b"""
    A.check_section(a)
    A.check_section(b)
    total = A.zero_poly()
    for i, ai in enumerate(a.coeffs):
        if ai.is_zero():
            continue
        inner = A.zero_poly()
        for j, bj in enumerate(b.coeffs):
            p = A.pairing[i][j]
            if p and not bj.is_zero():
                inner = inner + bj.scalar_mul(p)
        if not inner.is_zero():
            total = total + ai * inner
    return total


def flat(A: CourantAlgebroid, a: Section) -> Covector:
    """a -> <a, .>"""
    A.check_section(a)
    coeffs = []
    for j in range(A.rank):
        total = A.zero_poly()
        for i, ai in enumerate(a.coeffs):
            p = A.pairing[i][j]
            if p and not ai.is_zero():
                total = total + ai.scalar_mul(p)
        coeffs.append(total)
    return Covector(tuple(coeffs))


def sharp(A: CourantAlgebroid, alpha: Covector) -> Section:
    """Inverse of flat: the section s with <s, .> = alpha"""
    if len(alpha.coeffs) != A.rank:
        raise InputError(f"covector has {len(alpha.coeffs)} coefficients, rank is {A.rank}")
    P_inv = A._pairing_inv
    coeffs = []
    for k in range(A.rank):
        total = A.zero_poly()
        for i, ai in enumerate(alpha.coeffs):
            p = P_inv[k][i]
            if p and not ai.is_zero():
                total = total + ai.scalar_mul(p)
        coeffs.append(total)
    return Section(tuple(coeffs))


def rho_star(A: CourantAlgebroid, df: Sequence[Poly]) -> Section:
    """
    rho^* of a base covector, identified with a section via the pairing

    Args:
        A: algebroid
        df: n Polys, components of a 1-form on the base

    Returns:
        the section s with <s, b> = df(rho b) for all b
    """
    if len(df) != A.nvars:
        raise InputError(f"base covector must have {A.nvars} components, got {len(df)}")
    values = []
    for i in range(A.rank):
        total = A.zero_poly()
        for mu, w in enumerate(df):
            rho = A.anchor[i].components[mu]
            if not w.is_zero() and not rho.is_zero():
                total = total + w * rho
        values.append(total)
    return sharp(A, Covector(tuple(values)))


def bracket(A: CourantAlgebroid, a: Section, b: Section) -> Section:
    """
    Courant (Dorfman) bracket of two sections

    Frame bracket extended with [a, fb] = f[a,b] + (L_{rho a} f) b and
    [fa, b] = f[a,b] - (L_{rho b} f) a + <a,b> rho^* df.
    """
    A.check_section(a)
    A.check_section(b)
    r = A.rank
    out = [A.zero_poly() for _ in range(r)]
    for i, ai in enumerate(a.coeffs):
        if ai.is_zero():
            continue
        for j, bj in enumerate(b.coeffs):
            if bj.is_zero():
                continue
            c = A.structure[i][j]
            if c.is_zero():
                continue
            f = ai * bj
            for k in range(r):
                if not c.coeffs[k].is_zero():
                    out[k] = out[k] + f * c.coeffs[k]
    if A.nvars:
        rho_a = A.anchor_of(a)
        rho_b = A.anchor_of(b)
        for j in range(r):
            out[j] = out[j] + _lie(rho_a, b.coeffs[j]) - _lie(rho_b, a.coeffs[j])
        # sum_i <e_i, b> rho^* d a^i
        Pb = flat(A, b).coeffs
        w = [A.zero_poly() for _ in range(A.nvars)]
        for i, ai in enumerate(a.coeffs):
            if ai.is_constant() or Pb[i].is_zero():
                continue
            for mu, dai in enumerate(A.d(ai)):
                if not dai.is_zero():
                    w[mu] = w[mu] + Pb[i] * dai
        if any(not x.is_zero() for x in w):
            anomaly = rho_star(A, w)
            out = [x + y for x, y in zip(out, anomaly.coeffs)]
    return Section(tuple(out))


def _lie(v: PolyVecField, f: Poly) -> Poly:
    if f.is_constant() or v.is_zero():
        return Poly.zero(v.variables)
    return lie_derivative(v, f)


def vector_field_bracket(X: PolyVecField, Y: PolyVecField) -> PolyVecField:
    """[X, Y]^mu = X(Y^mu) - Y(X^mu)"""
    comps = tuple(_lie(X, y) - _lie(Y, x) for x, y in zip(X.components, Y.components))
    return PolyVecField(X.variables, comps)


def trace_endo(A: CourantAlgebroid, B: Sequence[Sequence[Poly]]) -> Poly:
    """Trace of an endomorphism given by its frame matrix (B[k][i] = e_k-coefficient of B e_i)"""
    if len(B) != A.rank or any(len(row) != A.rank for row in B):
        raise InputError(f"endomorphism must be {A.rank}x{A.rank}")
    total = A.zero_poly()
    for i in range(A.rank):
        total = total + B[i][i]
    return total


def contract_B3(A: CourantAlgebroid, B3, b: Section) -> List[List[Poly]]:
    """Endomorphism a -> B_a b of an element of E* x E* x E (B3[i][j][k] = e_k-coeff of B_{e_i} e_j)"""
    _check_B3(A, B3)
    A.check_section(b)
    r = A.rank
    M = [[A.zero_poly() for _ in range(r)] for _ in range(r)]
    for i in range(r):
        for k in range(r):
            total = A.zero_poly()
            for j, bj in enumerate(b.coeffs):
                if not bj.is_zero() and not B3[i][j][k].is_zero():
                    total = total + B3[i][j][k] * bj
            M[k][i] = total
    return M


def trace1(A: CourantAlgebroid, B3) -> Covector:
    """tr_1(alpha x beta x a) = alpha(a) beta; component j is sum_i B3[i][j][i]"""
    _check_B3(A, B3)
    coeffs = []
    for j in range(A.rank):
        total = A.zero_poly()
        for i in range(A.rank):
            total = total + B3[i][j][i]
        coeffs.append(total)
    return Covector(tuple(coeffs))


def _check_B3(A: CourantAlgebroid, B3):
    r = A.rank
    if len(B3) != r or any(len(row) != r for row in B3) or \
            any(len(entry) != r for row in B3 for entry in row):
        raise InputError(f"tensor must have shape {r}x{r}x{r}")


# Randomized sections

def random_section(A: CourantAlgebroid, rng: np.random.Generator,
                   settings: Optional[Settings] = None) -> Section:
    s = settings or get_settings()
    return Section(tuple(random_poly(A.base_vars, rng, s.random_degree, s.random_coeff_bound)
                         for _ in range(A.rank)))


def random_function(A: CourantAlgebroid, rng: np.random.Generator,
                    settings: Optional[Settings] = None) -> Poly:
    s = settings or get_settings()
    return random_poly(A.base_vars, rng, s.random_degree, s.random_coeff_bound)


# Axiom checker

def jacobi_defect(A: CourantAlgebroid, a: Section, b: Section, c: Section) -> Section:
    """[a,[b,c]] - [[a,b],c] - [b,[a,c]]"""
    return (bracket(A, a, bracket(A, b, c)) - bracket(A, bracket(A, a, b), c)
            - bracket(A, b, bracket(A, a, c)))


def invariance_defect(A: CourantAlgebroid, a: Section, b: Section, c: Section) -> Poly:
    """L_{rho a}<b,c> - <[a,b],c> - <b,[a,c]>"""
    return (A.lie(a, pairing(A, b, c)) - pairing(A, bracket(A, a, b), c)
            - pairing(A, b, bracket(A, a, c)))


def symmetric_part_defect(A: CourantAlgebroid, a: Section) -> Section:
    """2[a,a] - rho^* d<a,a>"""
    twice = bracket(A, a, a).scale(2)
    if A.nvars == 0:
        return twice
    return twice - rho_star(A, A.d(pairing(A, a, a)))


def anchor_defect(A: CourantAlgebroid, a: Section, b: Section) -> PolyVecField:
    """rho[a,b] - [rho a, rho b]"""
    lhs = A.anchor_of(bracket(A, a, b))
    rhs = vector_field_bracket(A.anchor_of(a), A.anchor_of(b))
    return PolyVecField(A.base_vars, tuple(x - y for x, y in zip(lhs.components, rhs.components)))


def axiom_check(A: CourantAlgebroid, settings: Optional[Settings] = None,
                seed: Optional[int] = None) -> CheckReport:
    """
    Verify the Courant algebroid axioms exactly

    Axiom 1 (Jacobi) and axiom 2 (invariance) on all frame triples and on
    randomized polynomial-section triples; axiom 3 on frame elements, sums
    e_i + e_j and randomized sections; rho[a,b] = [rho a, rho b] on frame
    pairs. The first violation of each check is reported as the witness.
    """
    s = settings or get_settings()
    rng = np.random.default_rng(s.seed if seed is None else seed)
    report = CheckReport(name=f"axioms:{A.name}")
    frame = A.frame_list()
    r = A.rank
    randoms = [(random_section(A, rng, s), random_section(A, rng, s), random_section(A, rng, s))
               for _ in range(s.random_trials)]

    witness = None
    for i, j, k in itertools.product(range(r), repeat=3):
        defect = jacobi_defect(A, frame[i], frame[j], frame[k])
        if not defect.is_zero():
            witness = f"frame (e{i}, e{j}, e{k}): defect {defect}"
            break
    if witness is None:
        for t, (a, b, c) in enumerate(randoms):
            defect = jacobi_defect(A, a, b, c)
            if not defect.is_zero():
                witness = f"random triple {t}: a={a}, b={b}, c={c}: defect {defect}"
                break
    report.add('axiom1_jacobi', witness is None, witness)

    witness = None
    for i, j, k in itertools.product(range(r), repeat=3):
        defect = invariance_defect(A, frame[i], frame[j], frame[k])
        if not defect.is_zero():
            witness = f"frame (e{i}, e{j}, e{k}): defect {defect}"
            break
    if witness is None:
        for t, (a, b, c) in enumerate(randoms):
            defect = invariance_defect(A, a, b, c)
            if not defect.is_zero():
                witness = f"random triple {t}: defect {defect}"
                break
    report.add('axiom2_invariance', witness is None, witness)

    witness = None
    candidates = [(f"e{i}", frame[i]) for i in range(r)]
    candidates += [(f"e{i}+e{j}", frame[i] + frame[j]) for i in range(r) for j in range(i + 1, r)]
    candidates += [(f"random {t}", a) for t, (a, _, _) in enumerate(randoms)]
    for label, a in candidates:
        defect = symmetric_part_defect(A, a)
        if not defect.is_zero():
            witness = f"{label}: 2[a,a] - rho^*d<a,a> = {defect}"
            break
    report.add('axiom3_symmetric_part', witness is None, witness)

    witness = None
    if A.nvars:
        for i, j in itertools.product(range(r), repeat=2):
            defect = anchor_defect(A, frame[i], frame[j])
            if not defect.is_zero():
                witness = f"frame (e{i}, e{j}): defect {[str(c) for c in defect.components]}"
                break
    report.add('anchor_morphism', witness is None, witness)

    for v in report.verdicts:
        if not v.passed:
            logger.warning(f"{A.name}: {v.check} violated, {v.witness}")
    return report
