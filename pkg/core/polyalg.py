"""
Exact scalar arithmetic
Multivariate polynomials with rational coefficients, derivatives, Lie
derivatives along polynomial vector fields, and the textual grammar

    expr     := term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := rational | var ('^' nonneg-int)? | '(' expr ')' | '-' factor
    rational := int ('/' posint)?
"""

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DegreeOverflow, InputError, ParseError
from .settings import get_settings

Rational = Fraction
Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]


def _ordered_union(left: Tuple[str, ...], right: Tuple[str, ...]) -> Tuple[str, ...]:
    if left == right:
        return left
    seen = set(left)
    return left + tuple(v for v in right if v not in seen)


class Poly:
    """
    Immutable polynomial over Q in an ordered list of variables

    terms maps exponent tuples (one entry per variable) to nonzero Fractions;
    the zero polynomial has no terms.
    """

    __slots__ = ('variables', '_terms', '_degree', '_hash')

    def __init__(self, variables: Sequence[str] = (), terms: Optional[Mapping[Exponent, Scalar]] = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise InputError(f"duplicate variable names: {self.variables}")
        clean = {}
        n = len(self.variables)
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise InputError(f"exponent {exp} does not match variables {self.variables}")
            if any(e < 0 for e in exp):
                raise InputError(f"negative exponent in {exp}")
            coeff = Fraction(coeff)
            if coeff:
                clean[exp] = clean.get(exp, 0) + coeff
                if not clean[exp]:
                    del clean[exp]
        self._terms = clean
        self._degree = max((sum(e) for e in clean), default=0)
        self._hash = None

    @classmethod
    def _raw(cls, variables: Tuple[str, ...], terms: Dict[Exponent, Fraction]) -> 'Poly':
        # Trusted constructor: terms already canonical
        p = cls.__new__(cls)
        p.variables = variables
        p._terms = terms
        p._degree = max((sum(e) for e in terms), default=0)
        p._hash = None
        return p

    # Construction helpers

    @classmethod
    def zero(cls, variables: Sequence[str] = ()) -> 'Poly':
        return cls._raw(tuple(variables), {})

    @classmethod
    def const(cls, value: Scalar, variables: Sequence[str] = ()) -> 'Poly':
        variables = tuple(variables)
        value = Fraction(value)
        if not value:
            return cls._raw(variables, {})
        return cls._raw(variables, {(0,) * len(variables): value})

    @classmethod
    def var(cls, name: str, variables: Optional[Sequence[str]] = None) -> 'Poly':
        variables = tuple(variables) if variables is not None else (name,)
        if name not in variables:
            raise InputError(f"unknown variable '{name}'")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls._raw(variables, {exp: Fraction(1)})

    @classmethod
    def promote(cls, value: Union['Poly', Scalar], variables: Sequence[str] = ()) -> 'Poly':
        if isinstance(value, Poly):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.const(value, variables)
        raise InputError(f"cannot use {type(value).__name__} as a polynomial")

    # Inspection

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        return self._degree

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._degree == 0)

    def constant_value(self) -> Fraction:
        """Value of a constant polynomial"""
        if not self.is_constant():
            raise InputError(f"polynomial {self} is not constant")
        return next(iter(self._terms.values()), Fraction(0))

    def coefficient(self, exp: Exponent) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        total = Fraction(0)
        for exp, coeff in self._terms.items():
            value = coeff
            for name, e in zip(self.variables, exp):
                if e:
                    value *= Fraction(point[name]) ** e
            total += value
        return total

    # Variable alignment

    def with_variables(self, variables: Sequence[str]) -> 'Poly':
        """Re-express over a variable list containing every used variable"""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        index = {v: i for i, v in enumerate(variables)}
        for v, used in zip(self.variables, self._used()):
            if used and v not in index:
                raise InputError(f"variable '{v}' missing from {variables}")
        positions = [index.get(v) for v in self.variables]
        terms = {}
        for exp, coeff in self._terms.items():
            new = [0] * len(variables)
            for pos, e in zip(positions, exp):
                if e:
                    new[pos] = e
            terms[tuple(new)] = coeff
        return Poly._raw(variables, terms)

    def _used(self) -> List[bool]:
        used = [False] * len(self.variables)
        for exp in self._terms:
            for i, e in enumerate(exp):
                if e:
                    used[i] = True
        return used

    def _aligned(self, other: 'Poly') -> Tuple['Poly', 'Poly']:
        if self.variables == other.variables:
            return self, other
        variables = _ordered_union(self.variables, other.variables)
        return self.with_variables(variables), other.with_variables(variables)

    # Arithmetic

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self.variables)
        elif not isinstance(other, Poly):
            return NotImplemented
        if not other._terms and (other.variables == self.variables or not other.variables):
            return self
        if not self._terms and (self.variables == other.variables or not self.variables):
            return other
        a, b = self._aligned(other)
        terms = dict(a._terms)
        for exp, coeff in b._terms.items():
            value = terms.get(exp, 0) + coeff
            if value:
                terms[exp] = value
            else:
                terms.pop(exp, None)
        return Poly._raw(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self.variables)
        elif not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scalar_mul(self, c: Scalar) -> 'Poly':
        c = Fraction(c)
        if not c:
            return Poly._raw(self.variables, {})
        if c == 1:
            return self
        return Poly._raw(self.variables, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scalar_mul(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if not self._terms or not other._terms:
            return Poly._raw(_ordered_union(self.variables, other.variables), {})
        if other.is_constant() and (other.variables == self.variables or not other.variables):
            return self.scalar_mul(other.constant_value())
        if self.is_constant() and (self.variables == other.variables or not self.variables):
            return other.scalar_mul(self.constant_value())
        cap = get_settings().degree_cap
        if self._degree + other._degree > cap:
            # Over Q the top-degree parts never cancel
            raise DegreeOverflow(
                f"product degree {self._degree + other._degree} exceeds cap {cap}")
        a, b = self._aligned(other)
        terms: Dict[Exponent, Fraction] = {}
        for ea, ca in a._terms.items():
            for eb, cb in b._terms.items():
                exp = tuple(x + y for x, y in zip(ea, eb))
                value = terms.get(exp, 0) + ca * cb
                if value:
                    terms[exp] = value
                else:
                    terms.pop(exp, None)
        return Poly._raw(a.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise InputError("only nonnegative integer powers are supported")
        result = Poly.const(1, self.variables)
        for _ in range(n):
            result = result * self
        return result

    def diff(self, var: str) -> 'Poly':
        """Partial derivative with respect to var"""
        if var not in self.variables:
            raise InputError(f"unknown variable '{var}' (variables: {self.variables})")
        i = self.variables.index(var)
        terms = {}
        for exp, coeff in self._terms.items():
            e = exp[i]
            if e:
                new = exp[:i] + (e - 1,) + exp[i + 1:]
                terms[new] = coeff * e
        return Poly._raw(self.variables, terms)

    # Comparison

    def _canonical_key(self):
        return frozenset(
            (tuple((v, e) for v, e in zip(self.variables, exp) if e), c)
            for exp, c in self._terms.items()
        )

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return not self._terms
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, Poly):
            return NotImplemented
        if self.variables == other.variables:
            return self._terms == other._terms
        return self._canonical_key() == other._canonical_key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._canonical_key())
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __str__(self):
        return poly_print(self)

    def __repr__(self):
        return f"Poly({poly_print(self)!r}, variables={self.variables})"


@dataclass(frozen=True)
class PolyVecField:
    """Polynomial vector field sum_i components[i] * d/d variables[i]"""
    variables: Tuple[str, ...]
    components: Tuple[Poly, ...]

    def __post_init__(self):
        if len(self.variables) != len(self.components):
            raise InputError(
                f"vector field has {len(self.components)} components for "
                f"{len(self.variables)} variables")

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)


# Operations

def poly_arith(op: str, p: Poly, q: Union[Poly, Scalar]) -> Poly:
    """
    Exact ring operation

    Args:
        op: one of add, sub, mul, scalar_mul
        p: left operand
        q: right operand (a scalar for scalar_mul)
    """
    if op == 'add':
        return p + Poly.promote(q, p.variables)
    if op == 'sub':
        return p - Poly.promote(q, p.variables)
    if op == 'mul':
        return p * Poly.promote(q, p.variables)
    if op == 'scalar_mul':
        if isinstance(q, Poly):
            q = q.constant_value()
        return p.scalar_mul(q)
    raise InputError(f"unknown polynomial operation '{op}'")


def poly_diff(p: Poly, var: str) -> Poly:
    return p.diff(var)


def lie_derivative(v: PolyVecField, p: Poly) -> Poly:
    """L_v p = sum_i v_i * dp/dx_i"""
    if p.is_constant():
        return Poly.zero(_ordered_union(p.variables, v.variables))
    for name in p.variables:
        if name not in v.variables and any(exp[p.variables.index(name)] for exp in p._terms):
            raise InputError(f"vector field has no component for variable '{name}'")
    result = Poly.zero(_ordered_union(p.variables, v.variables))
    for name, component in zip(v.variables, v.components):
        if component.is_zero() or name not in p.variables:
            continue
        result = result + component * p.diff(name)
    return result


# Printing

def _monomial_str(variables: Tuple[str, ...], exp: Exponent) -> str:
    parts = []
    for name, e in zip(variables, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return '*'.join(parts)


def _grlex_key(variables: Tuple[str, ...]):
    # Graded lexicographic with variables compared by name, highest first
    order = sorted(range(len(variables)), key=lambda i: variables[i])

    def key(item):
        exp = item[0]
        return (-sum(exp), tuple(-exp[i] for i in order))
    return key


def poly_print(p: Poly) -> str:
    """Canonical text: graded-lex order, coefficients as p or p/q"""
    if p.is_zero():
        return '0'
    pieces = []
    for exp, coeff in sorted(p._terms.items(), key=_grlex_key(p.variables)):
        mono = _monomial_str(p.variables, exp)
        mag = abs(coeff)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not pieces:
            pieces.append(('-' if coeff < 0 else '') + body)
        else:
            pieces.append((' - ' if coeff < 0 else ' + ') + body)
    return ''.join(pieces)


# Parsing

_TOKEN_RE = re.compile(r'\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))')


class _Parser:
    """Recursive-descent parser for the polynomial grammar"""

    def __init__(self, text: str, variables: Optional[Sequence[str]]):
        self.text = text
        self.fixed = variables is not None
        self.variables = list(variables) if variables is not None else []
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _location(self, offset: int) -> Tuple[int, int]:
        line = self.text.count('\n', 0, offset) + 1
        column = offset - (self.text.rfind('\n', 0, offset) + 1) + 1
        return line, column

    def _error(self, message: str, offset: int):
        line, column = self._location(offset)
        raise ParseError(message, line, column, self.text)

    def _tokenize(self, text: str):
        tokens = []
        offset = 0
        while True:
            m = _TOKEN_RE.match(text, offset)
            if m is None or m.end() == offset:
                rest = text[offset:]
                if rest.strip() == '':
                    break
                bad = offset + (len(rest) - len(rest.lstrip()))
                self._error(f"unexpected character {text[bad]!r}", bad)
            start = m.start(m.lastgroup)
            tokens.append((m.lastgroup, m.group(m.lastgroup), start))
            offset = m.end()
        tokens.append(('end', '', len(text)))
        return tokens

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, value, offset = self.take()
        if kind != 'op' or value != op:
            self._error(f"expected '{op}', found {value or 'end of input'!r}", offset)

    def parse(self) -> Poly:
        if self.peek()[0] == 'end':
            self._error("empty expression", self.peek()[2])
        result = self.expr()
        kind, value, offset = self.peek()
        if kind != 'end':
            self._error(f"unexpected token {value!r}", offset)
        return result.with_variables(self.variables)

    def expr(self) -> Poly:
        result = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == 'op' and value in '+-':
                self.take()
                rhs = self.term()
                result = result + rhs if value == '+' else result - rhs
            else:
                return result

    def term(self) -> Poly:
        result = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == 'op' and value == '*':
                self.take()
                result = result * self.factor()
            else:
                return result

    def factor(self) -> Poly:
        kind, value, offset = self.take()
        if kind == 'num':
            numerator = int(value)
            nk, nv, _ = self.peek()
            if nk == 'op' and nv == '/':
                self.take()
                dk, dv, doff = self.take()
                if dk != 'num' or int(dv) == 0:
                    self._error("denominator must be a positive integer", doff)
                return Poly.const(Fraction(numerator, int(dv)))
            return Poly.const(numerator)
        if kind == 'name':
            if value not in self.variables:
                if self.fixed:
                    self._error(f"unknown variable '{value}'", offset)
                self.variables.append(value)
            base = Poly.var(value)
            nk, nv, _ = self.peek()
            if nk == 'op' and nv == '^':
                self.take()
                ek, ev, eoff = self.take()
                if ek != 'num':
                    self._error("exponent must be a nonnegative integer", eoff)
                return base ** int(ev)
            return base
        if kind == 'op' and value == '(':
            inner = self.expr()
            self.expect_op(')')
            return inner
        if kind == 'op' and value == '-':
            return -self.factor()
        self._error(f"unexpected token {value or 'end of input'!r}", offset)


def poly_parse(text: str, variables: Optional[Sequence[str]] = None) -> Poly:
    """
    Parse the polynomial grammar

    Args:
        text: polynomial text
        variables: fixed variable list; unknown names are rejected.
            When omitted, variables are taken in order of appearance.

    Returns:
        Poly over the fixed or discovered variables
    """
    return _Parser(text, variables).parse()


def parse_rational(text: str) -> Fraction:
    """Parse int ('/' posint)? with an optional leading minus sign"""
    m = re.fullmatch(r'\s*(-?)(\d+)(?:\s*/\s*(\d+))?\s*', text)
    if m is None or (m.group(3) is not None and int(m.group(3)) == 0):
        raise ParseError(f"invalid rational literal {text!r}", 1, 1, text)
    value = Fraction(int(m.group(2)), int(m.group(3) or 1))
    return -value if m.group(1) else value


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


# Randomized inputs

def monomials(nvars: int, max_degree: int) -> List[Exponent]:
    """All exponent tuples of total degree <= max_degree"""
    return [e for e in itertools.product(range(max_degree + 1), repeat=nvars)
            if sum(e) <= max_degree]


def random_poly(variables: Sequence[str], rng: np.random.Generator,
                degree: int = 2, bound: int = 3) -> Poly:
    """Seeded random polynomial, coefficients in [-bound, bound]"""
    variables = tuple(variables)
    terms = {}
    for exp in monomials(len(variables), degree):
        coeff = int(rng.integers(-bound, bound + 1))
        if coeff:
            terms[exp] = Fraction(coeff)
    return Poly._raw(variables, terms)


def poly_sum(items: Iterable[Poly], variables: Sequence[str] = ()) -> Poly:
    total = Poly.zero(variables)
    for item in items:
        total = total + item
    return total
