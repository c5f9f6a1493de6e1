"""
Exact linear algebra over the rationals
Matrices are lists of rows of Fractions
"""

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import InputError

Matrix = List[List[Fraction]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(n: int, m: Optional[int] = None) -> Matrix:
    return [[Fraction(0)] * (n if m is None else m) for _ in range(n)]


def shape(a: Matrix) -> Tuple[int, int]:
    return len(a), (len(a[0]) if a else 0)


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence[Fraction]) -> List[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a: Matrix, c) -> Matrix:
    c = Fraction(c)
    return [[x * c for x in row] for row in a]


def is_symmetric(a: Matrix) -> bool:
    n = len(a)
    return all(a[i][j] == a[j][i] for i in range(n) for j in range(i + 1, n))


def column(a: Matrix, j: int) -> List[Fraction]:
    return [row[j] for row in a]


def _row_reduce(a: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns"""
    m = [list(row) for row in a]
    rows, cols = shape(m)
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        factor = m[r][c]
        m[r] = [x / factor for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                shift = m[i][c]
                m[i] = [x - shift * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Matrix) -> int:
    return len(_row_reduce(a)[1])


def independent_columns(a: Matrix) -> List[int]:
    """Indices of the leftmost linearly independent columns"""
    return _row_reduce(a)[1]


def inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan inverse; InputError when singular"""
    n, m = shape(a)
    if n != m:
        raise InputError(f"cannot invert a {n}x{m} matrix")
    augmented = [list(row) + ident for row, ident in zip(a, identity(n))]
    reduced, pivots = _row_reduce(augmented)
    if pivots[:n] != list(range(n)):
        raise InputError("matrix is singular")
    return [row[n:] for row in reduced]


def solve(a: Matrix, b: Sequence[Fraction]) -> List[Fraction]:
    """Unique solution of a x = b for square invertible a"""
    return matvec(inverse(a), b)


def nullspace(a: Matrix) -> List[List[Fraction]]:
    """Basis of {x : a x = 0}, one vector per free column of the echelon form"""
    reduced, pivots = _row_reduce(a)
    cols = shape(a)[1]
    basis = []
    for free in (c for c in range(cols) if c not in pivots):
        x = [Fraction(0)] * cols
        x[free] = Fraction(1)
        for row, p in zip(reduced, pivots):
            x[p] = -row[free]
        basis.append(x)
    return basis
