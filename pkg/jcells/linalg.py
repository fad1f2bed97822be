"""
Exact linear algebra over Fractions, Cyclotomic numbers, integers and
HalfLaurent polynomials. Matrices are lists of rows.
"""

import logging
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from jcells.errors import InconsistentSystemError

logger = logging.getLogger(__name__)

Matrix = List[List]


def identity(n: int, one=1, zero=0) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*m)] if m else []


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], zero=0) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError(f"Shape mismatch: {len(a)}x{len(a[0])} times {len(b)}x{len(b[0]) if b else 0}")
    cols = len(b[0]) if b else 0
    result = []
    for row in a:
        out = [zero] * cols
        for k, x in enumerate(row):
            if x:
                for j, y in enumerate(b[k]):
                    if y:
                        out[j] = out[j] + x * y
        result.append(out)
    return result


def row_reduce(rows: Sequence[Sequence], ncols: Optional[int] = None) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form over a field; returns (nonzero rows, pivot columns)."""
    work = [list(r) for r in rows]
    if ncols is None:
        ncols = len(work[0]) if work else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(work)) if work[i][c]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        pivot_value = work[r][c]
        inv = Fraction(1, pivot_value) if isinstance(pivot_value, int) else 1 / pivot_value
        work[r] = [x * inv if x else x for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c]:
                factor = work[i][c]
                work[i] = [x - factor * y if y else x for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows or not rows[0]:
        return 0
    return len(row_reduce(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int, one=Fraction(1), zero=Fraction(0)) -> Matrix:
    """Basis of {x : rows . x = 0}."""
    reduced, pivots = row_reduce(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [zero] * ncols
        vec[f] = one
        for row, p in zip(reduced, pivots):
            if row[f]:
                vec[p] = -row[f]
        basis.append(vec)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence, zero=Fraction(0)) -> Tuple[List, Matrix]:
    """
    Solve rows . x = rhs over a field.

    Returns:
        (particular solution, nullspace basis)
    Raises:
        InconsistentSystemError when there is no solution
    """
    ncols = len(rows[0]) if rows else 0
    augmented = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = row_reduce(augmented, ncols + 1)
    if ncols in pivots:
        raise InconsistentSystemError("inconsistent constraints: the linear system has no solution")
    solution = [zero] * ncols
    for row, p in zip(reduced, pivots):
        solution[p] = row[ncols]
    return solution, nullspace(rows, ncols, one=zero + 1, zero=zero)


class SparseEliminator:
    """Incremental rank of sparse vectors (dicts key -> field element)."""

    def __init__(self):
        self.pivots: Dict[Hashable, Dict[Hashable, object]] = {}

    def add(self, vector: Dict[Hashable, object]) -> bool:
        """Insert a vector; True if it increased the rank."""
        v = {k: x for k, x in vector.items() if x}
        for key, row in self.pivots.items():
            c = v.get(key)
            if c:
                for k, x in row.items():
                    y = v.get(k, 0) - c * x
                    if y:
                        v[k] = y
                    else:
                        v.pop(k, None)
        if not v:
            return False
        key = min(v, key=repr)
        inv = Fraction(1, v[key]) if isinstance(v[key], int) else 1 / v[key]
        self.pivots[key] = {k: x * inv for k, x in v.items()}
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


def sparse_rank(vectors: Iterable[Dict[Hashable, object]]) -> int:
    eliminator = SparseEliminator()
    for v in vectors:
        eliminator.add(v)
    return eliminator.rank


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q of an integer matrix, by fraction-free elimination."""
    work = [list(r) for r in rows if any(r)]
    if not work:
        return 0
    ncols = len(work[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(work)) if work[i][c]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        p = work[r][c]
        for i in range(r + 1, len(work)):
            if work[i][c]:
                f = work[i][c]
                row = [p * x - f * y for x, y in zip(work[i], work[r])]
                g = 0
                for x in row:
                    g = gcd(g, x)
                work[i] = [x // g for x in row] if g > 1 else row
        r += 1
        if r == len(work):
            break
    return r


def determinant(matrix: Sequence[Sequence], exact_div: Optional[Callable] = None, one=1, zero=0):
    """
    Bareiss fraction-free determinant over an integral domain.

    exact_div(a, b) must return a / b when the division is exact; integer
    floor division is used by default.
    """
    n = len(matrix)
    if n == 0:
        return one
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant needs a square matrix")
    if exact_div is None:
        exact_div = lambda a, b: a // b
    work = [list(row) for row in matrix]
    sign = 1
    previous = one
    for k in range(n - 1):
        if not work[k][k]:
            swap = next((i for i in range(k + 1, n) if work[i][k]), None)
            if swap is None:
                return zero
            work[k], work[swap] = work[swap], work[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                work[i][j] = exact_div(work[i][j] * work[k][k] - work[i][k] * work[k][j], previous)
        previous = work[k][k]
    det = work[n - 1][n - 1]
    return det if sign == 1 else -det


# ---------------------------------------------------------------------------
# Smith normal form over the integers
# ---------------------------------------------------------------------------

class SmithNormalForm:
    """
    Smith normal form D = U . A . V of an integer matrix by the extended
    Euclidean pivoting scheme; U and V are unimodular.
    """

    def __init__(self, matrix: Sequence[Sequence[int]]):
        self.rows = len(matrix)
        self.cols = len(matrix[0]) if matrix else 0
        self.A = [[int(x) for x in row] for row in matrix]
        self.left = identity(self.rows)
        self.right = identity(self.cols)
        self._computed = False

    def compute(self) -> Tuple[Matrix, Matrix, Matrix]:
        """Returns (D, U, V) with D = U A V."""
        if not self._computed:
            s = 0
            while s < min(self.rows, self.cols):
                if not self._step(s):
                    break
                s += 1
            self._computed = True
        return self.A, self.left, self.right

    def diagonal(self) -> List[int]:
        D, _, _ = self.compute()
        return [D[i][i] for i in range(min(self.rows, self.cols))]

    def invariant_factors(self) -> List[int]:
        """Nonzero diagonal entries, each dividing the next."""
        return [d for d in self.diagonal() if d]

    def _pivot(self, s: int) -> Optional[Tuple[int, int]]:
        best = None
        for i in range(s, self.rows):
            for j in range(s, self.cols):
                x = self.A[i][j]
                if x and (best is None or abs(x) < abs(self.A[best[0]][best[1]])):
                    best = (i, j)
        return best

    def _step(self, s: int) -> bool:
        """Clear row and column s; False when the remaining block is zero."""
        while True:
            position = self._pivot(s)
            if position is None:
                return False
            self._swap_rows(s, position[0])
            self._swap_cols(s, position[1])
            p = self.A[s][s]
            for i in range(s + 1, self.rows):
                if self.A[i][s]:
                    self._add_row(i, s, -(self.A[i][s] // p))
            for j in range(s + 1, self.cols):
                if self.A[s][j]:
                    self._add_col(j, s, -(self.A[s][j] // p))
            if any(self.A[i][s] for i in range(s + 1, self.rows)) or any(self.A[s][j] for j in range(s + 1, self.cols)):
                continue
            bad = next(((i, j) for i in range(s + 1, self.rows) for j in range(s + 1, self.cols)
                        if self.A[i][j] % p), None)
            if bad is not None:
                self._add_row(s, bad[0], 1)
                continue
            if p < 0:
                self.A[s] = [-x for x in self.A[s]]
                self.left[s] = [-x for x in self.left[s]]
            return True

    def _swap_rows(self, a: int, b: int):
        if a != b:
            self.A[a], self.A[b] = self.A[b], self.A[a]
            self.left[a], self.left[b] = self.left[b], self.left[a]

    def _swap_cols(self, a: int, b: int):
        if a != b:
            for row in self.A:
                row[a], row[b] = row[b], row[a]
            for row in self.right:
                row[a], row[b] = row[b], row[a]

    def _add_row(self, target: int, source: int, k: int):
        """row[target] += k * row[source]"""
        self.A[target] = [x + k * y for x, y in zip(self.A[target], self.A[source])]
        self.left[target] = [x + k * y for x, y in zip(self.left[target], self.left[source])]

    def _add_col(self, target: int, source: int, k: int):
        """col[target] += k * col[source]"""
        for row in self.A:
            row[target] += k * row[source]
        for row in self.right:
            row[target] += k * row[source]


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> Tuple[Matrix, Matrix, Matrix]:
    return SmithNormalForm(matrix).compute()


def determinantal_divisors(matrix: Sequence[Sequence[int]]) -> List[int]:
    """gcd of all k x k minors, k = 1..rank; a slow oracle for invariant factors."""
    rows = len(matrix)
    cols = len(matrix[0]) if matrix else 0
    divisors = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for r in combinations(range(rows), k):
            for c in combinations(range(cols), k):
                g = gcd(g, determinant([[matrix[i][j] for j in c] for i in r]))
        if g == 0:
            break
        divisors.append(g)
    return divisors


def solve_mod(rows: Sequence[Sequence[int]], rhs: Sequence[int], modulus: int) -> Optional[List[int]]:
    """
    Solve rows . x = rhs (mod modulus) with the Smith form; None if unsolvable.
    """
    if modulus <= 0:
        raise ValueError(f"Invalid modulus: {modulus}. Expected a positive integer")
    ncols = len(rows[0]) if rows else 0
    D, U, V = smith_normal_form(rows)
    transformed = [sum(u * b for u, b in zip(urow, rhs)) % modulus for urow in U]
    y = [0] * ncols
    for i, value in enumerate(transformed):
        d = D[i][i] if i < ncols else 0
        if d == 0:
            if value % modulus:
                return None
            continue
        g = gcd(d, modulus)
        if value % g:
            return None
        reduced_mod = modulus // g
        y[i] = (value // g) * pow(d // g, -1, reduced_mod) % reduced_mod if reduced_mod > 1 else 0
    return [sum(v * yj for v, yj in zip(vrow, y)) % modulus for vrow in V]


def _reduce_mod_prime(rows: Sequence[Sequence[int]], ncols: int, p: int) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form over F_p of the first ncols columns."""
    work = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(work)) if work[i][c]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = pow(work[r][c], -1, p)
        work[r] = [(x * inv) % p for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [(x - f * y) % p for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    return work, pivots


def nullspace_mod_prime(rows: Sequence[Sequence[int]], ncols: int, p: int) -> Matrix:
    """Basis of the kernel of rows over F_p, one vector per free column."""
    work, pivots = _reduce_mod_prime(rows, ncols, p)
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        vec = [0] * ncols
        vec[free] = 1
        for row, pc in zip(work, pivots):
            vec[pc] = (-row[free]) % p
        basis.append(vec)
    return basis


def solve_mod_prime(augmented: Sequence[Sequence[int]], ncols: int, p: int) -> List[int]:
    """
    Solve the system whose augmented matrix is given over F_p. Free variables
    are set to zero.
    """
    work, pivots = _reduce_mod_prime(augmented, ncols, p)
    for row in work[len(pivots):]:
        if row[ncols]:
            raise InconsistentSystemError(f"System has no solution modulo {p}")
    solution = [0] * ncols
    for row, pc in zip(work, pivots):
        solution[pc] = row[ncols]
    return solution
