from fractions import Fraction

import pytest

from jcells.arith import Cyclotomic, HalfLaurent
from jcells.errors import InconsistentSystemError
from jcells.linalg import (SmithNormalForm, SparseEliminator, determinant, determinantal_divisors,
                           integer_rank, matmul, nullspace, nullspace_mod_prime, rank, smith_normal_form, solve,
                           solve_mod, solve_mod_prime, sparse_rank, transpose)


def test_matmul_and_transpose():
    a = [[1, 2], [3, 4]]
    assert matmul(a, transpose(a)) == [[5, 11], [11, 25]]
    with pytest.raises(ValueError, match="Shape mismatch"):
        matmul(a, [[1, 2, 3]])


def test_rank_and_nullspace():
    rows = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert rank(rows) == 2
    basis = nullspace(rows, 3)
    assert len(basis) == 1
    assert matmul(rows, transpose(basis)) == [[0], [0], [0]]


def test_solve_with_free_directions():
    solution, kernel = solve([[1, 1, 0]], [Fraction(3)])
    assert solution[0] + solution[1] == 3
    assert len(kernel) == 2


def test_solve_inconsistent():
    with pytest.raises(InconsistentSystemError, match="inconsistent constraints"):
        solve([[1, 1], [2, 2]], [Fraction(1), Fraction(3)])


def test_sparse_eliminator_over_cyclotomics():
    i = Cyclotomic.root_of_unity(4)
    eliminator = SparseEliminator()
    assert eliminator.add({'a': i, 'b': Cyclotomic.rational(1)})
    assert not eliminator.add({'a': Cyclotomic.rational(-1), 'b': i})
    assert eliminator.add({'c': Cyclotomic.rational(2)})
    assert eliminator.rank == 2


def test_sparse_rank_matches_dense_rank():
    rows = [[1, 0, 2], [0, 1, 1], [1, 1, 3]]
    assert sparse_rank({j: x for j, x in enumerate(r)} for r in rows) == rank(rows) == integer_rank(rows) == 2


@pytest.mark.parametrize("matrix, expected", [
    ([[2]], 2),
    ([[0, 1], [1, 0]], -1),
    ([[1, 2, 3], [4, 5, 6], [7, 8, 10]], -3),
    ([[1, 2], [2, 4]], 0),
])
def test_integer_determinant(matrix, expected):
    assert determinant(matrix) == expected


def test_laurent_determinant():
    v = HalfLaurent.v(1) + HalfLaurent.v(-1)
    one, zero = HalfLaurent.constant(1), HalfLaurent()
    matrix = [[v, one], [zero, v]]
    det = determinant(matrix, exact_div=lambda a, b: a.exact_div(b), one=one, zero=zero)
    assert det == v * v


@pytest.mark.parametrize("matrix", [
    [[2, 4, 4], [-6, 6, 12], [10, -4, -16]],
    [[1, 1], [1, -1]],
    [[6, 0], [0, 4]],
    [[0, 0], [0, 0]],
    [[3, 1, 2]],
])
def test_smith_form_against_determinantal_divisors(matrix):
    D, U, V = smith_normal_form(matrix)
    assert matmul(matmul(U, matrix), V) == D
    factors = SmithNormalForm(matrix).invariant_factors()
    divisors = determinantal_divisors(matrix)
    expected = [divisors[0]] + [b // a for a, b in zip(divisors, divisors[1:])] if divisors else []
    assert factors == expected
    assert all(b % a == 0 for a, b in zip(factors, factors[1:]))


def test_smith_known_factors():
    assert SmithNormalForm([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]).invariant_factors() == [2, 6, 12]
    assert SmithNormalForm([[6, 0], [0, 4]]).invariant_factors() == [2, 12]


def test_solve_mod():
    x = solve_mod([[2, 0], [0, 3]], [4, 3], 6)
    assert x is not None
    assert (2 * x[0]) % 6 == 4 and (3 * x[1]) % 6 == 3
    assert solve_mod([[2]], [1], 4) is None
    with pytest.raises(ValueError, match="modulus"):
        solve_mod([[1]], [0], 0)


def test_nullspace_mod_prime():
    rows = [[1, 2, 3], [2, 4, 6]]
    basis = nullspace_mod_prime(rows, 3, 7)
    assert len(basis) == 2
    for v in basis:
        assert all(sum(a * b for a, b in zip(row, v)) % 7 == 0 for row in rows)
    assert nullspace_mod_prime([[1, 0], [0, 1]], 2, 5) == []


def test_solve_mod_prime():
    x = solve_mod_prime([[1, 1, 3], [1, 6, 1]], 2, 7)
    assert (x[0] + x[1]) % 7 == 3 and (x[0] + 6 * x[1]) % 7 == 1
    # free variable set to zero
    assert solve_mod_prime([[1, 2, 4]], 2, 5) == [4, 0]
    with pytest.raises(InconsistentSystemError, match="modulo 5"):
        solve_mod_prime([[1, 1, 1], [2, 2, 3]], 2, 5)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_random_kernels_mod_prime(rng, p):
    for _ in range(40):
        rows = [[rng.randint(-4, 4) for _ in range(4)] for _ in range(3)]
        basis = nullspace_mod_prime(rows, 4, p)
        for v in basis:
            assert all(sum(a * b for a, b in zip(row, v)) % p == 0 for row in rows)
        # row rank equals column rank
        assert len(nullspace_mod_prime(transpose(rows), 3, p)) == len(basis) - 1
        rhs = [sum(a * b for a, b in zip(row, [1, 2, 0, 3])) for row in rows]
        x = solve_mod_prime([row + [b] for row, b in zip(rows, rhs)], 4, p)
        assert all((sum(a * b for a, b in zip(row, x)) - b) % p == 0 for row, b in zip(rows, rhs))
