from math import gcd

import pytest

from jcells.adjquot import (LatticeAuto, actions_from_generators, cartan_classes, coinvariants, component_quotient,
                            naive_cokernel, rep_decomposition_check)
from jcells.fingroup import cyclic
from jcells.linalg import SmithNormalForm, identity, matmul
from jcells.repring import RingSpec

# simple reflections of W(A2) on the root lattice, simple-root coordinates
S1 = LatticeAuto.of([[-1, 1], [0, 1]])
S2 = LatticeAuto.of([[1, 0], [1, -1]])


def minus_identity(a: LatticeAuto):
    return [[(1 if i == j else 0) - x for j, x in enumerate(row)] for i, row in enumerate(a.matrix)]


def random_sign_permutation(rng, n):
    """A signed permutation matrix conjugated by a random unimodular matrix, with its cycle signs."""
    perm = list(range(n))
    rng.shuffle(perm)
    signs = [rng.choice((1, -1)) for _ in range(n)]
    P = [[0] * n for _ in range(n)]
    for j in range(n):
        P[perm[j]][j] = signs[j]
    U, U_inv = identity(n), identity(n)
    for _ in range(3 if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.choice((1, -1, 2))
        E, E_inv = identity(n), identity(n)
        E[i][j], E_inv[i][j] = c, -c
        U, U_inv = matmul(E, U), matmul(U_inv, E_inv)
    cycle_signs = []
    seen = set()
    for start in range(n):
        if start in seen:
            continue
        sign, j = 1, start
        while j not in seen:
            seen.add(j)
            sign *= signs[j]
            j = perm[j]
        cycle_signs.append(sign)
    return LatticeAuto.of(matmul(matmul(U, P), U_inv)), cycle_signs


class TestLatticeAuto:
    def test_parse(self):
        swap = LatticeAuto.parse("0,1;1,0")
        assert swap.rank == 2
        assert swap.order == 2
        assert swap.to_text() == "0,1;1,0"

    def test_coxeter_element_order(self):
        assert (S1 @ S2).order == 3

    def test_infinite_order(self):
        with pytest.raises(ValueError, match="infinite-order input"):
            LatticeAuto.parse("1,1;0,1")

    def test_not_invertible(self):
        with pytest.raises(ValueError, match="determinant"):
            LatticeAuto.parse("2,0;0,1")

    def test_bad_text(self):
        with pytest.raises(ValueError, match="Could not parse matrix"):
            LatticeAuto.parse("a,b;c,d")


class TestCoinvariants:
    @pytest.mark.parametrize("text, free_rank, torsion", [
        ("0,1;1,0", 1, []),
        ("1,0;0,1", 2, []),
        ("-1,0;0,-1", 0, [2, 2]),
        ("0,0,1;1,0,0;0,1,0", 1, []),
    ])
    def test_smith_form(self, text, free_rank, torsion):
        report = coinvariants(LatticeAuto.parse(text))
        assert report.free_rank == free_rank
        assert report.torsion == torsion
        assert report.d == report.fixed_rank

    def test_coxeter_torsion(self):
        report = coinvariants(S1 @ S2)
        assert report.d == 0
        assert report.torsion == [3]

    @pytest.mark.parametrize("a, modulus, expected", [
        (LatticeAuto.parse("-1,0;0,-1"), 4, 4),
        (S1 @ S2, 9, 3),
        (S1, 5, 5),
    ])
    def test_naive_cokernel_agrees(self, a, modulus, expected):
        assert naive_cokernel(minus_identity(a), modulus) == expected

    @pytest.mark.slow
    def test_random_conjugated_sign_permutations(self, rng):
        for _ in range(500):
            a, cycle_signs = random_sign_permutation(rng, rng.randint(1, 4))
            report = coinvariants(a)
            assert report.free_rank == a.fixed_rank() == cycle_signs.count(1)
            assert report.torsion == [2] * cycle_signs.count(-1)

    @pytest.mark.parametrize("size", [2, 3])
    @pytest.mark.parametrize("modulus", [2, 3, 4, 6])
    def test_smith_form_against_naive_cokernel(self, rng, size, modulus):
        for _ in range(40):
            matrix = [[rng.randint(-3, 3) for _ in range(size)] for _ in range(size)]
            expected = 1
            for d in SmithNormalForm(matrix).diagonal():
                expected *= gcd(d, modulus)
            assert naive_cokernel(matrix, modulus) == expected, matrix


class TestComponents:
    def test_o2(self):
        group = cyclic(2)
        actions = actions_from_generators(group, [LatticeAuto.of([[-1]])])
        components = component_quotient(1, group, actions)
        assert [c.d for c in components] == [1, 0]
        assert components[1].torsion == [2]

    def test_s3_on_a2(self, s3):
        actions = actions_from_generators(s3, [S1, S2])
        components = component_quotient(2, s3, actions)
        assert [c.d for c in components] == [2, 1, 0]
        assert [c.class_size for c in components] == [1, 3, 2]
        assert components[2].torsion == [3]
        assert components[0].residual_order == 6
        assert components[1].residual_order == 1
        assert components[1].centralizer_order == 2

    def test_non_homomorphic(self):
        with pytest.raises(ValueError, match="non-homomorphic action data"):
            actions_from_generators(cyclic(3), [LatticeAuto.of([[-1]])])

    def test_wrong_generator_count(self, s3):
        with pytest.raises(ValueError, match="generators"):
            actions_from_generators(s3, [S1])

    def test_rank_mismatch(self):
        group = cyclic(2)
        actions = actions_from_generators(group, [LatticeAuto.of([[-1]])])
        with pytest.raises(ValueError, match="rank 2"):
            component_quotient(2, group, actions)

    def test_cartan_classes(self, s3):
        assert len(cartan_classes(s3)) == 3
        assert len(cartan_classes(cyclic(4))) == 3
        assert len(cartan_classes(cyclic(6))) == 4


class TestRepDecomposition:
    @pytest.mark.parametrize("n", [1, 2])
    def test_pin_cover(self, n):
        result = rep_decomposition_check(RingSpec('O_even', n), samples=20)
        assert result.passed, result.errors
        assert result.data['summands'][1] == ['pi']

    def test_without_cover(self):
        result = rep_decomposition_check(RingSpec('O_even', 2), cover=False, samples=20)
        assert result.passed
        assert len(result.data['summands']) == 1

    def test_rejects_other_rings(self):
        with pytest.raises(ValueError, match="Expected O_even"):
            rep_decomposition_check(RingSpec('Sp', 2))
        with pytest.raises(ValueError, match="budget"):
            rep_decomposition_check(RingSpec('O_even', 3))
