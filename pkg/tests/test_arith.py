from fractions import Fraction
from math import gcd

import pytest

from jcells.arith import (Cyclotomic, HalfLaurent, TorusChar, as_cyclotomic, parse_point,
                          poly_divides_power)


class TestCyclotomic:
    def test_fourth_root_squares_to_minus_one(self):
        i = Cyclotomic.root_of_unity(4)
        assert i * i == -1
        assert i ** 4 == 1
        assert (i ** 3) == i.inverse()

    def test_cube_roots_sum_to_zero(self):
        w = Cyclotomic.root_of_unity(3)
        assert (1 + w + w * w).is_zero()

    def test_mixed_orders_are_lifted(self):
        i = Cyclotomic.root_of_unity(4)
        w = Cyclotomic.root_of_unity(3)
        product = i * w
        assert product.order == 12
        assert product ** 12 == 1
        assert product ** 6 == -1

    def test_rational_equality_across_orders(self):
        assert Cyclotomic.rational(Fraction(1, 2), order=6) == Fraction(1, 2)
        assert Cyclotomic.rational(3, order=5) == Cyclotomic.rational(3)
        assert hash(Cyclotomic.rational(3, order=5)) == hash(Cyclotomic.rational(3))

    def test_division_and_inverse(self):
        w = Cyclotomic.root_of_unity(3)
        x = 2 + w
        assert x * x.inverse() == 1
        assert (1 / x) * x == 1
        with pytest.raises(ZeroDivisionError):
            Cyclotomic(3).inverse()

    def test_conjugate_and_trace(self):
        w = Cyclotomic.root_of_unity(3)
        assert w.conjugate() == w * w
        assert w.normalized_trace() == Fraction(-1, 2)
        assert Cyclotomic.rational(5, order=7).normalized_trace() == 5

    def test_not_rational(self):
        with pytest.raises(ValueError, match="not rational"):
            Cyclotomic.root_of_unity(4).to_fraction()

    def test_json_round_trip(self):
        x = Cyclotomic.root_of_unity(8, 3) * Fraction(2, 3) + 1
        assert Cyclotomic.from_json(x.to_json()) == x

    def test_as_cyclotomic(self):
        assert as_cyclotomic(Fraction(3, 4)) == Fraction(3, 4)
        i = Cyclotomic.root_of_unity(4)
        assert as_cyclotomic(i) is i


@pytest.mark.parametrize("text, expected", [
    ("2", Fraction(2)),
    ("-1/2", Fraction(-1, 2)),
    ("zeta4", Cyclotomic.root_of_unity(4)),
    ("zeta12^5", Cyclotomic.root_of_unity(12, 5)),
    ("-zeta3", -Cyclotomic.root_of_unity(3)),
])
def test_parse_point(text, expected):
    assert parse_point(text) == expected


def test_parse_point_rejects_garbage():
    with pytest.raises(ValueError, match="evaluation point"):
        parse_point("i")


class TestHalfLaurent:
    def test_parse_and_text(self):
        p = HalfLaurent.parse("q^{1/2} + q^{-1/2}")
        assert p == HalfLaurent.v(1) + HalfLaurent.v(-1)
        assert p.to_text() == "q^-1/2 + q^1/2"
        assert HalfLaurent.parse(p.to_text()) == p

    def test_parse_coefficients(self):
        p = HalfLaurent.parse("2q^2 - (1/3)q + 5")
        assert p.terms == {4: 2, 2: Fraction(-1, 3), 0: 5}

    @pytest.mark.parametrize("bad", ["", "q^x", "2q3", "q^{1/3}"])
    def test_parse_errors(self, bad):
        with pytest.raises(ValueError):
            HalfLaurent.parse(bad)

    def test_square_of_balanced_factor(self):
        p = (HalfLaurent.v(1) + HalfLaurent.v(-1)) ** 2
        assert p == HalfLaurent.parse("q + 2 + q^-1")
        assert p.factored_text() == "(q^{1/2}+q^{-1/2})^2"
        assert (-2 * p).factored_text() == "-2*(q^{1/2}+q^{-1/2})^2"

    def test_factored_text_falls_back(self):
        p = HalfLaurent.parse("1 + q")
        assert p.factored_text() == p.to_text()

    def test_exact_div(self):
        p = HalfLaurent.parse("q^2 - 1")
        assert p.exact_div(HalfLaurent.parse("q - 1")) == HalfLaurent.parse("q + 1")
        with pytest.raises(ArithmeticError):
            p.exact_div(HalfLaurent.parse("q + 2"))
        with pytest.raises(ZeroDivisionError):
            p.exact_div(HalfLaurent())

    def test_evaluate(self):
        p = HalfLaurent.parse("q^{1/2} + q^{-1/2}")
        assert p.evaluate(1) == 2
        assert p.evaluate(Fraction(1, 2)) == Fraction(5, 2)
        assert p.evaluate(Cyclotomic.root_of_unity(4)) == 0

    def test_negative_powers_need_monomials(self):
        assert HalfLaurent.v(3) ** -1 == HalfLaurent.v(-3)
        with pytest.raises(ValueError, match="monomials"):
            HalfLaurent.parse("1 + q") ** -1

    def test_json_round_trip(self):
        p = HalfLaurent.parse("(3/2)q^{-1/2} + q^3")
        assert p.to_json() == [[-1, 2, "3/2"], [3, 1, 1]]
        assert HalfLaurent.from_json(p.to_json()) == p


@pytest.mark.parametrize("den, expected", [
    ("1 + q", 1),
    ("1 + 2q + q^2", 2),
    ("q^3", 0),
    ("1 + q^2", None),
])
def test_poly_divides_power_against_a1(den, expected):
    base = HalfLaurent.parse("1 + q")
    assert poly_divides_power(HalfLaurent.parse(den), base) == expected


def test_poly_divides_power_respects_bound():
    base = HalfLaurent.parse("1 + q")
    assert poly_divides_power(base ** 5, base, bound=4) is None
    assert poly_divides_power(base ** 5, base, bound=5) == 5


class TestTorusChar:
    def test_monomial_with_half_weights(self):
        m = TorusChar.monomial((Fraction(1, 2), Fraction(-1, 2)))
        assert m.terms == {(1, -1): 1}
        assert not m.is_integral()

    def test_arithmetic(self):
        half = TorusChar.monomial((Fraction(1, 2),)) + TorusChar.monomial((Fraction(-1, 2),))
        v2 = TorusChar.monomial((1,)) + 1 + TorusChar.monomial((-1,))
        assert half ** 2 == v2 + 1
        assert v2.dimension() == 3
        assert (2 * v2).exact_div(2) == v2
        with pytest.raises(ArithmeticError):
            v2.exact_div(2)

    def test_rank_mismatch(self):
        with pytest.raises(ValueError, match="Rank mismatch"):
            TorusChar.one(1) + TorusChar.one(2)

    def test_substitutions(self):
        x = TorusChar.monomial((1, 0)) + TorusChar.monomial((0, -1))
        assert x.permute([1, 0]) == TorusChar.monomial((0, 1)) + TorusChar.monomial((-1, 0))
        assert x.invert([1]) == TorusChar.monomial((1, 0)) + TorusChar.monomial((0, 1))
        assert x.negate(0) == -TorusChar.monomial((1, 0)) + TorusChar.monomial((0, -1))

    def test_negate_needs_integer_exponents(self):
        with pytest.raises(ValueError):
            TorusChar.monomial((Fraction(1, 2),)).negate(0)

    def test_evaluation(self):
        v1 = TorusChar.monomial((Fraction(1, 2),)) + TorusChar.monomial((Fraction(-1, 2),))
        i = Cyclotomic.root_of_unity(4)
        assert v1.evaluate_sqrt([i]) == 0
        assert v1.evaluate_sqrt([2]) == Fraction(5, 2)
        with pytest.raises(ValueError, match="evaluate_sqrt"):
            v1.evaluate([4])
        v2 = v1 * v1 - 1
        assert v2.evaluate([-1]) == -1

    def test_text(self):
        x = TorusChar.monomial((1,)) + 2 + TorusChar.monomial((Fraction(-1, 2),), coeff=-3)
        assert x.to_text() == "z + 2 - 3 z^-1/2"
        assert TorusChar.zero(2).to_text() == "0"


def random_laurent(rng):
    return HalfLaurent({k: Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for k in rng.sample(range(-4, 5), 3)})


def random_torus_char(rng, rank=2):
    return TorusChar(rank, {tuple(rng.randint(-3, 3) for _ in range(rank)): rng.randint(-3, 3) for _ in range(3)})


def random_cyclotomic(rng, order):
    return Cyclotomic(order, [Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(order)])


class TestRandomArithmetic:
    def test_laurent_ring_axioms(self, rng):
        for _ in range(100):
            a, b, c = random_laurent(rng), random_laurent(rng), random_laurent(rng)
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c
            assert (a - a).is_zero()
            assert a * 1 == a

    @pytest.mark.parametrize("v0", [Fraction(2), Fraction(-1, 3), Cyclotomic.root_of_unity(5),
                                    Cyclotomic.root_of_unity(12, 5)])
    def test_laurent_evaluation_is_a_homomorphism(self, rng, v0):
        for _ in range(50):
            a, b = random_laurent(rng), random_laurent(rng)
            assert (a * b).evaluate(v0) == a.evaluate(v0) * b.evaluate(v0)
            assert (a + b).evaluate(v0) == a.evaluate(v0) + b.evaluate(v0)

    def test_torus_ring_axioms(self, rng):
        for _ in range(100):
            a, b, c = random_torus_char(rng), random_torus_char(rng), random_torus_char(rng)
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c
            assert not (a - a)
            assert a * TorusChar.one(2) == a

    @pytest.mark.parametrize("point", [
        [Fraction(2), Fraction(-1, 3)],
        [Cyclotomic.root_of_unity(5), Fraction(3)],
        [Cyclotomic.root_of_unity(12, 5), Cyclotomic.root_of_unity(8)],
    ])
    def test_torus_evaluation_is_a_homomorphism(self, rng, point):
        for _ in range(50):
            a, b = random_torus_char(rng), random_torus_char(rng)
            assert (a * b).evaluate_sqrt(point) == a.evaluate_sqrt(point) * b.evaluate_sqrt(point)
            assert (a + b).evaluate_sqrt(point) == a.evaluate_sqrt(point) + b.evaluate_sqrt(point)


class TestCyclotomicLifts:
    @pytest.mark.parametrize("order, target", [(3, 6), (3, 12), (4, 8), (4, 12), (5, 10), (6, 12), (2, 8)])
    def test_lift_is_compatible_with_reduction(self, rng, order, target):
        for _ in range(30):
            x, y = random_cyclotomic(rng, order), random_cyclotomic(rng, order)
            lifted = x.lift(target)
            assert lifted.order == target
            assert lifted == x
            assert lifted.normalized_trace() == x.normalized_trace()
            assert (x * y).lift(target) == lifted * y.lift(target)
            assert (x + y).lift(target) == lifted + y.lift(target)

    @pytest.mark.parametrize("order", [3, 4, 5, 8, 12])
    def test_reduction_matches_powers_of_zeta(self, rng, order):
        zeta = Cyclotomic.root_of_unity(order)
        assert zeta ** order == 1
        for _ in range(20):
            coeffs = [Fraction(rng.randint(-3, 3)) for _ in range(2 * order)]
            expected = Cyclotomic.rational(0, order)
            for k, c in enumerate(coeffs):
                expected = expected + zeta ** k * c
            assert Cyclotomic(order, coeffs) == expected

    @pytest.mark.parametrize("order", [5, 8, 12])
    def test_galois_action_is_multiplicative(self, rng, order):
        units = [k for k in range(1, order) if gcd(k, order) == 1]
        for _ in range(20):
            x, y = random_cyclotomic(rng, order), random_cyclotomic(rng, order)
            k = rng.choice(units)
            assert (x * y).galois(k) == x.galois(k) * y.galois(k)
