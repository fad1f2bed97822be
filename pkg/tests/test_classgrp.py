import pytest

from jcells.arith import HalfLaurent
from jcells.classgrp import (LieType, Partition, a_value, centralizer, centralizer_dimension,
                             centralizer_dimension_oracle, check_centralizer, levi_candidates, load_weyl_groups,
                             parse_types, partition_table, poincare_polynomial, valid_partitions, validate_partition,
                             weyl_length_distribution)

C3 = LieType('C', 3)
B3 = LieType('B', 3)


def _types_up_to(rank, families="ABCD"):
    return [LieType(f, n) for f in families for n in range(1, rank + 1) if not (f == 'D' and n < 2)]


class TestParsing:
    def test_lie_type(self):
        assert LieType.parse("C3") == C3
        assert LieType.parse(" B_3 ") == B3
        assert [str(t) for t in parse_types("A1xA1")] == ["A1", "A1"]
        with pytest.raises(ValueError, match="Invalid Lie type"):
            LieType.parse("E8")
        with pytest.raises(ValueError, match="Invalid rank"):
            LieType('D', 1)

    def test_partition(self):
        assert Partition.parse("2,1^4").parts == (2, 1, 1, 1, 1)
        assert Partition.parse("(2,2,2)") == Partition.parse("2^3")
        assert Partition.parse("1,3").parts == (3, 1)
        assert Partition.parse("4,2").dual().parts == (2, 2, 1, 1)
        with pytest.raises(ValueError, match="Invalid partition"):
            Partition.parse("2,a")

    def test_valid_partitions(self):
        assert len(valid_partitions(C3)) == 8
        assert len(valid_partitions(B3)) == 7
        assert Partition.parse("3,2,1") not in valid_partitions(C3)

    @pytest.mark.parametrize("t, text, valid", [
        (C3, "2,2,2", True),
        (C3, "3,3", True),
        (C3, "3,2,1", False),
        (C3, "2,2", False),
        (B3, "3,1^4", True),
        (B3, "2,1^5", False),
        (LieType('D', 4), "2^4", True),
    ])
    def test_validate_partition(self, t, text, valid):
        assert validate_partition(t, Partition.parse(text)) is valid


class TestCentralizers:
    def test_sp6_class_222(self):
        d = centralizer(C3, Partition.parse("2,2,2"))
        assert d.to_text() == "O3"
        assert d.component_order == 2
        assert d.reductive_dimension == 3
        assert d.to_dict()['factors'] == [['O', 3]]

    def test_sp6_regular_and_trivial(self):
        assert centralizer(C3, Partition.parse("6")).to_text() == "O1"
        trivial = centralizer(C3, Partition.parse("1^6"))
        assert trivial.to_text() == "Sp6"
        assert trivial.component_order == 1
        assert centralizer(C3, Partition.parse("4,2")).component_order == 4

    def test_orthogonal_determinant_condition(self):
        d = centralizer(B3, Partition.parse("3,1^4"))
        assert d.det_condition
        assert d.component_order == 2
        assert d.to_text().startswith("S(")

    def test_very_even(self):
        d = centralizer(LieType('D', 4), Partition.parse("2,2,2,2"))
        assert d.very_even
        assert d.factors == [('Sp', 4)]

    def test_invalid_partition(self):
        with pytest.raises(ValueError, match="wrong size or parity"):
            centralizer(C3, Partition.parse("3,2,1"))

    def test_type_a_is_not_described(self):
        with pytest.raises(ValueError, match="types B, C and D"):
            centralizer(LieType('A', 2), Partition.parse("2,1"))

    @pytest.mark.parametrize("parts, expected", [
        ("1^6", 9), ("2,1^4", 6), ("2,2,1,1", 4), ("2,2,2", 3),
        ("3,3", 2), ("4,1,1", 2), ("4,2", 1), ("6", 0),
    ])
    def test_sp6_a_values(self, parts, expected):
        assert a_value(C3, Partition.parse(parts)) == expected

    def test_regular_class_has_rank_dimensional_centralizer(self):
        for t, regular in [(C3, "6"), (B3, "7"), (LieType('A', 3), "4")]:
            assert centralizer_dimension(t, Partition.parse(regular)) == t.rank

    @pytest.mark.parametrize("t", [C3, B3, LieType('D', 3)])
    def test_formula_matches_ad_kernel(self, t):
        for u in valid_partitions(t):
            report = check_centralizer(t, u)
            assert report.passed, report.errors

    @pytest.mark.parametrize("t", _types_up_to(4, "BCD"), ids=str)
    def test_a_value_reverses_dominance(self, t):
        partitions = valid_partitions(t)
        for u in partitions:
            for w in partitions:
                if u != w and u.dominates(w):
                    assert a_value(t, u) < a_value(t, w), f"{u} > {w} in {t}"


@pytest.mark.parametrize("t", _types_up_to(3), ids=str)
def test_dimension_formula_matches_oracle(t):
    for u in valid_partitions(t):
        assert centralizer_dimension(t, u) == centralizer_dimension_oracle(t, u), f"{u} in {t}"


@pytest.mark.slow
@pytest.mark.parametrize("t", [t for t in _types_up_to(6) if t.rank > 3], ids=str)
def test_dimension_formula_matches_oracle_higher_rank(t):
    for u in valid_partitions(t):
        assert centralizer_dimension(t, u) == centralizer_dimension_oracle(t, u), f"{u} in {t}"


class TestWeylGroups:
    def test_b3_order(self):
        p = poincare_polynomial("B3")
        assert p.evaluate(1) == 48
        assert p == poincare_polynomial(B3)

    def test_a1_and_products(self):
        one_plus_q = HalfLaurent.parse("1 + q")
        assert poincare_polynomial("A1") == one_plus_q
        assert poincare_polynomial("A1xA1") == one_plus_q ** 2
        assert poincare_polynomial("D2") == one_plus_q ** 2

    def test_explicit_g2(self):
        groups = load_weyl_groups()
        assert "G2" in groups
        p = poincare_polynomial("G2")
        assert p.evaluate(1) == 12
        assert weyl_length_distribution(groups["G2"].cartan) == {0: 1, 1: 2, 2: 2, 3: 2, 4: 2, 5: 2, 6: 1}

    def test_unsupported(self):
        with pytest.raises(ValueError, match="unsupported type"):
            poincare_polynomial("E8")

    def test_length_distribution_of_a2(self):
        assert weyl_length_distribution(LieType('A', 2).cartan_matrix()) == {0: 1, 1: 2, 2: 2, 3: 1}


class TestLevi:
    def test_sp6_222(self):
        (candidate,) = levi_candidates(C3, Partition.parse("2,2,2"))
        assert candidate.gl_blocks == [(2, 1)]
        assert candidate.tail == (2,)
        assert candidate.dual_label() == "GL2 x Sp2"
        assert candidate.group_label() == "GL2 x SO3"

    def test_distinguished_class_has_no_gl_part(self):
        (candidate,) = levi_candidates(C3, Partition.parse("6"))
        assert candidate.gl_blocks == []
        assert candidate.dual_label() == "Sp6"

    def test_trivial_class_gives_the_torus(self):
        candidates = levi_candidates(C3, Partition.parse("1^6"))
        assert any(c.is_torus for c in candidates)

    def test_every_valid_partition_has_a_candidate(self):
        for t in (C3, B3, LieType('D', 4)):
            for u in valid_partitions(t):
                assert levi_candidates(t, u), f"no Levi for {u} in {t}"


def test_partition_table():
    table = partition_table(C3)
    assert len(table) == 8
    assert list(table.columns) == ['partition', 'centralizer', 'component_order', 'dim_z', 'a_value',
                                   'levi_candidates']
    row = table[table['partition'] == "(2,2,2)"].iloc[0]
    assert row['centralizer'] == "O3"
    assert row['a_value'] == 3
