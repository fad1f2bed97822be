from collections import OrderedDict

import pytest

from jcells import fingroup
from jcells.arith import Cyclotomic
from jcells.fingroup import (Cocycle2, FinGroup, GAction, bilinear_cocycle, carry_cocycle, cyclic,
                             decompose_permutation_character, direct_product, elementary_abelian_2,
                             homomorphisms_to_cyclic, irreducible_characters, is_coboundary,
                             standard_groups, symmetric3)


class TestGroups:
    def test_cyclic_structure(self):
        z4 = cyclic(4)
        assert z4.order == 4 and z4.is_abelian
        assert z4.element_orders == (1, 4, 2, 4)
        assert z4.closure([2]) == (0, 2)
        assert z4.power(1, 3) == 3
        assert z4.inv(1) == 3

    def test_s3_labels_and_classes(self, s3):
        assert s3.order == 6 and not s3.is_abelian
        assert s3.label(s3.identity) == "()"
        assert sorted(len(c) for c in s3.conjugacy_classes) == [1, 2, 3]
        t = s3.element("(12)")
        assert s3.element_orders[t] == 2
        assert len(s3.centralizer(t)) == 2
        assert len(s3.subgroups) == 6

    def test_conjugation_convention(self, s3):
        g, h = s3.element("(12)"), s3.element("(23)")
        assert s3.conj(g, h) == s3.mul(s3.mul(g, h), s3.inv(g))

    def test_unknown_element(self, s3):
        with pytest.raises(ValueError, match="Unknown element"):
            s3.element("(14)")

    def test_table_validation(self):
        with pytest.raises(ValueError, match="not a permutation"):
            FinGroup([[0, 1], [1, 1]])
        with pytest.raises(ValueError, match="no identity"):
            FinGroup([[0, 0], [1, 1]])

    def test_direct_product(self):
        g = direct_product(cyclic(2), cyclic(3))
        assert g.order == 6 and g.is_abelian
        assert g.exponent == 6
        assert g.label(g.identity) == "(0,0)"

    def test_standard_groups(self):
        assert standard_groups("Z4").order == 4
        assert standard_groups("cyclic(5)").order == 5
        klein = standard_groups("Z2^2")
        assert klein.order == 4 and klein.exponent == 2
        assert standard_groups("Z2xS3").order == 12
        assert elementary_abelian_2(3).order == 8
        with pytest.raises(ValueError, match="unsupported group spec"):
            standard_groups("A5")

    def test_subgroup_embedding(self, s3):
        rotations = s3.closure([s3.element("(123)")])
        sub, embedding = s3.subgroup(rotations)
        assert sub.order == 3 and sub.is_abelian
        assert set(embedding) == set(rotations)
        with pytest.raises(ValueError, match="not a subgroup"):
            s3.subgroup([s3.identity, s3.element("(12)"), s3.element("(23)")])


class TestCharacters:
    def test_s3_table(self, s3):
        chars = irreducible_characters(s3)
        assert [c.label for c in chars] == ["triv", "sgn", "std"]
        assert [c.degree for c in chars] == [1, 1, 2]
        std = chars[2]
        assert std(s3.element("(123)")) == -1
        assert std.inner(std) == 1

    def test_abelian_table(self):
        z4 = cyclic(4)
        chars = irreducible_characters(z4)
        assert len(chars) == 4
        assert chars[0].label == "triv"
        i = Cyclotomic.root_of_unity(4)
        assert any(c(1) == i for c in chars)

    def test_product_table(self):
        g = direct_product(cyclic(2), symmetric3())
        chars = irreducible_characters(g)
        assert sorted(c.degree for c in chars) == [1, 1, 1, 1, 2, 2]

    @pytest.mark.parametrize("generators, degrees", [
        ([(1, 2, 3, 0), (0, 3, 2, 1)], [1, 1, 1, 1, 2]),
        ([(1, 2, 0, 3), (1, 0, 3, 2)], [1, 1, 1, 3]),
    ])
    def test_class_algebra_splitting(self, generators, degrees):
        group = FinGroup.from_permutations(generators, name="P")
        chars = irreducible_characters(group)
        assert sorted(c.degree for c in chars) == degrees
        for a in chars:
            for b in chars:
                assert a.inner(b) == (1 if a is b else 0)

    def test_character_bound(self, monkeypatch):
        monkeypatch.setenv("JCELLS_MAX_GROUP_ORDER", "4")
        with pytest.raises(ValueError, match="character table bound"):
            irreducible_characters(symmetric3())

    def test_homomorphisms_to_cyclic(self, s3):
        homs = homomorphisms_to_cyclic(s3, 2)
        assert len(homs) == 2
        assert len(homomorphisms_to_cyclic(cyclic(4), 2)) == 2

    def test_table_cache_is_bounded(self, monkeypatch):
        monkeypatch.setattr(fingroup, "TABLE_CACHE_SIZE", 2)
        monkeypatch.setattr(fingroup, "_TABLES", OrderedDict())
        for n in (2, 3, 4, 5):
            irreducible_characters(cyclic(n))
        assert [key[0] for key in fingroup._TABLES] == ["Z4", "Z5"]
        # a hit moves the table to the back of the queue
        irreducible_characters(cyclic(4))
        irreducible_characters(cyclic(6))
        assert [key[0] for key in fingroup._TABLES] == ["Z4", "Z6"]

    @pytest.mark.parametrize("spec", ["Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z2^2", "Z2^3", "Z2xZ4",
                                      "Z3xZ3", "S3", "Z2xS3", "Z3xS3", "S3xS3"])
    def test_orthogonality(self, spec):
        group = standard_groups(spec)
        self._check_orthogonality(group)

    @pytest.mark.parametrize("generators", [
        [(1, 2, 3, 0), (0, 3, 2, 1)],
        [(1, 2, 0, 3), (1, 0, 3, 2)],
    ])
    def test_orthogonality_of_split_tables(self, generators):
        self._check_orthogonality(FinGroup.from_permutations(generators, name="P"))

    @staticmethod
    def _check_orthogonality(group):
        chars = irreducible_characters(group)
        assert len(chars) == len(group.conjugacy_classes)
        for i, a in enumerate(chars):
            for j, b in enumerate(chars):
                assert a.inner(b) == (1 if i == j else 0)
        for s, g in enumerate(group.class_reps):
            for t, h in enumerate(group.class_reps):
                total = sum((c(g) * c(h).conjugate() for c in chars), Cyclotomic(group.exponent))
                expected = group.order // len(group.conjugacy_classes[s]) if s == t else 0
                assert total == expected, f"columns {group.label(g)}, {group.label(h)} of {group.name}"


class TestActions:
    def test_coset_action(self, s3):
        h = s3.closure([s3.element("(12)")])
        action = GAction.coset_action(s3, h)
        assert action.degree == 3 and action.is_transitive
        assert action.stabilizer(0) == h
        assert not action.image_is_abelian
        assert sorted(len(action.fixed_points(g)) for g in range(6)) == [0, 0, 1, 1, 1, 3]

    def test_permutation_character(self, s3):
        action = GAction.coset_action(s3, s3.closure([s3.element("(12)")]))
        constituents = {chi.label: m for chi, m in decompose_permutation_character(action)}
        assert constituents == {"triv": 1, "std": 1}

    def test_from_generators(self):
        z4 = cyclic(4)
        action = GAction.from_generators(z4, [(1, 0)])
        assert action.perms[2] == (0, 1)
        with pytest.raises(ValueError, match="non-homomorphic"):
            GAction.from_generators(z4, [(1, 2, 0)])

    def test_orbits_of_trivial_action(self, s3):
        action = GAction.trivial(s3, 2)
        assert action.orbits == ((0,), (1,))
        assert not action.is_transitive

    def test_restriction(self, z4_on_two_points):
        z4 = z4_on_two_points.group
        sub, embedding = z4.subgroup(z4.closure([2]))
        restricted = z4_on_two_points.restrict(sub, embedding)
        assert restricted.orbits == ((0,), (1,))


class TestCocycles:
    def test_carry_cocycle_classes(self):
        assert is_coboundary(carry_cocycle(cyclic(2)))[0] is False
        split, witness = is_coboundary(carry_cocycle(cyclic(3)))
        assert split
        assert Cocycle2.coboundary(cyclic(3), 2, witness) == carry_cocycle(cyclic(3))

    def test_bilinear_cocycle_on_klein_group(self):
        klein = standard_groups("Z2^2")
        first = [g // 2 for g in range(4)]
        second = [g % 2 for g in range(4)]
        assert is_coboundary(bilinear_cocycle(klein, first, second, 2))[0] is False
        assert is_coboundary(bilinear_cocycle(klein, first, first, 2))[0] is False
        symmetric = bilinear_cocycle(klein, first, second, 2) + bilinear_cocycle(klein, second, first, 2)
        assert is_coboundary(symmetric)[0]

    def test_cocycle_validation(self):
        z2 = cyclic(2)
        with pytest.raises(ValueError, match="normalised"):
            Cocycle2(z2, 2, [[1, 0], [0, 0]])
        with pytest.raises(ValueError, match="modulus"):
            Cocycle2.zero(z2, 0)
