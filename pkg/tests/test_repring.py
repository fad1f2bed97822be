from fractions import Fraction

import pytest

from jcells.arith import TorusChar
from jcells.errors import StructureCheckError
from jcells.repring import (ClassFunctionElt, RingSpec, component_characters, decompose_sl2, exterior_power,
                            fundamental_character, half_middle, half_spin, in_odd_module, is_weyl_invariant,
                            odd_vanishing_locus, sl2_irreducible, verify_presentation)


def z(*weight):
    return TorusChar.monomial(weight)


class TestRingSpec:
    def test_factors(self):
        assert RingSpec('O_even', 3).factors == {'C1': 3, 'C2': 2}
        assert RingSpec('Pin', 1).factors == {'C1': 1, 'C2': 0}
        assert RingSpec('O_odd', 2).factors == {'C1': 2, 'C2': 2}
        assert RingSpec('Sp', 2).factors == {'C1': 2}

    def test_validation(self):
        with pytest.raises(ValueError, match="Invalid ring family"):
            RingSpec('E', 6)
        with pytest.raises(ValueError, match="rank 1 only"):
            RingSpec('SL', 2)
        with pytest.raises(ValueError, match="Invalid rank"):
            RingSpec('Sp', 0)


class TestCharacters:
    def test_symplectic(self):
        sp2 = RingSpec('Sp', 1)
        assert fundamental_character(sp2, 'V1').char == z(1) + z(-1)
        assert fundamental_character(sp2, 'V2').char == TorusChar.one(1)

    def test_odd_orthogonal(self):
        so3 = RingSpec('SO_odd', 1)
        assert fundamental_character(so3, 'V1').char == z(1) + 1 + z(-1)
        assert fundamental_character(RingSpec('SO_odd', 3), 'V2').dimension == 21

    def test_general_linear(self):
        gl2 = RingSpec('GL', 2)
        assert fundamental_character(gl2, 'V1').char == z(1, 0) + z(0, 1)
        assert fundamental_character(gl2, 'det').char == z(1, 1)

    def test_sl2_and_pgl2(self):
        v3 = fundamental_character(RingSpec('SL', 1), 'V(3)')
        assert v3.char == z(3) + z(1) + z(-1) + z(-3)
        assert fundamental_character(RingSpec('PGL', 1), 'V(2)').dimension == 3
        with pytest.raises(ValueError, match="not a representation of PGL_2"):
            fundamental_character(RingSpec('PGL', 1), 'V(1)')

    def test_half_spin(self):
        spin4 = RingSpec('Spin', 2)
        plus = fundamental_character(spin4, 'delta+').char
        half = Fraction(1, 2)
        assert plus == z(half, half) + z(-half, -half)
        assert plus.to_text() == "z1^1/2 z2^1/2 + z1^-1/2 z2^-1/2"
        assert fundamental_character(RingSpec('Spin', 3), 'delta-').dimension == 4
        assert fundamental_character(RingSpec('Spin', 3), 'spin').dimension == 8

    def test_half_spin_not_invariant_under_type_b(self):
        assert is_weyl_invariant(half_spin(2, 1), 'D')
        assert not is_weyl_invariant(half_spin(2, 1), 'B')

    def test_middle_halves(self):
        plus, minus = half_middle(2, 1), half_middle(2, -1)
        assert plus == z(1, 1) + z(-1, -1) + 1
        assert minus == z(1, -1) + z(-1, 1) + 1
        assert exterior_power(RingSpec('SO_even', 2), 2) == plus + minus
        assert fundamental_character(RingSpec('SO_even', 3), 'V3+').dimension == 10

    def test_disconnected_components(self):
        o4 = RingSpec('O_even', 2)
        dets = component_characters(o4, 'det')
        assert dets['C1'].char == 1 and dets['C2'].char == -1
        v2 = component_characters(o4, 'V2')
        assert v2['C2'].char.is_zero()
        v1 = component_characters(RingSpec('O_odd', 1), 'V1')
        assert v1['C2'].char == -v1['C1'].char
        pi = component_characters(RingSpec('Pin', 2), 'pi')
        assert pi['C1'].dimension == 4 and pi['C2'].char.is_zero()

    def test_o2_other_component(self):
        o2 = RingSpec('O_even', 1)
        assert fundamental_character(o2, 'V1', 'C2').char.is_zero()
        assert fundamental_character(o2, 'V2', 'C2').char == -1

    @pytest.mark.parametrize("spec, which", [
        (RingSpec('Sp', 3), 'V3+'),
        (RingSpec('Sp', 2), 'delta+'),
        (RingSpec('Spin', 2), 'pi'),
        (RingSpec('SO_even', 2), 'V(2)'),
        (RingSpec('SL', 1), 'V1'),
        (RingSpec('Sp', 2), 'V5'),
        (RingSpec('Sp', 2), 'chi'),
    ])
    def test_invalid_selectors(self, spec, which):
        with pytest.raises(ValueError):
            fundamental_character(spec, which)

    def test_missing_factor(self):
        with pytest.raises(ValueError, match="has no factor"):
            fundamental_character(RingSpec('Sp', 2), 'V1', 'C2')

    def test_non_invariant_character(self):
        with pytest.raises(StructureCheckError, match="not invariant"):
            ClassFunctionElt(RingSpec('Sp', 1), z(1))


class TestSL2:
    def test_decomposition(self):
        v1 = sl2_irreducible(1)
        assert decompose_sl2(v1 * v1) == {2: 1, 0: 1}
        assert decompose_sl2(v1 ** 3) == {3: 1, 1: 2}
        assert decompose_sl2(TorusChar.zero(1)) == {}

    def test_decomposition_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="not invariant"):
            decompose_sl2(z(1))
        with pytest.raises(ValueError, match="half-integer"):
            decompose_sl2(z(Fraction(1, 2)) + z(Fraction(-1, 2)))

    def test_odd_module(self):
        assert in_odd_module(sl2_irreducible(1) * sl2_irreducible(2))
        assert not in_odd_module(sl2_irreducible(2))

    def test_odd_characters_vanish_at_i(self):
        certificate = odd_vanishing_locus(sl2_irreducible(3))
        assert certificate.point == 'zeta4'
        assert certificate.value == "0"
        assert certificate.decomposition == {3: 1}
        with pytest.raises(ValueError, match="not in the odd module"):
            odd_vanishing_locus(sl2_irreducible(2))


class TestPresentations:
    @pytest.mark.parametrize("spec", [
        RingSpec('O_even', 1), RingSpec('O_even', 2), RingSpec('O_even', 3),
        RingSpec('Pin', 1), RingSpec('Pin', 2),
        RingSpec('SO_even', 2), RingSpec('SO_even', 3),
    ])
    def test_relations_hold(self, spec):
        report = verify_presentation(spec)
        assert report.passed, report.errors

    def test_rank_budget(self, monkeypatch):
        monkeypatch.setenv("JCELLS_RANK_BUDGET", "1")
        with pytest.raises(ValueError, match="budget"):
            verify_presentation(RingSpec('O_even', 2))

    def test_unsupported_family(self):
        with pytest.raises(ValueError, match="No presentation check"):
            verify_presentation(RingSpec('Sp', 2))
