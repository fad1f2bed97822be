import json

import pytest

from jcells.arith import HalfLaurent
from jcells.rigid import (SHIPPED_EXAMPLES, CellBlock, RigidExample, block_determinants, check_structure,
                          identity_example, load_example, rigid_determinant, vanishing_vs_poincare)

BASE = HalfLaurent.parse("q^{1/2} + q^{-1/2}")


class TestFixtures:
    @pytest.mark.parametrize("name", SHIPPED_EXAMPLES)
    def test_structure(self, name):
        result = check_structure(load_example(name))
        assert result.passed, result.errors

    def test_unknown_example(self):
        with pytest.raises(ValueError, match="Unknown example"):
            load_example("e8")

    def test_invalid_json(self, tmp_path):
        (tmp_path / "broken.json").write_text("{not json")
        with pytest.raises(ValueError, match="Invalid JSON"):
            load_example("broken", tmp_path)

    def test_unsupported_version(self):
        data = load_example("sl2").to_dict()
        data['version'] = 2
        with pytest.raises(ValueError, match="Unsupported fixture version"):
            RigidExample.from_dict(data)

    def test_dict_round_trip_preserves_phi(self, tmp_path):
        example = load_example("pgl2")
        (tmp_path / "copy.json").write_text(json.dumps(example.to_dict()))
        copy = load_example("copy", tmp_path)
        assert copy.B == example.B
        assert copy.Phi == example.Phi

    def test_blocks_must_partition(self):
        with pytest.raises(ValueError, match="partition"):
            RigidExample("bad", ["a", "b"], ["x", "y"], [[1, 0], [0, 1]],
                         [CellBlock("(2)", 0, (0,), (0,))])

    def test_non_square_matrix(self):
        with pytest.raises(ValueError, match="square"):
            RigidExample("bad", ["a"], ["x"], [[1, 0]], [CellBlock("(2)", 0, (0,), (0,))])


class TestSO7:
    def test_block_structure(self):
        example = load_example("so7")
        result = check_structure(example)
        assert result.data['block_sizes'] == [1, 2, 4, 2, 1, 2, 6, 2]
        assert result.data['det_B'] == 128

    def test_block_determinants(self):
        dets = {cell: det for cell, _, det in block_determinants(load_example("so7"))}
        assert dets["(1,1,1,1,1,1)"] == 1
        assert dets["(2,1,1,1,1)"] == -2
        assert dets["(2,2,1,1)"] == 2
        assert dets["(4,2)"] == -8
        assert dets["(6)"] == 2

    def test_cells_in_decreasing_a(self):
        a_values = [block.a for block in load_example("so7").blocks]
        assert a_values == sorted(a_values, reverse=True)

    def test_no_phi(self):
        with pytest.raises(ValueError, match="has no Phi"):
            rigid_determinant(load_example("so7"))

    def test_frame(self):
        frame = load_example("so7").to_frame()
        assert frame.shape == (20, 20)
        assert list(frame.index.names) == ['cell', 'a', 'element']
        assert len(frame.loc["(4,2)"]) == 6


class TestDeterminants:
    def test_sl2(self):
        det = rigid_determinant(load_example("sl2"))
        assert det == BASE * BASE
        assert det.factored_text() == "(q^{1/2}+q^{-1/2})^2"

    def test_pgl2(self):
        assert rigid_determinant(load_example("pgl2")) == BASE * HalfLaurent.constant(-2)

    def test_identity(self):
        example = identity_example(3)
        assert check_structure(example).passed
        assert rigid_determinant(example) == HalfLaurent.constant(1)


class TestVanishing:
    def test_sl2_divides_square(self):
        result = vanishing_vs_poincare(load_example("sl2"))
        assert result.passed
        assert result.data['power'] == 2

    def test_pgl2(self):
        result = vanishing_vs_poincare(load_example("pgl2"))
        assert result.passed
        assert result.data['power'] == 1

    def test_unit_determinant(self):
        result = vanishing_vs_poincare(identity_example(2), "A1")
        assert result.passed
        assert result.data['power'] == 0

    def test_needs_weyl_group(self):
        with pytest.raises(ValueError, match="names no finite Weyl group"):
            vanishing_vs_poincare(identity_example(2))

    def test_foreign_factor_reported(self):
        example = RigidExample(
            "twisted", ["r"], ["t"], [[1]], [CellBlock("(2)", 0, (0,), (0,))],
            Phi=[[HalfLaurent.parse("q + 1 + q^{-1}")]], finite_weyl_type="A1",
        )
        result = vanishing_vs_poincare(example)
        assert not result.passed
        assert result.data['power'] is None
        assert any("does not divide" in e for e in result.errors)

    def test_off_block_entry_flagged(self):
        example = load_example("sl2")
        example.B[0][2] = 1
        result = check_structure(example)
        assert not result.passed
        assert any("outside every cell block" in e for e in result.errors)
