import json
import tempfile
from fractions import Fraction
from pathlib import Path

import pytest

from fatlab.exactnum import MatQ
from fatlab.exceptions import InvalidPresetError, PresetNotFoundError
from fatlab.liealg import M_vector, jacobi_holds, so_unit
from fatlab.presets import PresetLibrary, build_matrices, build_slice, load_presets
from tests.base import BaseTestCase, SURVIVING_TRIPLES


class BuildMatricesTestCase(BaseTestCase):

    def test_family_and_pad(self) -> None:
        matrices = build_matrices({"family": "so", "n": 3, "pad": 4})
        assert len(matrices) == 3
        assert all(matrix.shape == (4, 4) for matrix in matrices)

    def test_builder_with_variables(self) -> None:
        [matrix] = build_matrices({"builder": "M", "args": ["z1", 0, "z3"]}, {"z1": Fraction(2), "z3": Fraction(-1)})
        assert matrix == M_vector([2, 0, -1])
        with pytest.raises(InvalidPresetError):
            build_matrices({"builder": "M", "args": ["z1", 0, 0]})

    def test_blocks_sum_scale_embed(self) -> None:
        [blocks] = build_matrices({"blocks": [{"builder": "so_unit", "args": [2, 1, 2]}, {"zero": 1}]})
        assert blocks == MatQ.block_diagonal(so_unit(2, 1, 2), MatQ.zeros(1, 1))
        [total] = build_matrices({"sum": [
            {"builder": "so_unit", "args": [3, 1, 2]},
            {"scale": [2, {"builder": "so_unit", "args": [3, 1, 3]}]},
        ]})
        assert total == so_unit(3, 1, 2) + so_unit(3, 1, 3) * 2
        [embedded] = build_matrices({"builder": "so_unit", "args": [2, 1, 2], "embed": {"sizes": [2, 3], "index": 0}})
        assert embedded.shape == (5, 5)
        assert embedded[0, 1] == 1

    def test_invalid_expressions(self) -> None:
        with pytest.raises(InvalidPresetError):
            build_matrices({"family": "e8"})
        with pytest.raises(InvalidPresetError):
            build_matrices({"nothing": 1})
        with pytest.raises(InvalidPresetError):
            build_matrices({"family": "so", "n": 4, "pad": 3})

    def test_slice_terms(self) -> None:
        spec = build_slice({"builder": "M", "args": ["z1", 0, "z3"]}, ["z1"])
        assert [name for name, _ in spec.terms] == ["z1", "z3"]
        assert dict(spec.terms)["z3"] == M_vector([0, 0, 1])
        with pytest.raises(InvalidPresetError):
            build_slice({"builder": "M", "args": ["z1", 0, 0]}, ["z2"])
        with pytest.raises(InvalidPresetError):
            build_slice({"builder": "M", "args": [1, 0, 0]}, [])


class PresetLibraryTestCase(BaseTestCase):

    def test_shipped_triples_build(self) -> None:
        for name in self.library.names("triples"):
            triple = self.library.triple(name)
            assert triple.m.dim == triple.dim_m
            assert triple.p.dim == triple.dim_p

    def test_shipped_triples_are_reductive(self) -> None:
        for name in self.library.names("triples"):
            assert self.library.triple(name).check_reductive(), name

    def test_shipped_algebras_satisfy_jacobi(self) -> None:
        for name in self.library.names("algebras"):
            assert jacobi_holds(self.library.algebra(name).basis), name

    def test_triples_are_cached(self) -> None:
        assert self.library.triple("su3-g2-so7") is self.library.triple("su3-g2-so7")
        assert self.library.triple("su3-g2-so7") is not self.library.triple("su3-g2-so7", metric_scales=[2])

    def test_hint_groups(self) -> None:
        hints = self.library.triple_hints("su3-g2-so7", "b_total")
        assert [hint.kind for hint in hints] == ["intermediate_subalgebra"]
        assert hints[0].intermediate.dim_m == 7
        assert hints[0].intermediate.dim_p == 6
        assert self.library.triple_hints("su3-g2-so7", "unknown") == []

    def test_projected_hint_lies_in_m(self) -> None:
        triple = self.library.triple("so3-so4-so3so4")
        [hint] = [hint for hint in self.library.triple_hints("so3-so4-so3so4") if hint.direction == "m"]
        assert triple.m.contains(hint.vectors[0])

    def test_missing_entries(self) -> None:
        with pytest.raises(PresetNotFoundError):
            self.library.triple("so9-so10-so11")
        with pytest.raises(PresetNotFoundError):
            self.library.pair_pairing("so3-so4")
        assert self.library.pair_intermediate("so3-so4") is None
        assert self.library.pair_intermediate("0-so3").dim == 1

    def test_tables(self) -> None:
        types = self.library.pair_types()
        assert len(types) == 16
        assert sum(row.property_p for row in types) == 6
        cases = self.library.cases()
        assert {case.triple for case in cases if case.verdict == "eq1"} == SURVIVING_TRIPLES
        assert self.library.dimension_triple("F16-2").dim_m == 7

    def test_overlay_is_merged(self) -> None:
        overlay = {"dimension_triples": {"F99": {"h": "so2", "k": "so3", "g": "so4"}}}
        with tempfile.TemporaryDirectory() as directory:
            Path(directory, "extra.json").write_text(json.dumps(overlay), encoding="utf-8")
            library = PresetLibrary(load_presets(directory))
        assert "F99" in library.names("dimension_triples")
        assert "F11" in library.names("dimension_triples")
