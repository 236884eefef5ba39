from fractions import Fraction

import pytest

from fatlab.exactnum import MatQ
from fatlab.exceptions import (
    DegenerateTripleError,
    DimensionMismatchError,
    NotInSubspaceError,
    NotSubalgebraError,
    ZeroVectorError,
)
from fatlab.liealg import (
    A_perp,
    A_perp_basis,
    AlgebraPresentation,
    C_perp_basis,
    DimensionTriple,
    InvariantReport,
    PairPresentation,
    Subspace,
    TriplePresentation,
    WitnessHint,
    bracket,
    direct_sum,
    centralizer_basis,
    centralizer_dim,
    check_f_vs_b,
    compute_b,
    compute_f,
    dimension_obstruction,
    g2_basis,
    g2_in_so7,
    jacobi_holds,
    M_vector,
    simple_dim,
    so3_max_in_so5,
    so_basis,
    so_unit,
    su3_in_g2,
)
from tests.base import BaseTestCase


def _report(invariant: str, lower: int, upper: int, certified: bool = True) -> InvariantReport:
    return InvariantReport(
        invariant=invariant,
        subject="test",
        certified_lower=lower,
        sampled_max=lower,
        claimed=upper if certified else None,
        upper_bound=upper,
        status="certified" if certified else "lower-bound",
    )


class PresentationTestCase(BaseTestCase):

    def setUp(self) -> None:
        super().setUp()
        self.so7 = AlgebraPresentation("so7", 7, tuple(so_basis(7)))

    def test_so_basis(self) -> None:
        assert len(so_basis(4)) == 6
        assert so_unit(3, 1, 2) == MatQ([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
        assert jacobi_holds(so_basis(3))

    def test_inner_product_is_minus_trace(self) -> None:
        x = so_unit(7, 1, 2)
        assert self.so7.inner(x, x) == 2
        assert self.so7.inner(x, so_unit(7, 1, 3)) == 0
        assert self.so7.with_scales([3]).inner(x, x) == 6

    def test_bi_invariant(self) -> None:
        assert AlgebraPresentation("so4", 4, tuple(so_basis(4))).is_ad_invariant()

    def test_g2_is_a_subalgebra_of_so7(self) -> None:
        g2 = Subspace(self.so7, g2_basis(), name="g2")
        assert g2.dim == 14
        assert g2.is_subalgebra()
        complement = Subspace(self.so7, A_perp_basis(), name="A")
        assert complement.dim == 7
        for element in A_perp_basis():
            assert g2.is_orthogonal_to(element)

    def test_su3_inside_g2(self) -> None:
        g2 = AlgebraPresentation("g2", 7, tuple(g2_basis()))
        su3 = Subspace(g2, su3_in_g2(), name="su3")
        assert su3.dim == 8
        assert su3.is_subalgebra()
        for element in C_perp_basis():
            assert g2.full.contains(element)
            assert su3.is_orthogonal_to(element)

    def test_wrong_parameter_counts(self) -> None:
        with pytest.raises(DimensionMismatchError):
            g2_in_so7([0] * 13)
        with pytest.raises(DimensionMismatchError):
            A_perp([1, 2])

    def test_so3_max_is_irreducible_subalgebra(self) -> None:
        so5 = AlgebraPresentation("so5", 5, tuple(so_basis(5)))
        so3 = Subspace(so5, so3_max_in_so5(), name="so3max")
        assert so3.dim == 3
        assert so3.is_subalgebra()
        assert not any(element.is_zero() for element in so3_max_in_so5())

    def test_project_and_coordinates(self) -> None:
        plane = Subspace(self.so7, so_basis(7)[:2], name="plane")
        x = so_unit(7, 1, 2) * 3 + so_unit(7, 5, 6)
        assert plane.project(x) == so_unit(7, 1, 2) * 3
        assert plane.coordinates(so_unit(7, 1, 3)) == (0, 1)
        with pytest.raises(NotInSubspaceError):
            plane.coordinates(so_unit(7, 5, 6))
        assert not plane.contains(x)

    def test_centralizer(self) -> None:
        full = AlgebraPresentation("so3", 3, tuple(so_basis(3))).full
        assert centralizer_dim(so_unit(3, 1, 2), full) == 1
        assert centralizer_basis(so_unit(3, 1, 2), full) == [so_unit(3, 1, 2)]
        with pytest.raises(ZeroVectorError):
            centralizer_dim(MatQ.zeros(3, 3), full)

    def test_bracket_shapes(self) -> None:
        with pytest.raises(DimensionMismatchError):
            bracket(MatQ.identity(2), MatQ.identity(3))

    def test_direct_sum_brackets_blockwise(self) -> None:
        x = direct_sum(so_unit(3, 1, 2), so_unit(2, 1, 2))
        y = direct_sum(so_unit(3, 1, 3), MatQ.zeros(2, 2))
        assert x.shape == (5, 5)
        assert bracket(x, y) == direct_sum(bracket(so_unit(3, 1, 2), so_unit(3, 1, 3)), MatQ.zeros(2, 2))


class PairAndTripleTestCase(BaseTestCase):

    def setUp(self) -> None:
        super().setUp()
        self.so4 = AlgebraPresentation("so4", 4, tuple(so_basis(4)))

    def test_pair_must_be_subalgebra(self) -> None:
        lower = Subspace(self.so4, [so_unit(4, 1, 2), so_unit(4, 1, 3)], name="not closed")
        with pytest.raises(NotSubalgebraError):
            PairPresentation("bad", lower)

    def test_triple_must_be_strict(self) -> None:
        so3 = [so_unit(4, 1, 2), so_unit(4, 1, 3), so_unit(4, 2, 3)]
        with pytest.raises(DegenerateTripleError):
            TriplePresentation("flat", self.so4, so3, so3)
        with pytest.raises(DegenerateTripleError):
            TriplePresentation("full", self.so4, so_basis(4), so3)

    def test_triple_splitting(self) -> None:
        triple = self.library.triple("g2-so7-so8")
        assert (triple.dim_m, triple.dim_p) == (7, 7)
        assert triple.m.dim == 7
        assert triple.p.dim == 7
        assert triple.check_reductive()
        x = M_vector([0, 0, 1, 0, 0, 0, 0])
        assert triple.component(x, "p") == x
        assert triple.component(x, "m").is_zero()

    def test_simple_dim(self) -> None:
        assert simple_dim("sp1+u1") == 4
        assert simple_dim("spin7+") == 21
        assert simple_dim("su3+so3") == 11
        assert simple_dim("sp1+Δu1") == 4
        assert simple_dim("0") == 0
        with pytest.raises(ValueError):
            simple_dim("e8")

    def test_dimension_obstruction(self) -> None:
        verdict = dimension_obstruction(DimensionTriple("F11", "so3", "so5", "so6"))
        assert (verdict.dim_m, verdict.dim_p, verdict.min_f) == (7, 5, 2)
        verdict = dimension_obstruction(self.library.triple("g2-so7-so8"))
        assert verdict.f1_allowed
        assert verdict.min_f == 1

    def test_compute_b_certified(self) -> None:
        report = compute_b(self.library.pair("so3-so4"), self.library.pair_hints("so3-so4"), samples=20)
        assert report.status == "certified"
        assert report.value == 1

    def test_compute_b_lower_bound_without_hints(self) -> None:
        report = compute_b(self.library.pair("g2-so7"), samples=20)
        assert report.status == "lower-bound"
        assert report.certified_lower == 1
        assert report.claimed is None

    def test_explicit_vector_outside_domain(self) -> None:
        pair = self.library.pair("so3-so4")
        hint = WitnessHint(kind="explicit_vector", vectors=(so_unit(4, 1, 2),))
        with pytest.raises(NotInSubspaceError):
            compute_b(pair, [hint], samples=0)

    def test_compute_f_certified(self) -> None:
        report = compute_f(self.library.triple("g2-so7-so8"), self.library.triple_hints("g2-so7-so8"), samples=30)
        assert report.status == "certified"
        assert report.value == 1
        assert set(report.detail) == {"p", "m"}

    def test_compute_f_is_reproducible(self) -> None:
        triple = self.library.triple("so4-so5-so6")
        first = compute_f(triple, samples=40, seed=7)
        second = compute_f(triple, samples=40, seed=7)
        assert first == second
        assert first.certified_lower >= 2

    def test_check_f_vs_b(self) -> None:
        assert check_f_vs_b(_report("f", 1, 1), _report("b", 2, 2), _report("b", 1, 1), _report("b", 1, 1)) == []
        violations = check_f_vs_b(_report("f", 2, 2), _report("b", 2, 2))
        assert len(violations) == 1
        assert check_f_vs_b(_report("f", 0, 0), _report("b", 1, 1), b_base=_report("b", 3, 3))

    def test_report_serialises(self) -> None:
        report = _report("b", 1, 1)
        assert report.to_dict()["status"] == "certified"
        assert _report("b", 1, 3, certified=False).value == 1

    def test_inner_scales_per_ideal(self) -> None:
        pair = self.library.pair("dso3-so3so3", metric_scales=[1, Fraction(2)])
        x = pair.complement.basis[0]
        assert pair.algebra.metric_scales == (1, 2)
        assert pair.algebra.norm2(x) > 0
