import math
from fractions import Fraction
from unittest import mock

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from fatlab.exactnum import CirclePoint, MatQ
from fatlab.exceptions import (
    DimensionMismatchError,
    InvalidOrderError,
    InvalidPartitionError,
    InvalidPatternError,
    NoExactHalfError,
    TrialityError,
)
from fatlab.spin import (
    SIGMA,
    TABLE_ORDER,
    CirclePattern,
    SpinElement,
    brute_force_free,
    diagonal_rotation,
    enumerate_free_circles,
    enumerate_sphere6_circles,
    finite_action_free,
    freeness_witness,
    induced_C,
    is_free_circle,
    is_g2_member,
    is_spin7_member,
    lift_C_diagonal,
    lift_coefficients,
    primitive_patterns,
    speed_square_sum,
    speeds,
    su2_rows,
    su2_table,
    torus_element,
    torus_weights,
    triality_check,
)
from tests.base import (
    FINITE_PATTERN,
    FREE_FAMILY_PATTERN,
    NONFREE_PATTERN,
    SPHERE6_PATTERNS,
    SU2_TABLE_ROWS,
    BaseTestCase,
    lift_up_to_sign,
)

patterns = st.tuples(*[st.integers(-4, 4)] * 4).filter(lambda n: any(n) and math.gcd(*n) == 1)


class TrialityTestCase(BaseTestCase):

    def test_sign_elements(self) -> None:
        identity = MatQ.identity(8)
        assert triality_check(identity, identity, identity)
        assert triality_check(SIGMA, SIGMA, SIGMA)
        assert triality_check(-identity, identity, -identity)
        assert triality_check(identity, -identity, -identity)
        assert not triality_check(-identity, -identity, -identity)

    def test_shape_is_checked(self) -> None:
        with pytest.raises(DimensionMismatchError):
            triality_check(MatQ.identity(7), MatQ.identity(8), MatQ.identity(8))

    def test_spin_element_requires_compatible_pair(self) -> None:
        with pytest.raises(TrialityError):
            SpinElement(MatQ.identity(8), SIGMA)
        element = SpinElement(SIGMA, SIGMA)
        assert element.C == SIGMA
        assert is_g2_member(element)
        assert is_spin7_member(SpinElement.identity())
        assert not is_spin7_member(-SpinElement.identity())

    def test_torus_elements_satisfy_triality(self) -> None:
        for _ in range(10):
            alpha = self.create_circle_points(4)
            element = torus_element(alpha)
            assert triality_check(element.A, element.B, element.C)
            assert element.C == induced_C(element.A, element.B)

    def test_product_of_torus_elements(self) -> None:
        first = torus_element(self.create_circle_points(4))
        second = torus_element(self.create_circle_points(4))
        product = first @ second
        assert triality_check(product.A, product.B, product.C)


class LiftTestCase(BaseTestCase):

    def test_lift_coefficients_halves(self) -> None:
        lift_a, lift_b = lift_coefficients((1, 0, 0, 0))
        assert Fraction(1, 2) in [abs(value) for value in lift_a + lift_b]

    def test_lift_of_diagonal_rotation(self) -> None:
        theta = CirclePoint.from_pythagorean(2, 1)
        for c in [(2, 0, 0, 0), (1, 1, 1, 1), (4, 2, 0, 0), (3, 3, 1, 1)]:
            lift = lift_C_diagonal(c, theta)
            expected = MatQ.block_diagonal(
                MatQ(theta.power(-c[0]).rotation()), *(MatQ(theta.power(value).rotation()) for value in c[1:])
            )
            assert diagonal_rotation(c, theta) == expected
            assert lift.C == expected
            negative = lift_C_diagonal(c, theta, negate=True)
            assert negative.C == expected

    def test_lift_of_third_block(self) -> None:
        theta = CirclePoint.from_pythagorean(3, 1)
        forward, backward = MatQ(theta.rotation()), MatQ(theta.inverse().rotation())
        lift = lift_C_diagonal((0, 0, 2, 0), theta)
        assert lift.A == MatQ.block_diagonal(forward, backward, forward, forward)
        assert lift.B == MatQ.block_diagonal(backward, backward, forward, forward)

    def test_odd_sum_needs_exact_half(self) -> None:
        half = CirclePoint.from_pythagorean(2, 1)
        theta = half.compose(half)
        with pytest.raises(NoExactHalfError):
            lift_C_diagonal((1, 0, 0, 0), theta)
        lift = lift_C_diagonal((1, 0, 0, 0), theta, half=half)
        assert lift.C == MatQ.block_diagonal(MatQ(theta.inverse().rotation()), MatQ.identity(6))


class CirclePatternTestCase(BaseTestCase):

    def test_parse(self) -> None:
        assert CirclePattern.parse("1, 1,1,9") == self.create_pattern(FREE_FAMILY_PATTERN)
        with pytest.raises(InvalidPatternError):
            CirclePattern.parse("1,1,1")
        with pytest.raises(InvalidPatternError):
            CirclePattern.parse("a,b,c,d")
        with pytest.raises(InvalidPatternError):
            CirclePattern((2, 2, 0, 4))

    def test_speeds(self) -> None:
        pattern = self.create_pattern(FINITE_PATTERN)
        assert pattern.ell == (0, 0, 0, 2)
        assert pattern.r == (-1, 1, 1, 1)
        assert str(pattern) == "0,2,-1,1"

    def test_speeds_of_arrays_and_symbols(self) -> None:
        grid = np.array([FREE_FAMILY_PATTERN, FINITE_PATTERN])
        ell, r = speeds(grid.T)
        assert [list(column) for column in ell] == [[1, 0], [11, 0], [-7, 0], [1, 2]]
        assert [list(column) for column in r] == [[1, -1], [9, 1], [-9, 1], [3, 1]]
        k = sympy.Symbol("k")
        assert sympy.expand(speed_square_sum((1, 1, 1, k))) == 4 * k ** 2 + 20
        assert speed_square_sum(FREE_FAMILY_PATTERN) == self.create_pattern().square_sum == 344

    def test_freeness(self) -> None:
        assert is_free_circle(self.create_pattern(FREE_FAMILY_PATTERN))
        assert not is_free_circle(self.create_pattern(NONFREE_PATTERN))
        assert freeness_witness((0, 1), (0, 1)) == (1, 1, None)
        assert freeness_witness((2, 1), (4, 1)) == (1, 1, 2)
        assert freeness_witness((1, 1), (0, 5)) is None

    def test_element_lies_on_the_circle(self) -> None:
        theta = CirclePoint.from_pythagorean(3, 2)
        element = self.create_pattern((1, 2, 0, 1)).element(theta)
        assert triality_check(element.A, element.B, element.C)

    @settings(max_examples=100, deadline=None)
    @given(patterns)
    def test_gcd_criterion_matches_fixed_point_search(self, n) -> None:
        pattern = CirclePattern(n)
        assert is_free_circle(pattern) == brute_force_free(pattern.ell, pattern.r, limit=200)

    def test_primitive_patterns(self) -> None:
        grid = primitive_patterns(1)
        assert grid.shape == (80, 4)
        assert not ((grid == 0).all(axis=1)).any()

    def test_enumerate(self) -> None:
        circles = enumerate_free_circles(3)
        assert circles
        assert all(circle.free for circle in circles)
        assert all(circle.p1 % 8 == 0 for circle in circles)
        assert len({circle.signature for circle in circles}) == len(circles)
        everything = enumerate_free_circles(2, include_nonfree=True)
        assert any(not circle.free and circle.p1 is None for circle in everything)
        assert len(everything[0].row()) == 14

    def test_enumerated_p1_comes_from_the_quotient(self) -> None:
        with mock.patch("fatlab.topology.p1_circle", return_value=-1) as p1_circle:
            circles = enumerate_free_circles(1)
        assert p1_circle.call_count >= len(circles) > 0
        assert {circle.p1 for circle in circles} == {-1}

    def test_sphere6_circles(self) -> None:
        found = {pattern.n for pattern in enumerate_sphere6_circles()}
        assert found == SPHERE6_PATTERNS


class Su2TestCase(BaseTestCase):

    def test_table_rows(self) -> None:
        rows = su2_rows()
        assert [row.partition for row in rows] == list(TABLE_ORDER)
        for row in rows:
            weights, lifts, witness, free = SU2_TABLE_ROWS[row.partition]
            assert row.torus_weights == weights
            assert lifts in lift_up_to_sign(row)
            assert row.free == free
            if witness is None:
                assert row.witness is None
            elif witness == "undefined":
                assert row.witness[2] is None
            else:
                assert row.witness[2] == witness

    def test_rows_match_the_table_literally(self) -> None:
        row = su2_table((2, 2, 2, 2))
        assert row.lift_A == (0, 0, 0, 2)
        assert row.lift_B == (-1, 1, 1, 1)
        row = su2_table((3, 1, 1, 1, 1, 1))
        assert row.lift_A == (-1, -1, -1, 1)
        assert row.lift_B == (-1, 1, 1, -1)

    def test_only_the_2222_lift_fixes_the_unit(self) -> None:
        theta = CirclePoint.from_pythagorean(2, 1)
        assert is_spin7_member(lift_C_diagonal(torus_weights((2, 2, 2, 2)), theta))
        assert not is_spin7_member(lift_C_diagonal(torus_weights((3, 1, 1, 1, 1, 1)), theta))

    def test_only_two_rows_are_free(self) -> None:
        assert [row.label for row in su2_rows() if row.free] == ["3+1+1+1+1+1", "2+2+2+2"]

    def test_invalid_partitions(self) -> None:
        with pytest.raises(InvalidPartitionError):
            torus_weights((4, 2, 2))
        with pytest.raises(InvalidPartitionError):
            su2_table((1,) * 8)
        with pytest.raises(InvalidPartitionError):
            su2_table((5, 2))

    def test_partition_order_is_normalised(self) -> None:
        assert su2_table((1, 1, 1, 5)) == su2_table((5, 1, 1, 1))
        assert su2_table((2, 2, 2, 2)).to_dict()["witness"] is None


class FiniteActionTestCase(BaseTestCase):

    def test_free_for_every_order(self) -> None:
        pattern = self.create_pattern(FINITE_PATTERN)
        for d in range(1, 40):
            assert finite_action_free(pattern, d)
            assert finite_action_free(pattern, d, sphere6=True)

    def test_nonfree_pattern(self) -> None:
        assert not finite_action_free(self.create_pattern(NONFREE_PATTERN), 3)

    def test_invalid_arguments(self) -> None:
        with pytest.raises(InvalidOrderError):
            finite_action_free(self.create_pattern(FINITE_PATTERN), 0)
        with pytest.raises(InvalidPatternError):
            finite_action_free(self.create_pattern(FREE_FAMILY_PATTERN), 3, sphere6=True)

    @settings(max_examples=60, deadline=None)
    @given(patterns, st.integers(1, 12), st.integers(1, 4))
    def test_subgroups_of_free_actions_are_free(self, n, d, factor) -> None:
        pattern = CirclePattern(n)
        if finite_action_free(pattern, d * factor, minus_on_first=False):
            assert finite_action_free(pattern, d, minus_on_first=False)
