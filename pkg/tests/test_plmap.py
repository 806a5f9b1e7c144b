"""Tests for PL elements: structure, membership, composition and inversion."""

from fractions import Fraction

import numpy as np
import pytest
from conftest import d, random_element

from thompson_approx.core.dyadic import ONE, ZERO, Dyadic
from thompson_approx.core.errors import (
    ElementFormatError,
    InvalidElementError,
    OutOfDomainError,
    OutOfRangeError,
    SpaceMismatchError,
)
from thompson_approx.core.plmap import (
    PLMap,
    Space,
    breakpoints,
    circle_branches,
    compose,
    from_pairs,
    identity,
    invert,
    power,
    rotation_by,
    validate_thompson,
)


class TestConstruction:
    def test_collinear_points_are_removed(self):
        g = from_pairs(Space.INTERVAL, [(0, 0), (d("1/4"), d("1/4")), (1, 1)])
        assert g == identity()
        assert g.pieces == 1

    def test_collinear_points_with_mixed_exponents(self):
        g = from_pairs(
            Space.INTERVAL,
            [(0, 0), (d("3/1024"), d("3/2048")), (d("1/2"), d("1/4")), (1, 1)],
        )
        assert g.points == ((ZERO, ZERO), (d("1/2"), d("1/4")), (ONE, ONE))
        assert g.slopes() == [Fraction(1, 2), Fraction(3, 2)]

    def test_nearly_collinear_point_is_kept(self):
        tiny = Dyadic(1, 40)
        g = from_pairs(Space.INTERVAL, [(0, 0), (d("1/2"), d("1/2") + tiny), (1, 1)])
        assert g.pieces == 2

    def test_collinear_points_on_shifted_lift(self):
        g = from_pairs(
            Space.CIRCLE,
            [(0, d("5/2")), (d("1/4"), d("21/8")), (d("1/2"), d("11/4")), (1, d("7/2"))],
        )
        assert g.points == ((ZERO, d("1/2")), (d("1/2"), d("3/4")), (ONE, d("3/2")))

    def test_requires_two_points(self):
        with pytest.raises(ElementFormatError):
            PLMap(Space.INTERVAL, ((ZERO, ZERO),))

    def test_requires_increasing_x(self):
        with pytest.raises(ElementFormatError):
            from_pairs(Space.INTERVAL, [(0, 0), (d("1/2"), d("1/2")), (d("1/2"), d("3/4")), (1, 1)])

    def test_requires_increasing_y(self):
        with pytest.raises(ElementFormatError):
            from_pairs(Space.INTERVAL, [(0, 0), (d("1/2"), d("1/2")), (d("3/4"), d("1/2")), (1, 1)])

    def test_interval_must_fix_endpoints(self):
        with pytest.raises(ElementFormatError):
            from_pairs(Space.INTERVAL, [(0, d("1/4")), (1, 1)])

    def test_circle_needs_unit_increase(self):
        with pytest.raises(ElementFormatError):
            from_pairs(Space.CIRCLE, [(0, d("1/4")), (1, d("3/2"))])

    def test_circle_lift_is_normalized(self):
        g = from_pairs(Space.CIRCLE, [(0, d("5/2")), (d("1/2"), d("11/4")), (1, d("7/2"))])
        assert g.points[0][1] == d("1/2")
        assert g.points[-1][1] == d("3/2")

    def test_rejects_non_dyadic_coordinates(self):
        with pytest.raises(ElementFormatError):
            PLMap(Space.INTERVAL, ((ZERO, ZERO), (0.5, 0.5), (ONE, ONE)))


class TestEvaluation:
    def test_exact_eval(self, circle_element):
        assert circle_element.eval(d("1/4")) == d("5/8")
        assert circle_element.eval(d("7/8")) == d("5/4")
        assert circle_element.eval(0) == d("1/2")

    def test_eval_outside_domain(self, circle_element):
        with pytest.raises(OutOfDomainError):
            circle_element.eval(d("3/2"))
        with pytest.raises(OutOfDomainError):
            circle_element.eval_real(1.5)

    def test_eval_lift_is_periodic(self, circle_element):
        assert circle_element.eval_lift(d("5/4")) == d("5/8") + 1
        assert circle_element.eval_lift(d("-3/4")) == d("5/8") - 1

    def test_eval_real_matches_exact(self, circle_element):
        xs = np.linspace(0.0, 1.0, 9)
        expected = [float(circle_element.eval(Dyadic(i, 3))) for i in range(9)]
        np.testing.assert_allclose(circle_element.eval_real(xs), expected, rtol=0, atol=1e-15)

    def test_derivative_real_is_right_continuous(self, circle_element):
        assert circle_element.derivative_real(0.5) == 1.0
        assert circle_element.derivative_real(0.25) == 0.5
        assert circle_element.derivative_real(0.875) == 2.0
        # x = 1 is x = 0 on the circle
        assert circle_element.derivative_real(1.0) == 0.5

    def test_preimage(self, quarter_element):
        assert quarter_element.preimage(d("3/8")) == d("5/8")
        assert quarter_element.eval(quarter_element.preimage(d("3/4"))) == d("3/4")

    def test_non_dyadic_slope_falls_back_to_fractions(self):
        g = from_pairs(Space.INTERVAL, [(0, 0), (d("3/4"), d("1/2")), (1, 1)])
        assert g.eval(d("3/8")) == d("1/4")


class TestValidation:
    def test_three_piece_circle_element(self, circle_element):
        result = validate_thompson(circle_element)
        assert result.ok
        assert result.slopes == ["1/2", "1", "2"]
        assert circle_element.slopes() == [Fraction(1, 2), Fraction(1), Fraction(2)]
        assert circle_element.slope_exponents() == [-1, 0, 1]

    def test_slope_three_quarters_is_reported(self):
        g = from_pairs(Space.INTERVAL, [(0, 0), (d("1/2"), d("3/8")), (1, 1)])
        result = validate_thompson(g)
        assert not result.ok
        assert result.violations[0].kind == "slope"
        assert result.violations[0].segment == 0
        assert result.violations[0].slope == "3/4"

    def test_dyadic_checks_reported_separately(self, quarter_element):
        result = validate_thompson(quarter_element)
        assert result.dyadic_breakpoints and result.dyadic_images
        assert result.lift_normalized

    def test_rotation_is_in_t(self):
        g = rotation_by(d("1/4"))
        assert validate_thompson(g).ok
        assert g.slopes() == [Fraction(1)]

    def test_rotation_amount_range(self):
        with pytest.raises(OutOfRangeError):
            rotation_by(ONE)


class TestBreakpoints:
    def test_interval(self, quarter_element):
        assert list(breakpoints(quarter_element)) == [d("1/2"), d("3/4")]

    def test_circle_seam(self, circle_element):
        # last slope 2 differs from first slope 1/2
        assert ZERO in breakpoints(circle_element)

    def test_rotation_has_none(self):
        assert len(breakpoints(rotation_by(d("1/2")))) == 0


class TestGroupOperations:
    def test_circle_element_times_inverse(self, circle_element):
        assert compose(circle_element, invert(circle_element)) == identity(Space.CIRCLE)
        assert compose(invert(circle_element), circle_element) == identity(Space.CIRCLE)

    def test_interval_inverse_swaps_coordinates(self, quarter_element):
        inv = invert(quarter_element)
        assert inv.points == tuple((y, x) for x, y in quarter_element.points)

    def test_rotations_compose(self):
        r = compose(rotation_by(d("3/4")), rotation_by(d("1/2")))
        assert r == rotation_by(d("1/4"))

    def test_power(self):
        r = rotation_by(d("1/4"))
        assert power(r, 4) == identity(Space.CIRCLE)
        assert power(r, -1) == rotation_by(d("3/4"))
        assert power(r, 0) == identity(Space.CIRCLE)

    def test_space_mismatch(self, circle_element, quarter_element):
        with pytest.raises(SpaceMismatchError):
            compose(circle_element, quarter_element)

    def test_compose_rejects_non_elements(self, quarter_element):
        bad = from_pairs(Space.INTERVAL, [(0, 0), (d("1/2"), d("3/8")), (1, 1)])
        with pytest.raises(InvalidElementError) as excinfo:
            compose(bad, quarter_element)
        assert excinfo.value.violations

    def test_compose_matches_pointwise(self, circle_element, rng):
        other = random_element(rng, Space.CIRCLE)
        h = compose(circle_element, other)
        shifts = set()
        for i in range(65):
            x = Dyadic(i, 6)
            diff = h.eval(x) - circle_element.eval_lift(other.eval(x))
            assert diff.is_integer()
            shifts.add(diff)
        assert len(shifts) == 1


@pytest.mark.parametrize("space", [Space.INTERVAL, Space.CIRCLE])
class TestGroupClosure:
    def test_inverses_and_compositions_validate(self, rng, space):
        elements = [random_element(rng, space) for _ in range(200)]
        for g in elements:
            inv = invert(g)
            assert validate_thompson(inv).ok
            assert compose(g, inv) == identity(space)
        for _ in range(200):
            i, j = rng.integers(0, len(elements), size=2)
            assert validate_thompson(compose(elements[i], elements[j])).ok

    def test_associativity(self, rng, space):
        for _ in range(100):
            a, b, c = (random_element(rng, space) for _ in range(3))
            assert compose(compose(a, b), c) == compose(a, compose(b, c))


class TestCircleBranches:
    def test_split_at_integer_crossing(self, circle_element):
        first, second = circle_branches(circle_element)
        assert first[0] == (ZERO, d("1/2"))
        assert first[-1] == (d("3/4"), ONE)
        assert second[0] == (d("3/4"), ZERO)
        assert second[-1] == (ONE, d("1/2"))

    def test_single_branch_when_zero_fixed(self):
        assert len(circle_branches(identity(Space.CIRCLE))) == 1

    def test_interval_rejected(self, quarter_element):
        with pytest.raises(SpaceMismatchError):
            circle_branches(quarter_element)
