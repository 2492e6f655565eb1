"""
Unit tests for presented rings, parsing and ring maps.
"""

import random

import pytest

from arith import QQ, ArithmeticDomainError, ExtField, PrimeField
from poly import (
    DEGREVLEX,
    KEY_CACHE_SIZE,
    MonomialOrder,
    ParseError,
    PresentedRing,
    RingMap,
    WellDefinednessError,
    format_poly,
    normal_form,
    parse_poly,
    ring_create,
    ring_hom,
    tensor_power,
    tensor_square,
)


@pytest.fixture
def ring():
    return PresentedRing(["x", "y"], PrimeField(3), relations=["x^3 - x", "y^2"])


class TestParsing:
    """Test the polynomial text codec."""

    def test_parse_and_format(self):
        """Test canonical text output."""
        R = PresentedRing(["x", "y"], QQ)
        f = parse_poly("(x + y)^2 - 2*x*y", R)
        assert format_poly(f) == "x^2 + y^2"

    def test_division_by_constant(self):
        """Test '/' by a nonzero constant."""
        R = PresentedRing(["x"], QQ)
        assert R.parse("x/2") * 2 == R.var("x")

    def test_undeclared_variable(self):
        """Test unknown names are rejected."""
        R = PresentedRing(["x"], QQ)
        with pytest.raises(ParseError):
            R.parse("x + z")

    def test_bad_character(self):
        """Test stray characters are rejected."""
        R = PresentedRing(["x"], QQ)
        with pytest.raises(ParseError):
            R.parse("x $ 1")


class TestMonomialOrder:
    """Test sort keys and their cache."""

    def test_degrevlex_keys(self):
        """Test degree first, then the smaller last exponent wins."""
        order = MonomialOrder("degrevlex")
        assert order.key((2, 0)) > order.key((0, 1))
        assert order.key((1, 1)) > order.key((0, 2))
        assert order.neg_key((1, 1)) < order.neg_key((0, 2))

    def test_cache_is_bounded(self):
        """Test many distinct monomials never grow the cache past its size."""
        order = MonomialOrder("degrevlex", cache_size=8)
        fresh = MonomialOrder("degrevlex")
        for i in range(200):
            m = (i, 200 - i, i % 7)
            assert order.key(m) == fresh.key(m)
            order.neg_key(m)
        assert order.key.cache_info().currsize <= 8
        assert order.neg_key.cache_info().currsize <= 8

    def test_shared_orders_are_bounded(self):
        """Test the module orders carry the default bound."""
        assert DEGREVLEX.key.cache_info().maxsize == KEY_CACHE_SIZE
        assert DEGREVLEX == MonomialOrder("degrevlex", cache_size=4)


class TestPresentedRing:
    """Test normal forms and finite-dimensional structure."""

    def test_normal_form(self, ring):
        """Test relations are applied on parse."""
        assert ring.parse("x^4") == ring.var("x") ** 2
        assert ring.parse("x*y^3").is_zero()

    def test_dimension(self, ring):
        """Test the quotient has dimension 3 * 2."""
        assert ring.is_finite_dimensional
        assert ring.dimension == 6

    def test_coordinates_roundtrip(self, ring):
        """Test coordinates rebuild the element."""
        f = ring.parse("2*x^2*y + x + 1")
        assert ring.from_coordinates(ring.coordinates(f)) == f

    def test_specialize(self):
        """Test substituting base parameters."""
        R = PresentedRing(["x", "t"], PrimeField(2), relations=["x^2 - t*x"], params=["t"])
        fiber, q = R.specialize({"t": 1})
        assert fiber.dimension == 2
        assert q(R.parse("t*x")) == fiber.var("x")

    def test_tensor_power(self, ring):
        """Test copies of fiber variables and relations."""
        T = tensor_power(ring, 2)
        assert T.variables == ("x_1", "y_1", "x_2", "y_2")
        assert T.dimension == 36
        assert T.inclusion(2)(ring.var("x")) == T.var("x_2")
        assert tensor_square(ring) == T

    def test_ring_create(self):
        """Test ring_create and normal_form reduce by the relations."""
        R = ring_create(["x"], PrimeField(5), relations=["x^2 - 2"], name="F_25")
        assert R.describe() == "F_25"
        assert R.dimension == 2
        assert normal_form(R.free().parse("x^3"), R) == R.parse("2*x")


class TestRingMap:
    """Test ring homomorphisms."""

    def test_well_defined(self, ring):
        """Test relations must map to zero."""
        target = PresentedRing(["z"], PrimeField(3), relations=["z^2"])
        with pytest.raises(WellDefinednessError):
            RingMap(ring, target, {"x": "z + 1", "y": "z"})
        phi = RingMap(ring, target, {"x": "0", "y": "z"})
        assert phi(ring.parse("x + y")) == target.var("z")
        with pytest.raises(WellDefinednessError):
            ring_hom(ring, target, {"x": "z", "y": "1"})
        assert ring_hom(ring, target, ["0", "z"])(ring.parse("y")) == target.var("z")

    def test_composition(self, ring):
        """Test then() composes in order."""
        swap = RingMap(ring, ring, {"x": "-x", "y": "-y"})
        identity = swap.then(swap)
        assert identity(ring.parse("x^2 + x*y + y")) == ring.parse("x^2 + x*y + y")

    def test_preserves_sum_and_product(self, ring):
        """Test a ring map is additive and multiplicative on random elements."""
        rng = random.Random(5)
        target = PresentedRing(["u", "v"], PrimeField(3), relations=["u^3 - u", "v^2"])
        phi = RingMap(ring, target, {"x": "-u", "y": "u*v"})
        for _ in range(10):
            f, g = ring.random_element(rng), ring.random_element(rng)
            assert phi(f + g) == target.normal_form(phi(f) + phi(g))
            assert phi(ring.normal_form(f * g)) == target.normal_form(phi(f) * phi(g))


class TestExtensionFieldScalars:
    """Test scalars of F_(p^k) keep their field encoding."""

    @pytest.mark.parametrize("p", [2, 3])
    def test_monic_with_leading_generator(self, p):
        """Test a polynomial with leading coefficient z becomes monic."""
        F = ExtField(p, 2)
        z = F.generator()
        R = PresentedRing(["x"], F)
        f = R.from_terms({(1,): z, (0,): 1})
        assert f.monic().terms == {(1,): 1, (0,): F.inv(z)}

    @pytest.mark.parametrize("p", [2, 3])
    def test_scale_by_generator(self, p):
        """Test scaling by z and by its inverse."""
        F = ExtField(p, 2)
        z = F.generator()
        R = PresentedRing(["x"], F)
        x = R.var("x")
        assert x.scale(z).terms == {(1,): z}
        assert x.scale(z).scale(F.inv(z)) == x
        assert x.scale(F.mul(z, z)) == x.scale(z).scale(z)

    def test_integer_multiples(self):
        """Test times() uses the integer embedding while scale() uses the encoding."""
        F = ExtField(2, 2)
        R = PresentedRing(["x"], F)
        x = R.var("x")
        assert x.times(2).is_zero()
        assert x.times(3) == x
        assert x.scale(2).terms == {(1,): 2}
        assert R.const(2).is_zero()
        assert R.scalar(2).constant_term() == 2

    def test_scale_rejects_non_elements(self):
        """Test an integer outside the encoding range is not a field element."""
        R = PresentedRing(["x"], ExtField(3, 2))
        with pytest.raises(ArithmeticDomainError):
            R.var("x").scale(9)
        with pytest.raises(ArithmeticDomainError):
            R.scalar(-1)

    def test_specialize_at_generator(self):
        """Test a base parameter can be set to a non-prime-field element."""
        F = ExtField(3, 2)
        z = F.generator()
        R = PresentedRing(["x", "t"], F, relations=["x^2 - t*x"], params=["t"])
        fiber, q = R.specialize({"t": z})
        assert fiber.dimension == 2
        assert q(R.parse("t*x")) == fiber.var("x").scale(z)


if __name__ == "__main__":
    pytest.main([__file__])
