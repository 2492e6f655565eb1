"""
Unit tests for Hopf algebras, group points and primitive ideals.
"""

import pytest

from arith import QQ, PrimeField
from hopf import (
    GroupPoint,
    HopfAxiomError,
    PointConditionError,
    additive_group,
    constant_group,
    constant_identity_idempotent,
    hopf_create,
    hopf_power,
    hopf_product,
    is_hopf_morphism,
    multiplicative_group,
    point_add,
    point_scale,
    preserves_primitive_ideal,
    primitive_ideal,
)
from gro import Ideal, ideal_equal
from poly import PresentedRing, RingMap


class TestStandardGroups:
    """Test the standard group schemes verify and have the right rank."""

    def test_ranks(self):
        """Test ranks of μ_n, α_p and Z/n."""
        assert multiplicative_group(3, PrimeField(2)).rank == 3
        assert additive_group(3, PrimeField(3)).rank == 3
        assert constant_group(4, PrimeField(2)).rank == 4

    def test_bad_comultiplication(self):
        """Test a non-coassociative comultiplication is rejected."""
        ring = PresentedRing(["x"], PrimeField(3), relations=["x^3"])
        with pytest.raises(HopfAxiomError):
            hopf_create(ring, {"x": "x_1 + x_2 + x_1*x_2^2"}, {"x": 0})

    def test_product_rank(self):
        """Test products multiply ranks and rename generators."""
        alpha = additive_group(2, PrimeField(2))
        square = hopf_product(alpha, alpha, verify=True)
        assert square.rank == 4
        assert square.fiber_vars == ("x_1", "x_2")
        assert hopf_power(alpha, 3).rank == 8


class TestGroupPoints:
    """Test the group law on points."""

    def test_constant_group_addition(self):
        """Test 1 + 1 = 2 and 3·1 = 0 in Z/3."""
        H = constant_group(3, PrimeField(3))
        T = PresentedRing([], PrimeField(3))
        one = GroupPoint(H, T, {"e1": 1, "e2": 0})
        two = one + one
        assert two["e2"] == 1 and two["e1"] == 0
        zero = point_scale(3, one)
        assert zero == H.identity(T)
        assert point_add(one, two) == zero

    def test_universal_point_order(self):
        """Test [n]y = 1 for the universal point of μ_n."""
        H = multiplicative_group(3, PrimeField(2))
        P = GroupPoint(H, H.ring, {"y": "y"})
        assert point_scale(3, P) == H.identity(H.ring)
        assert point_scale(2, P)["y"] == H.ring.parse("y^2")

    def test_point_condition(self):
        """Test coordinates must satisfy the relations."""
        H = multiplicative_group(3, PrimeField(2))
        T = PresentedRing([], PrimeField(2))
        with pytest.raises(PointConditionError):
            GroupPoint(H, T, {"y": 0})


class TestPrimitiveIdeal:
    """Test the scheme of generators."""

    def test_cyclotomic(self):
        """Test generators of μ_3 over QQ are the roots of y^2 + y + 1."""
        H = multiplicative_group(3, QQ)
        P = primitive_ideal(H)
        assert ideal_equal(P, Ideal(H.ring, ["y^2 + y + 1"]))

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_alpha_p(self, p):
        """Test generators of α_p form a scheme of rank p - 1."""
        H = additive_group(p, PrimeField(p))
        assert primitive_ideal(H).dimension() == p - 1
        assert primitive_ideal(H, "linear").dimension() == p - 1

    def test_constant_group(self):
        """Test generators of Z/3 are the nonzero points."""
        H = constant_group(3, PrimeField(3))
        P = primitive_ideal(H)
        assert P.dimension() == 2
        assert P.contains(constant_identity_idempotent(H))


class TestMorphisms:
    """Test Hopf-algebra maps."""

    def test_power_map(self):
        """Test y ↦ y^2 is an automorphism of μ_3 over F_2 preserving generators."""
        H = multiplicative_group(3, PrimeField(2))
        phi = RingMap(H.ring, H.ring, {"y": "y^2"})
        assert is_hopf_morphism(H, H, phi)
        assert preserves_primitive_ideal(H, phi)

    def test_non_morphism(self):
        """Test x ↦ x^2 on α_3 is a ring map but not a Hopf map."""
        H = additive_group(3, PrimeField(3))
        phi = RingMap(H.ring, H.ring, {"x": "x^2"})
        assert not is_hopf_morphism(H, H, phi)


if __name__ == "__main__":
    pytest.main([__file__])
