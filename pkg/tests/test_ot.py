"""
Unit tests for Oort–Tate charts, group laws and group constants.
"""

import pytest

from arith import ArithmeticDomainError, ExtField, PrimeField
from hopf import PointConditionError, is_hopf_morphism, point_add, point_scale
from ot import (
    cartier_dual_chart,
    char_p_chart,
    check_point_condition,
    chi_table,
    constant_iso,
    dot_combination,
    dotplus,
    field_fiber_points,
    ot_group,
    p2_exact_chart,
    scalar_multiple,
    scaling_isomorphism,
    solve_group_constants,
    solved_chart,
    universal_hom_ring,
    universal_ring,
    verify_scalar_identity,
)


class TestCharts:
    """Test chart construction and validation."""

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_symbolic_chart_group(self, p):
        """Test the universal char-p group is a Hopf algebra of rank p."""
        chart = char_p_chart(p)
        assert chart.is_symbolic
        assert ot_group(chart).rank == p

    def test_char_p_constants(self):
        """Test d_i = s / (i!(p-i)!) mod p."""
        chart = char_p_chart(3)
        s = chart.base.var("s")
        assert chart.dot_coeffs == (s.times(2), s.times(2))

    def test_exact_p2_chart(self):
        """Test the p = 2 chart over QQ with st = 2."""
        chart = p2_exact_chart()
        assert chart.dot_coeffs == (-chart.base.var("s"),)
        ot_group(chart)
        assert p2_exact_chart(1, 2).point == (1, 2)

    def test_fiber_validation(self):
        """Test s·t must vanish in characteristic p."""
        with pytest.raises(ArithmeticDomainError):
            char_p_chart(3, 1, 1)

    def test_half_given_point(self):
        """Test s and t must be given together."""
        with pytest.raises(ValueError):
            char_p_chart(3, 1)

    def test_cartier_dual(self):
        """Test the μ_p chart is dual to the constant chart."""
        dual = cartier_dual_chart(char_p_chart(3, 1, 0))
        assert dual.point == (0, 1)

    def test_field_fiber_points(self):
        """Test the F_2 points of st = 0."""
        assert field_fiber_points(2, PrimeField(2)) == [(0, 0), (0, 1), (1, 0)]
        assert len(field_fiber_points(2, ExtField(2, 2))) == 7


class TestGroupLaw:
    """Test the closed-form group law."""

    def test_dotplus_commutes(self):
        """Test a +. b = b +. a on the universal ring."""
        chart = char_p_chart(3)
        U = universal_hom_ring(3, chart)
        (a, b), _ = U.matrix
        assert dotplus(chart, a, b) == dotplus(chart, b, a)

    def test_dotplus_identity(self):
        """Test 0 is neutral."""
        chart = char_p_chart(2)
        R = universal_ring(chart, ["a"])
        a = R.var("a")
        assert dotplus(chart, a, R.zero()) == a

    def test_etale_fiber_is_plain_sum(self):
        """Test the law at (0, 1) is addition."""
        chart = char_p_chart(3, 0, 1)
        R = universal_ring(chart, ["a", "b"])
        a, b = R.var("a"), R.var("b")
        assert dotplus(chart, a, b) == a + b

    def test_point_condition(self):
        """Test non-points are refused."""
        chart = char_p_chart(3)
        R = universal_ring(chart, ["a"])
        with pytest.raises(PointConditionError):
            check_point_condition(chart, R.var("a") + 1)

    @pytest.mark.parametrize("m", [0, 1, 2, 4])
    def test_scalar_identity(self, m):
        """Test [m]a through the comultiplication is m·a."""
        assert verify_scalar_identity(3, char_p_chart(3), m)

    def test_combination_skips_zero(self):
        """Test zero multiples contribute nothing."""
        chart = char_p_chart(2)
        R = universal_ring(chart, ["a", "b"])
        a, b = R.var("a"), R.var("b")
        assert dot_combination(chart, R, [(2, a), (1, b)]) == b
        assert dot_combination(chart, R, [(0, a)]).is_zero()

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_convolution_matches_closed_form(self, p):
        """Test the law read off the comultiplication is the dot-plus formula."""
        chart = char_p_chart(p)
        H = ot_group(chart)
        R = universal_ring(chart, ["a", "b"])
        a, b = R.var("a"), R.var("b")
        total = point_add(H.point(R, {"x": a}), H.point(R, {"x": b}))
        assert total["x"] == dotplus(chart, a, b)

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_dotplus_associative(self, p):
        """Test (a +. b) +. c = a +. (b +. c) on the universal ring."""
        chart = char_p_chart(p)
        R = universal_ring(chart, ["a", "b", "c"])
        a, b, c = R.var("a"), R.var("b"), R.var("c")
        left = dotplus(chart, dotplus(chart, a, b), c, check=False)
        right = dotplus(chart, a, dotplus(chart, b, c), check=False)
        assert left == right

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_p_torsion(self, p):
        """Test [p]a is the identity point."""
        chart = char_p_chart(p)
        H = ot_group(chart)
        R = universal_ring(chart, ["a"])
        P = H.point(R, {"x": R.var("a")})
        assert point_scale(p, P) == H.identity(R)
        assert scalar_multiple(chart, p, R.var("a")).is_zero()


class TestGroupConstants:
    """Test the Teichmüller identities and the constant group."""

    def test_p3_constants(self):
        """Test c_1 = c_2 = 3 mod 9."""
        assert solve_group_constants(3, 2).as_ints() == [3, 3]

    def test_p2_constants(self):
        """Test c_1 = 6 mod 8."""
        assert solve_group_constants(2, 3).as_ints() == [6]

    @pytest.mark.parametrize("p, N", [(3, 3), (5, 2), (5, 3)])
    def test_symmetry_and_congruence(self, p, N):
        """Test c_i = c_(p-i) and c_i = 0 mod p."""
        c = solve_group_constants(p, N).as_ints()
        assert c == c[::-1]
        assert all(x % p == 0 for x in c)

    def test_precision_range(self):
        """Test N outside 1..6 is refused."""
        with pytest.raises(ArithmeticDomainError):
            solve_group_constants(3, 7)

    def test_chi_table(self):
        """Test the lift table mod 9."""
        assert chi_table(3, 2) == {0: 0, 1: 1, 2: 8}

    @pytest.mark.parametrize("p, N", [(2, 3), (3, 2), (5, 2)])
    def test_constant_isomorphism(self, p, N):
        """Test the solved chart group is the constant group Z/p."""
        iso = constant_iso(p, N)
        assert iso.verified
        assert iso.constants.as_ints() == solve_group_constants(p, N).as_ints()

    def test_solved_chart_group(self):
        """Test the solved chart gives a Hopf algebra over Z/p^N."""
        G = ot_group(solved_chart(3, 2))
        assert G.ring.coeffs.name == "Z/3^2"


class TestScaling:
    """Test the scaling isomorphism of field fibers."""

    def test_scaling_over_gf9(self):
        """Test (0, 1) is isomorphic to (0, λ^-2) over GF(9)."""
        F = ExtField(3, 2)
        lam = F.generator()
        chart = char_p_chart(3, 0, 1, F)
        scaled, phi = scaling_isomorphism(chart, lam)
        assert scaled.point == (0, F.pow(lam, -2))
        assert is_hopf_morphism(ot_group(scaled), ot_group(chart), phi)


if __name__ == "__main__":
    pytest.main([__file__])
