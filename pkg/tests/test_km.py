"""
Unit tests for the norm identity and Katz–Mazur level conditions.

Tests marked slow need LEVELFORGE_RUN_SLOW_TESTS=true.
"""

import random

import pytest

from arith import QQ, LevelforgeError, PrimeField
from config import Config
from gro import Ideal, ideal_equal
from hopf import additive_group, constant_group, multiplicative_group
from km import (
    FIBERS,
    RankMismatch,
    alpha2_square,
    cartier_dual_images,
    determinant,
    divisor_identity,
    expand_determinant,
    hom_ring,
    km_ideal,
    km_vs_primitive,
    kmd_rank_alpha2,
    mu2_square,
    norm_form,
    source_points,
)
from poly import PresentedRing

slow = pytest.mark.skipif(not Config.RUN_SLOW_TESTS, reason="slow test; set LEVELFORGE_RUN_SLOW_TESTS=true")


class TestDeterminant:
    """Test the fraction-free determinant."""

    def test_two_by_two(self):
        """Test det [[a, b], [c, d]] = ad - bc."""
        R = PresentedRing(["a", "b", "c", "d"], QQ)
        a, b, c, d = (R.var(v) for v in "abcd")
        assert R.equal(determinant([[a, b], [c, d]]), R.parse("a*d - b*c"))

    def test_zero_pivot_swaps_rows(self):
        """Test a zero leading entry is handled by a row swap with a sign change."""
        R = PresentedRing(["a", "b"], QQ)
        a, b = R.var("a"), R.var("b")
        assert R.equal(determinant([[R.zero(), a], [b, R.zero()]]), R.parse("-a*b"))

    def test_three_by_three(self):
        """Test a 3×3 determinant that needs exact division."""
        R = PresentedRing(["x", "y"], QQ)
        x, y = R.var("x"), R.var("y")
        one = R.one()
        matrix = [[x, one, R.zero()], [one, x, y], [R.zero(), y, x]]
        assert R.equal(determinant(matrix), R.parse("x^3 - x*y^2 - x"))

    def test_empty_matrix_rejected(self):
        """Test the empty determinant raises ValueError."""
        with pytest.raises(ValueError):
            determinant([])


class TestNormForm:
    """Test norms of generic elements."""

    def _values(self, nf, constant, linear):
        values = [0] * nf.rank
        values[nf.basis.index((0,))] = constant
        values[nf.basis.index((1,))] = linear
        return values

    def test_split_algebra(self):
        """Test N(a + b·y) = a² - b² on Q[y]/(y² - 1)."""
        host = PresentedRing(["y"], QQ, relations=["y^2 - 1"])
        nf = norm_form(host)
        assert nf.rank == 2
        assert nf.evaluate(self._values(nf, 2, 1)) == 3
        assert nf.evaluate(self._values(nf, 1, 1)) == 0

    def test_local_algebra(self):
        """Test N(a + b·x) = a² on F_5[x]/(x²)."""
        host = PresentedRing(["x"], PrimeField(5), relations=["x^2"])
        nf = norm_form(host)
        assert nf.evaluate(self._values(nf, 3, 4)) == 4

    @pytest.mark.parametrize("coeffs, names, relations", [
        (PrimeField(7), ["x", "y"], ["x^2 - y", "y^2"]),
        (QQ, ["x"], ["x^3 - 2"]),
        (PrimeField(3), ["x"], ["x^3 - x"]),
    ])
    def test_multiplicative(self, coeffs, names, relations):
        """Test N(fg) = N(f)N(g) for random elements."""
        host = PresentedRing(names, coeffs, relations=relations)
        nf = norm_form(host)
        rng = random.Random(13)
        for _ in range(5):
            f = host.from_coordinates([coeffs.random_element(rng) for _ in range(nf.rank)])
            g = host.from_coordinates([coeffs.random_element(rng) for _ in range(nf.rank)])
            norm_f = nf.evaluate(host.coordinates(f))
            norm_g = nf.evaluate(host.coordinates(g))
            assert nf.evaluate(host.coordinates(f * g)) == coeffs.mul(norm_f, norm_g)

    def test_source_points(self):
        """Test (Z/p)^g has p^g points."""
        assert len(source_points(3, 2)) == 9
        assert (0, 0) in source_points(2, 2)


class TestKMIdeal:
    """Test ×-homomorphism ideals on small group schemes."""

    def test_mu_p_over_rationals(self):
        """Test the KM condition on μ_3 over Q cuts out the cyclotomic polynomial."""
        km = km_ideal(multiplicative_group(3, QQ), 1)
        assert km.p == 3
        assert km.degree == 3
        assert ideal_equal(km.ideal, Ideal(km.ambient, ["y_1^2 + y_1 + 1"]))
        assert km.rank == 2

    def test_constant_group(self):
        """Test on Z/2 the only ×-homomorphism sends 1 to the nonzero point."""
        km = km_ideal(constant_group(2, PrimeField(2)), 1, 2)
        assert km.rank == 1
        assert ideal_equal(km.ideal, Ideal(km.ambient, ["e1_1 - 1"]))

    def test_rank_mismatch(self):
        """Test a source group of the wrong order is rejected."""
        with pytest.raises(RankMismatch):
            km_ideal(multiplicative_group(4, QQ), 1, 3)

    def test_prime_must_be_inferable(self):
        """Test a rank that is not a prime power raises RankMismatch."""
        with pytest.raises(RankMismatch):
            km_ideal(multiplicative_group(4, QQ), 1)

    def test_cartier_dual_needs_alpha2_square(self):
        """Test the dual images are only defined for (Z/2)^2 → α_2^2."""
        km = km_ideal(constant_group(2, PrimeField(2)), 1, 2)
        with pytest.raises(LevelforgeError):
            cartier_dual_images(km, alpha2_square(), km.ambient)


class TestKMD:
    """Test the KM plus duality condition on α_2²."""

    def test_kmd_rank_bounds(self):
        """Test KM+D is strictly larger than |GL_2(F_2)| but inside the KM scheme."""
        result = kmd_rank_alpha2()
        assert result.expected == 6
        assert result.rank > 6
        assert result.rank <= result.km_rank <= 16

    def test_kmd_rank_value(self):
        """Test the dual condition adds nothing on α_2², so KM+D keeps the KM rank 8."""
        result = kmd_rank_alpha2()
        assert result.dual_generators == 0
        assert result.rank == result.km_rank == 8

    def test_dual_has_transposed_matrix(self):
        """Test the k-th coordinate of h^D is Π_i (1 + M_ik·x_i)."""
        km = km_ideal(alpha2_square(), 2, 2)
        dual_source = alpha2_square()
        S = hom_ring(km.ambient, dual_source)
        images = cartier_dual_images(km, dual_source, S)
        assert S.equal(images["y_1"], S.parse("(1 + x_1_1*x_1)*(1 + x_2_1*x_2)"))
        assert S.equal(images["y_2"], S.parse("(1 + x_1_2*x_1)*(1 + x_2_2*x_2)"))


class TestDivisorIdentity:
    """Test the norm identity for homomorphisms between finite group schemes."""

    def test_identity_map(self):
        """Test the identity of α_2^2 satisfies the identity with no equations."""
        H = alpha2_square()
        base = PresentedRing([], PrimeField(2))
        S = hom_ring(base, H)
        images = {v: S.var(v) for v in H.fiber_vars}
        assert divisor_identity(base, H, H, images) == []

    def test_constant_source_into_mu2(self):
        """Test over F_2 the only map Z/2 → μ_2 with full image divisor is the trivial one."""
        F = PrimeField(2)
        R = PresentedRing(["a"], F, relations=["a^2 - 1"])
        source = constant_group(2, F)
        S = hom_ring(R, source)
        equations = divisor_identity(R, source, multiplicative_group(2, F), {"y": S.parse("1 + (a - 1)*e1")})
        assert ideal_equal(Ideal(R, equations), Ideal(R, ["a - 1"]))

    def test_rank_mismatch(self):
        """Test source and target must have the same rank."""
        base = PresentedRing([], PrimeField(2))
        alpha = additive_group(2, PrimeField(2))
        with pytest.raises(RankMismatch):
            divisor_identity(base, alpha, mu2_square(), {})

    def test_expand_determinant_matches_bareiss(self):
        """Test the permutation expansion agrees with the fraction-free determinant."""
        R = PresentedRing(["x", "y"], QQ)
        x, y = R.var("x"), R.var("y")
        one = R.one()
        matrix = [[x, one, R.zero()], [one, x, y], [R.zero(), y, x]]
        assert R.equal(expand_determinant(matrix, R), determinant(matrix))

    def test_expand_determinant_with_nilpotents(self):
        """Test det [[1 + a, b], [b, 1 + a]] = 1 when a^2 = b^2 = 0 over F_2."""
        R = PresentedRing(["a", "b"], PrimeField(2), relations=["a^2", "b^2"])
        a, b = R.var("a"), R.var("b")
        matrix = [[R.one() + a, b], [b, R.one() + a]]
        assert R.equal(expand_determinant(matrix, R), R.one())


class TestKMAgainstPrimitive:
    """Test KM against the primitive-point level ideal on the three fibers."""

    def test_etale_fiber_p2(self):
        """Test both conditions give |GL_2(F_2)| on the étale fiber."""
        (row,) = km_vs_primitive(2, ["etale"])
        assert row.expected == 6
        assert row.km_rank == 6
        assert row.level_rank == 6
        assert row.km_matches

    @slow
    def test_all_fibers_p2(self):
        """Test the primitive-point ideal is flat across all fibers for p = 2."""
        rows = km_vs_primitive(2)
        assert len(rows) == len(FIBERS)
        assert all(row.level_rank == 6 for row in rows)


if __name__ == "__main__":
    pytest.main([__file__])
