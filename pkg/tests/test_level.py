"""
Unit tests for full level structures on Oort–Tate groups.

Tests marked slow need LEVELFORGE_RUN_SLOW_TESTS=true.
"""

import pytest

from arith import ExtField, PrimeField
from config import Config
from hopf import additive_group, constant_group, multiplicative_group
from level import (
    EtaleFiber,
    base_change_check,
    contains_field_equations,
    count_rational_points,
    dotplus_defect,
    etale_fiber_check,
    etale_fibers,
    expected_rank,
    fiber_rank,
    full_level_ideal,
    gl2_generators,
    gl2_precompose_invariance,
    hopf_level_ideal,
    nonzero_vectors,
    s_independence_check,
    unit_factorization_check,
    unit_factorization_details,
    verify_flatness,
)
from level.stack import act, preserves, stack_counterexample
from level.truncated import power_map, split_model, truncated_level_rank
from ot import char_p_chart

slow = pytest.mark.skipif(not Config.RUN_SLOW_TESTS, reason="slow test; set LEVELFORGE_RUN_SLOW_TESTS=true")


class TestLevelIdeal:
    """Test the level ideal and its fiber ranks."""

    def test_generator_count(self):
        """Test 2(p^2 - 1) labelled generators."""
        level = full_level_ideal(3)
        assert len(level.labels) == 16
        assert level.labels[:2] == ["row(0,1)", "col(0,1)"]

    def test_nonzero_vectors(self):
        """Test F_p^2 minus the origin."""
        assert nonzero_vectors(2) == [(0, 1), (1, 0), (1, 1)]
        assert len(nonzero_vectors(3, 3)) == 26

    @pytest.mark.parametrize("point", [(0, 0), (0, 1), (1, 0)])
    def test_p2_fiber_ranks(self, point):
        """Test every F_2 fiber has rank |GL_2(F_2)| = 6."""
        assert fiber_rank(2, point) == 6

    def test_identity_matrix_is_level_structure(self):
        """Test the identity matrix over the étale fiber satisfies every generator."""
        level = full_level_ideal(2, char_p_chart(2, 0, 1))
        R = level.ambient
        assert not level.contains(R.one())
        assert count_rational_points(level) == 6

    def test_alpha_fiber_is_not_reduced(self):
        """Test the α_2 fiber is non-reduced: rank 6 but only the zero matrix as F_2 point."""
        level = full_level_ideal(2, char_p_chart(2, 0, 0))
        assert level.rank == 6
        assert count_rational_points(level) == 1


class TestFlatness:
    """Test flatness over the Oort–Tate base."""

    def test_p2_over_f2(self):
        """Test the F_2 fibers and the characteristic-0 spot check."""
        report = verify_flatness(2)
        assert report.expected == 6
        assert [f.point for f in report.fibers] == ["(0,0)", "(0,1)", "(1,0)"]
        assert [f.rank for f in report.spot_checks] == [6]
        assert report.verdict

    def test_p2_over_f4(self):
        """Test all seven GF(4) fibers."""
        report = verify_flatness(2, 4)
        assert len(report.fibers) == 7
        assert report.verdict

    @slow
    def test_p3_over_f3(self):
        """Test every F_3 fiber has rank 48."""
        report = verify_flatness(3)
        assert len(report.fibers) == 5
        assert all(f.rank == 48 for f in report.fibers)

    @slow
    def test_process_pool_matches_serial(self):
        """Test a process pool gives the same sorted report."""
        serial = verify_flatness(2, 4, jobs=1)
        pooled = verify_flatness(2, 4, jobs=2)
        assert [(f.point, f.rank) for f in serial.fibers] == [(f.point, f.rank) for f in pooled.fibers]


class TestEtaleFibers:
    """Test reducedness at split étale fibers."""

    def test_etale_fiber_points(self):
        """Test the split étale fibers over F_3."""
        assert etale_fibers(3, 3) == [(0, 1)]
        assert len(etale_fibers(3, 9)) == 4

    def test_p2_reduced(self):
        """Test rank equals the number of rational points."""
        fibers = etale_fiber_check(2)
        assert len(fibers) == 1
        assert fibers[0].reduced

    def test_field_equations_decide_reducedness(self):
        """Test the étale fiber contains x^2 - x for every entry and the α_2 fiber does not."""
        etale = full_level_ideal(2, char_p_chart(2, 0, 1))
        alpha = full_level_ideal(2, char_p_chart(2, 0, 0))
        assert contains_field_equations(etale)
        assert not contains_field_equations(alpha)

    def test_point_count_alone_is_not_enough(self):
        """Test a fiber without field equations is not reduced even when rank matches points."""
        assert EtaleFiber("0", "1", 6, 6, True).reduced
        assert not EtaleFiber("0", "1", 6, 6, False).reduced
        assert not EtaleFiber("0", "1", 6, 5, True).reduced

    @slow
    def test_p3_split_fibers_reduced(self):
        """Test every split étale fiber over F_9 is reduced."""
        fibers = etale_fiber_check(3, 9)
        assert len(fibers) == 4
        assert all(f.field_equations and f.reduced for f in fibers)


class TestGL2Invariance:
    """Test precomposition by GL_2(F_p)."""

    def test_generators(self):
        """Test the generating set sizes."""
        assert len(gl2_generators(2)) == 2
        assert len(gl2_generators(3)) == 3

    def test_p2_symbolic(self):
        """Test invariance on the symbolic chart."""
        assert gl2_precompose_invariance(2)

    def test_p2_full_group_on_fiber(self):
        """Test all of GL_2(F_2) on the μ_2 fiber."""
        assert gl2_precompose_invariance(2, char_p_chart(2, 1, 0), full_group=True)

    @slow
    def test_p3_symbolic(self):
        """Test invariance on the symbolic p = 3 chart."""
        assert gl2_precompose_invariance(3)


class TestUnitFactorization:
    """Test ma +. nb = (ma + nb)·u."""

    def test_defect_divisible(self):
        """Test x + y divides the dot-plus defect for p = 3."""
        g = dotplus_defect(3)
        assert g == g.ring.parse("2*x*y^2 + 2*x^2*y")

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_identities(self, p):
        """Test the unit identities for every (m, n)."""
        details = unit_factorization_details(p)
        assert len(details) == p * p - 1
        assert unit_factorization_check(p)

    def test_s_independence_p2(self):
        """Test the dot-plus and plain-sum ideals agree."""
        assert s_independence_check(2)

    def test_base_change_p2(self):
        """Test specialization commutes with the construction."""
        results = base_change_check(2)
        assert sorted(results) == [(0, 0), (0, 1), (1, 0)]
        assert all(results.values())

    @slow
    def test_s_independence_p3(self):
        """Test the p = 3 ideals agree."""
        assert s_independence_check(3)


class TestGenericLevel:
    """Test the level ideal built from a Hopf algebra."""

    def test_expected_rank(self):
        """Test |GL_2(Z/p^l)|."""
        assert expected_rank(2) == 6
        assert expected_rank(2, 2) == 96

    @pytest.mark.parametrize("group", ["constant", "multiplicative", "additive"])
    def test_p2_groups(self, group):
        """Test Z/2, μ_2 and α_2 all have level rank 6."""
        F = PrimeField(2)
        H = {"constant": constant_group(2, F),
             "multiplicative": multiplicative_group(2, F),
             "additive": additive_group(2, F)}[group]
        _, ideal = hopf_level_ideal(H, 2)
        assert ideal.dimension() == 6


class TestTruncated:
    """Test truncated level structures on split models."""

    def test_power_map_constant(self):
        """Test the indicator of 1 in Z/2 pulls back to e1 + e3 in Z/4."""
        G, Gp = split_model(2, 2, "constant"), split_model(2, 1, "constant")
        phi = power_map(G, Gp, 2, 2, "constant")
        assert phi.images["e1"] == G.ring.parse("e1 + e3")

    def test_bad_flavor(self):
        """Test unknown flavors are refused."""
        with pytest.raises(ValueError):
            split_model(2, 1, "additive")

    @pytest.mark.parametrize("flavor", ["multiplicative", "constant"])
    def test_level_one(self, flavor):
        """Test l = 1 recovers the rank 6 level scheme."""
        result = truncated_level_rank(2, 1, flavor)
        assert result.rank == 6
        assert result.verdict

    @slow
    @pytest.mark.parametrize("flavor", ["multiplicative", "constant"])
    def test_level_two(self, flavor):
        """Test μ_4 and Z/4 give rank |GL_2(Z/4)| = 96."""
        result = truncated_level_rank(2, 2, flavor)
        assert result.rank == 96


class TestStack:
    """Test the GL_2(F_(p^2)) counterexample."""

    def test_scalar_action_preserves(self):
        """Test a scalar matrix over GF(4) preserves the α_2 level ideal."""
        F = ExtField(2, 2)
        level = full_level_ideal(2, char_p_chart(2, 0, 0, F))
        z = F.generator()
        assert preserves(level, ((z, 0), (0, z)))
        assert preserves(level, ((z, 0), (0, z)), "left")

    def test_unknown_orientation(self):
        """Test orientations other than right and left are refused."""
        F = ExtField(2, 2)
        level = full_level_ideal(2, char_p_chart(2, 0, 0, F))
        with pytest.raises(ValueError):
            act(level, ((1, 0), (0, 1)), "sideways")

    def test_p2_witness(self):
        """Test a witness exists and the F_2 symmetries hold."""
        report = stack_counterexample(2)
        assert report.witness is not None
        assert report.field_name == "GF(2^2)"
        assert report.verdict

    def test_p2_witness_left(self):
        """Test the left action also has a witness."""
        assert stack_counterexample(2, "left").witness is not None


if __name__ == "__main__":
    pytest.main([__file__])
