"""
Unit tests for the command-line driver and its reports.
"""

import json

import pytest

from cli import (
    DERIVED,
    PAPER,
    SUBCOMMANDS,
    TRIVIAL,
    UsageError,
    VerificationReport,
    build_parser,
    check,
    main,
    run,
)
from config import create_run_config


def _json_report(capsys):
    return json.loads(capsys.readouterr().out)


class TestRegistry:
    """Test the subcommand table and the parser built from it."""

    def test_every_subcommand_registered(self):
        """Test all verification subcommands are available."""
        expected = {
            "flatness", "unit-factor", "s-indep", "gl2-invariance", "teichmuller",
            "constant-iso", "truncated", "stack-counterexample", "partial-2x3",
            "g3", "km", "kmd", "gb",
        }
        assert expected <= set(SUBCOMMANDS)

    def test_parser_accepts_common_flags(self):
        """Test flags shared by every subcommand parse into config fields."""
        args = build_parser().parse_args(["flatness", "--p", "3", "--chart", "1,0", "--json"])
        assert args.subcommand == "flatness"
        assert args.p == 3
        assert args.chart == "1,0"
        assert args.output_format == "json"

    def test_unknown_subcommand_in_run(self):
        """Test run rejects names that are not registered."""
        with pytest.raises(UsageError):
            run("no-such-check", create_run_config())


class TestReports:
    """Test check records and report serialization."""

    def test_check_compares_by_default(self):
        """Test check derives pass from equality when not given."""
        assert check("a", 6, 6, "TRIVIAL").passed
        assert not check("b", 5, 6, "TRIVIAL").passed
        assert not check("c", 6, 6, "TRIVIAL", passed=False).passed

    def test_report_uses_pass_alias(self):
        """Test the serialized report carries the 'pass' key."""
        report = VerificationReport(
            subcommand="demo", config={}, checks=[check("a", 1, 1, "TRIVIAL")],
            runtime_ms=0, passed=True,
        )
        data = report.to_dict()
        assert data["pass"] is True
        assert data["checks"][0]["pass"] is True
        assert "verdict: PASS" in report.to_text()


class TestMain:
    """Test exit codes and output of main."""

    def test_teichmuller_passes(self, capsys):
        """Test a passing subcommand exits 0 with a JSON report."""
        code = main(["teichmuller", "--p", "3", "--n", "2", "--json", "--no-timings"])
        data = _json_report(capsys)
        assert code == 0
        assert data["subcommand"] == "teichmuller"
        assert data["pass"] is True
        assert data["runtime_ms"] == 0
        assert data["config"]["p"] == 3
        assert all(c["pass"] for c in data["checks"])

    def test_text_output(self, capsys):
        """Test the default text report ends with the verdict."""
        code = main(["teichmuller", "--p", "3", "--n", "2", "--no-timings"])
        out = capsys.readouterr().out
        assert code == 0
        assert "levelforge teichmuller" in out
        assert out.strip().endswith("verdict: PASS")

    def test_invalid_prime_exits_2(self, capsys):
        """Test a composite p is a configuration error."""
        assert main(["teichmuller", "--p", "4"]) == 2
        assert "invalid configuration" in capsys.readouterr().err

    def test_unknown_subcommand_exits_2(self):
        """Test argparse errors map to exit code 2."""
        assert main(["no-such-check"]) == 2

    def test_g3_p3_needs_heavy(self, capsys):
        """Test the p = 3 G^3 run is refused without --heavy."""
        assert main(["g3", "--p", "3"]) == 2
        assert "heavy" in capsys.readouterr().err

    def test_gb_needs_generators(self):
        """Test gb without --vars and --gens is a usage error."""
        assert main(["gb", "--p", "7"]) == 2

    def test_gb_zero_dimensional(self, capsys):
        """Test gb reports a basis and agrees on the quotient dimension under both orders."""
        code = main([
            "gb", "--p", "7", "--vars", "x,y", "--gens", "x^2 - y;y^3 - 1",
            "--json", "--no-timings", "--seed", "3",
        ])
        data = _json_report(capsys)
        assert code == 0
        assert len(data["checks"]) == 3
        assert data["checks"][2]["computed"] == 6

    def test_gb_rational(self, capsys):
        """Test gb over Q with --rational."""
        code = main(["gb", "--rational", "--vars", "x", "--gens", "2*x - 1", "--json", "--no-timings"])
        data = _json_report(capsys)
        assert code == 0
        assert "QQ" in data["checks"][0]["name"]

    def test_output_file(self, capsys, tmp_path):
        """Test --output writes the same JSON report to disk."""
        target = tmp_path / "reports" / "teich.json"
        code = main(["teichmuller", "--p", "3", "--n", "2", "--no-timings", "--json",
                     "--output", str(target)])
        printed = _json_report(capsys)
        assert code == 0
        assert json.loads(target.read_text(encoding="utf-8")) == printed

    def test_config_file_is_read(self, capsys, tmp_path):
        """Test --config supplies values the command line does not override."""
        config_file = tmp_path / "run.env"
        config_file.write_text("LEVELFORGE_SEED=11\n", encoding="utf-8")
        code = main(["teichmuller", "--p", "3", "--config", str(config_file), "--json", "--no-timings"])
        data = _json_report(capsys)
        assert code == 0
        assert data["config"]["seed"] == 11

    def test_computation_error_is_a_failed_check(self, capsys, monkeypatch):
        """Test a ValueError inside a subcommand exits 1 with a failed check."""
        def broken(config):
            raise ValueError("matrix is empty")

        monkeypatch.setitem(SUBCOMMANDS, "teichmuller", broken)
        code = main(["teichmuller", "--p", "3", "--json", "--no-timings"])
        data = _json_report(capsys)
        assert code == 1
        assert data["pass"] is False
        assert "ValueError" in data["checks"][0]["computed"]

    def test_stack_needs_small_prime(self, capsys):
        """Test the stack counterexample refuses p outside 2 and 3."""
        assert main(["stack-counterexample", "--p", "5"]) == 2

    def test_provenance_tags(self, capsys):
        """Test every check carries one of the three provenance tags."""
        assert main(["constant-iso", "--p", "3", "--n", "2", "--json", "--no-timings"]) == 0
        data = _json_report(capsys)
        assert {c["provenance"] for c in data["checks"]} <= {PAPER, DERIVED, TRIVIAL}
        assert PAPER == "PAPER"

    def test_field_degree_sets_fiber_field(self, capsys):
        """Test --k 2 runs the flatness fibers over F_{p^2}."""
        code = main(["flatness", "--p", "2", "--k", "2", "--json", "--no-timings"])
        data = _json_report(capsys)
        assert code == 0
        assert data["config"]["k"] == 2
        assert any("F_4" in c["name"] for c in data["checks"])

    def test_json_without_timings_is_byte_identical(self, capsys):
        """Test two runs with the same config print the same JSON."""
        argv = ["teichmuller", "--p", "3", "--n", "2", "--seed", "5", "--json", "--no-timings"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first

    def test_json_help_mentions_timings(self, capsys, monkeypatch):
        """Test the --json help points at --no-timings."""
        monkeypatch.setenv("COLUMNS", "200")
        with pytest.raises(SystemExit):
            build_parser().parse_args(["teichmuller", "--help"])
        assert "add --no-timings" in capsys.readouterr().out


if __name__ == "__main__":
    pytest.main([__file__])
