"""
Command-line driver: every verification as a subcommand with a report.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage or
budget errors.
"""

import argparse
import random
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from arith import QQ, LevelforgeError, create_prime_field, gl_order_formula, rank_two_count, teichmuller_table
from config import PRESETS, Config, RunConfig, create_run_config
from gro import Budget, BudgetExceeded, Ideal, budget_scope
from utils import Logger, create_report_exporter, create_table_formatter, set_log_level

logger = Logger("cli")

PAPER = "PAPER"
DERIVED = "DERIVED"
TRIVIAL = "TRIVIAL"

G3_KNOWN_RANKS = {2: 169, 3: 11473}


class UsageError(LevelforgeError):
    """Raised for invalid flag combinations; exit code 2."""


class CheckRecord(BaseModel):
    """One computed-versus-expected comparison."""

    model_config = ConfigDict(populate_by_name=True)

    name: str
    computed: Any
    expected: Any
    provenance: str
    passed: bool = Field(alias="pass")


class VerificationReport(BaseModel):
    """The outcome of one subcommand run."""

    model_config = ConfigDict(populate_by_name=True)

    subcommand: str
    config: Dict[str, Any]
    checks: List[CheckRecord]
    runtime_ms: int
    engine_version: str = Config.ENGINE_VERSION
    passed: bool = Field(alias="pass")

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)

    def to_json(self) -> str:
        return create_report_exporter().to_json(self.to_dict())

    def to_text(self) -> str:
        formatter = create_table_formatter()
        rows = [
            {
                "check": c.name,
                "computed": formatter.stringify(c.computed),
                "expected": formatter.stringify(c.expected),
                "source": c.provenance,
                "pass": formatter.stringify(c.passed),
            }
            for c in self.checks
        ]
        lines = [
            f"levelforge {self.subcommand} (engine {self.engine_version})",
            formatter.render(rows, ["check", "computed", "expected", "source", "pass"]),
            f"runtime: {self.runtime_ms} ms",
            f"verdict: {'PASS' if self.passed else 'FAIL'}",
        ]
        return "\n".join(lines)


def check(name: str, computed: Any, expected: Any, provenance: str,
          passed: Optional[bool] = None) -> CheckRecord:
    if passed is None:
        passed = computed == expected
    return CheckRecord(name=name, computed=computed, expected=expected,
                       provenance=provenance, passed=bool(passed))


Handler = Callable[[RunConfig], List[CheckRecord]]
SUBCOMMANDS: Dict[str, Handler] = {}
HELP: Dict[str, str] = {}


def subcommand(name: str, help_text: str) -> Callable[[Handler], Handler]:
    def register(fn: Handler) -> Handler:
        SUBCOMMANDS[name] = fn
        HELP[name] = help_text
        return fn
    return register


def _chart(config: RunConfig):
    from ot import char_p_chart

    if config.chart is None:
        return char_p_chart(config.p)
    s, t = config.chart
    return char_p_chart(config.p, s, t)


@subcommand("flatness", "fiber ranks of the full level ideal over {st = 0}")
def run_flatness(config: RunConfig) -> List[CheckRecord]:
    from level import etale_fiber_check, verify_flatness

    q = config.field_size()
    report = verify_flatness(config.p, q, config.jobs)
    records = [
        check(f"rank at {f.point} over F_{report.q}", f.rank, report.expected, DERIVED)
        for f in report.fibers
    ]
    records += [
        check(f"rank at {f.point} over QQ", f.rank, report.expected, DERIVED)
        for f in report.spot_checks
    ]
    for fiber in etale_fiber_check(config.p, q):
        records.append(check(f"étale fiber ({fiber.s},{fiber.t}) is reduced",
                             fiber.rational_points, fiber.rank, DERIVED, fiber.reduced))
    return records


@subcommand("unit-factor", "ma +. nb = (ma + nb) u with u^p = 1")
def run_unit_factor(config: RunConfig) -> List[CheckRecord]:
    from level import unit_factorization_details

    provenance = PAPER if config.p == 2 else DERIVED
    return [
        check(f"unit identities at (m,n)=({r.m},{r.n})",
              [r.factorization, r.unit_power, r.primitivity], [True, True, True], provenance)
        for r in unit_factorization_details(config.p)
    ]


@subcommand("s-indep", "the level ideal has generators free of s")
def run_s_indep(config: RunConfig) -> List[CheckRecord]:
    from level import base_change_check, s_independence_check

    records = [check("dot-plus ideal == plain-sum ideal", s_independence_check(config.p), True, PAPER)]
    for (s, t), ok in sorted(base_change_check(config.p).items()):
        records.append(check(f"base change to ({s},{t})", ok, True, DERIVED))
    return records


@subcommand("gl2-invariance", "precomposition by GL_2(F_p) preserves the level ideal")
def run_gl2(config: RunConfig) -> List[CheckRecord]:
    from level import gl2_precompose_invariance

    chart = _chart(config)
    scope = "all of GL_2" if config.full_group else "generators of GL_2"
    ok = gl2_precompose_invariance(config.p, chart, full_group=config.full_group)
    return [check(f"{scope}(F_{config.p}) on {chart.describe()}", ok, True, PAPER)]


@subcommand("teichmuller", "Teichmüller lifts and the group-constant identities")
def run_teichmuller(config: RunConfig) -> List[CheckRecord]:
    from ot import InconsistentSystem, solve_group_constants

    p, N = config.p, config.n
    modulus = p ** N
    table = teichmuller_table(p, N)
    records = []
    for j, w in table.items():
        ok = pow(w.value, p, modulus) == w.value and w.value % p == j
        records.append(check(f"chi({j}) mod {p}^{N}", w.value, f"chi^p = chi, = {j} mod {p}", TRIVIAL, ok))
    try:
        constants = solve_group_constants(p, N)
        records.append(check(f"group constants mod {p}^{N}", constants.as_ints(), "consistent", DERIVED, True))
    except InconsistentSystem as exc:
        records.append(check(f"group constants mod {p}^{N}", str(exc), "consistent", DERIVED, False))
    return records


@subcommand("constant-iso", "Z/p^N[x]/(x^p - x) is the constant group Z/p")
def run_constant_iso(config: RunConfig) -> List[CheckRecord]:
    from ot import VerificationFailed, constant_iso

    p, N = config.p, config.n
    try:
        iso = constant_iso(p, N)
        return [check(f"Hopf isomorphism mod {p}^{N}", str(iso.forward.images["x"]), "verified", DERIVED, True)]
    except VerificationFailed as exc:
        return [check(f"Hopf isomorphism mod {p}^{N}", str(exc), "verified", DERIVED, False)]


@subcommand("truncated", "truncated level structure on split models of G[p^l]")
def run_truncated(config: RunConfig) -> List[CheckRecord]:
    from level.truncated import truncated_level_rank

    result = truncated_level_rank(config.p, config.l, config.flavor, config.strategy)
    return [check(f"{config.flavor} rank, p={config.p}, l={config.l}", result.rank, result.expected, DERIVED)]


@subcommand("stack-counterexample", "a GL_2(F_(p^2)) matrix moving the alpha_p^2 level ideal")
def run_stack(config: RunConfig) -> List[CheckRecord]:
    from level.stack import stack_counterexample

    if config.p not in (2, 3):
        raise UsageError(f"stack-counterexample is defined for p in (2, 3), got {config.p}")
    report = stack_counterexample(config.p, config.orientation)
    witness = None if report.witness is None else [list(row) for row in report.witness]
    return [
        check(f"witness over {report.field_name} ({report.orientation})", witness, "exists",
              PAPER, report.witness is not None),
        check("scalars preserve the ideal", report.scalars_preserve, True, DERIVED),
        check(f"GL_2(F_{config.p}) preserves the ideal", report.gl2_fp_preserves, True, PAPER),
    ]


@subcommand("partial-2x3", "the 2x3 partial level ideal on mu_p^3")
def run_partial(config: RunConfig) -> List[CheckRecord]:
    from ext3 import partial_level_ideal

    result = partial_level_ideal(config.p, config.strategy)
    return [check(f"partial 2x3 rank, p={config.p}", result.rank, rank_two_count(2, 3, config.p), DERIVED)]


@subcommand("g3", "rank of the candidate level ideal on G^3")
def run_g3(config: RunConfig) -> List[CheckRecord]:
    from ext3 import g3_candidate_rank

    if config.p not in G3_KNOWN_RANKS:
        raise UsageError(f"g3 is defined for p in {sorted(G3_KNOWN_RANKS)}")
    if config.p == 3 and not config.heavy:
        raise UsageError("g3 --p 3 runs for hours; pass --heavy to confirm")
    result = g3_candidate_rank(config.p, config.dual)
    return [
        check(f"candidate rank, p={config.p}, dual={config.dual}", result.rank,
              G3_KNOWN_RANKS[config.p], PAPER),
        check("rank >= |GL_3(F_p)|", result.rank, f">= {result.gl3_order}", TRIVIAL,
              result.rank >= result.gl3_order),
    ]


@subcommand("km", "Katz-Mazur ideals: cyclotomic case and comparison with primitive points")
def run_km(config: RunConfig) -> List[CheckRecord]:
    from hopf import constant_group, multiplicative_group
    from km import km_ideal, km_vs_primitive

    p = config.p
    mu = km_ideal(multiplicative_group(p, QQ), 1, p)
    cyclotomic = Ideal(mu.ambient, [sum((mu.ambient.var("y_1") ** i for i in range(p)), mu.ambient.zero())])
    records = [check(f"KM ideal of mu_{p} over QQ is (Phi_{p})", mu.ideal == cyclotomic, True, PAPER)]
    z2 = km_ideal(constant_group(2, create_prime_field(2)), 1, 2)
    records.append(check("KM rank for Z/2 over F_2", z2.rank, 1, DERIVED))
    if p in (2, 3):
        rows = km_vs_primitive(p)
        expected = gl_order_formula(2, p)
        for row in rows:
            records.append(check(f"level rank on {row.fiber}", row.level_rank, expected, DERIVED))
            records.append(check(f"KM rank on {row.fiber}", row.km_rank, "recorded", DERIVED, True))
        records.append(check("KM deviates on some fiber", any(not r.km_matches for r in rows), True, PAPER))
    return records


@subcommand("kmd", "KM+D on Hom((Z/2)^2, alpha_2^2)")
def run_kmd(config: RunConfig) -> List[CheckRecord]:
    from km import kmd_rank_alpha2

    result = kmd_rank_alpha2()
    return [
        check("KM+D rank exceeds |GL_2(F_2)|", result.rank, f"> {result.expected}", PAPER,
              result.rank > result.expected),
        check("KM+D rank within the KM scheme", result.rank, f"<= {result.km_rank}", TRIVIAL,
              result.rank <= result.km_rank),
        check("KM+D rank within alpha_2^4", result.rank, "<= 16", TRIVIAL, result.rank <= 16),
    ]


@subcommand("gb", "reduced Gröbner basis of an ideal given on the command line")
def run_gb(config: RunConfig) -> List[CheckRecord]:
    from gro import GroebnerBasis
    from poly import PresentedRing

    if not config.vars or not config.gens:
        raise UsageError("gb needs --vars and --gens")
    coeffs = QQ if config.rational else create_prime_field(config.p)
    names = [v.strip() for v in config.vars.split(",") if v.strip()]
    relations = [r for r in (config.relations or "").split(";") if r.strip()]
    ring = PresentedRing(names, coeffs, config.order, relations=relations)
    ideal = Ideal(ring, [g for g in config.gens.split(";") if g.strip()])
    basis: GroebnerBasis = ideal.groebner()
    rng = random.Random(config.seed)
    combination = ring.zero()
    for g in ideal.generators:
        combination = combination + ring.random_element(rng) * g
    records = [
        check(f"reduced basis over {coeffs.name}", basis.to_text(), "computed", TRIVIAL, True),
        check("random combination of generators reduces to 0", ideal.contains(combination), True, TRIVIAL),
    ]
    if basis.is_zero_dimensional:
        other = "lex" if config.order == "degrevlex" else "degrevlex"
        alt_ring = PresentedRing(names, coeffs, other, relations=relations)
        alt = Ideal(alt_ring, [alt_ring.transfer(g) for g in ideal.generators])
        records.append(check(f"quotient dimension under {other}", alt.dimension(), basis.dimension(), TRIVIAL))
    return records


def run(name: str, config: RunConfig) -> VerificationReport:
    """
    Dispatch a subcommand under the configured budget and assemble its report.

    Errors raised by the computation become a failed check; budget and
    usage errors propagate.
    """
    if name not in SUBCOMMANDS:
        raise UsageError(f"unknown subcommand {name!r}")
    start = time.perf_counter()
    with budget_scope(Budget(**config.budget())):
        try:
            checks = SUBCOMMANDS[name](config)
        except (BudgetExceeded, UsageError):
            raise
        except (LevelforgeError, ValueError) as exc:
            logger.error(f"{name}: {exc}")
            checks = [check(name, f"{type(exc).__name__}: {exc}", "no error", TRIVIAL, False)]
    runtime = 0 if config.no_timings else int((time.perf_counter() - start) * 1000)
    return VerificationReport(
        subcommand=name, config=config.echo(), checks=checks, runtime_ms=runtime,
        passed=bool(checks) and all(c.passed for c in checks),
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="prime")
    common.add_argument("--q", type=int, help="field size for fibers (p or p^2)")
    common.add_argument("--n", type=int, help="p-adic precision N")
    common.add_argument("--k", type=int, help="fiber field degree, q = p^k (1 or 2)")
    common.add_argument("--l", type=int, help="level exponent for truncated structures")
    common.add_argument("--chart", help="fiber point 's,t'")
    common.add_argument("--order", choices=Config.SUPPORTED_ORDERS)
    common.add_argument("--flavor", choices=["multiplicative", "constant"])
    common.add_argument("--orientation", choices=["right", "left"])
    common.add_argument("--strategy", choices=["elimination", "linear"])
    common.add_argument("--no-dual", dest="dual", action="store_const", const=False)
    common.add_argument("--full-group", action="store_const", const=True)
    common.add_argument("--heavy", action="store_const", const=True)
    common.add_argument("--jobs", type=int)
    common.add_argument("--json", dest="output_format", action="store_const", const="json",
                        help="JSON report; add --no-timings for byte-identical output across runs")
    common.add_argument("--seed", type=int)
    common.add_argument("--no-timings", action="store_const", const=True)
    common.add_argument("--log-level")
    common.add_argument("--config", dest="config_file", help="key=value config file")
    common.add_argument("--output", help="also write the JSON report to this path")
    common.add_argument("--preset", choices=sorted(PRESETS), help="budget preset")
    common.add_argument("--vars")
    common.add_argument("--gens")
    common.add_argument("--relations")
    common.add_argument("--rational", action="store_const", const=True,
                        help="gb over QQ instead of F_p")

    parser = argparse.ArgumentParser(prog="levelforge", description="Verify full level structures on Oort–Tate groups")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_text in HELP.items():
        subparsers.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    values = vars(args)
    name = values.pop("subcommand")
    config_file = values.pop("config_file")
    output = values.pop("output")
    preset = values.pop("preset")
    try:
        config = create_run_config(values, config_file, preset)
    except ValidationError as exc:
        print(f"levelforge: invalid configuration: {exc}", file=sys.stderr)
        return 2
    set_log_level(config.log_level)
    try:
        report = run(name, config)
    except UsageError as exc:
        print(f"levelforge {name}: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"levelforge {name}: budget exceeded: {exc}", file=sys.stderr)
        return 2
    print(report.to_json() if config.output_format == "json" else report.to_text())
    if output:
        create_report_exporter().export_to_json(report.to_dict(), output)
    return 0 if report.passed else 1
