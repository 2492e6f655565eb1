"""
Full level structures on G × G for an Oort–Tate group G.

A homomorphism h: (Z/p)^2 → G^2 is recorded by its point matrix
((a, b), (c, d)) in the universal ring. It is a full level structure when
every nonzero F_p-combination of the rows and of the columns is a primitive
point of G^2; the primitive ideal of G^2 is ((x_1^(p-1) - t)(x_2^(p-1) - t)).
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from arith import (
    ExtField,
    PrimeField,
    factorial_mod,
    general_linear_group,
    gl_order,
    gl_order_formula,
    primitive_root,
)
from gro import (
    Budget,
    Ideal,
    budget_scope,
    default_budget,
    divide_exact,
    ideal_contains_ideal,
    ideal_equal,
)
from hopf import GroupPoint, HopfAlgebra, hopf_power, point_add, point_scale, primitive_ideal
from ot import (
    OTParams,
    char_p_chart,
    dot_combination,
    field_fiber_points,
    p2_exact_chart,
    universal_hom_ring,
    universal_ring,
)
from poly import Poly, PresentedRing, RingMap, copy_name
from utils import Logger

logger = Logger("level")

Matrix = Tuple[Tuple[Poly, Poly], Tuple[Poly, Poly]]
IntMatrix = Tuple[Tuple[int, int], Tuple[int, int]]


def nonzero_vectors(p: int, length: int = 2) -> List[Tuple[int, ...]]:
    """F_p^length minus the origin, in lexicographic order."""
    out = [()]
    for _ in range(length):
        out = [v + (x,) for v in out for x in range(p)]
    return [v for v in out if any(v)]


def combine(chart: OTParams, ring: PresentedRing, coeffs: Sequence[int],
            points: Sequence[Poly], additive: bool = False) -> Poly:
    """
    The point Σ χ(m_k)·f_k, added with the chart's dot-plus.

    With ``additive`` set the plain ring sum is used instead.
    """
    if additive:
        total = ring.zero()
        for m, f in zip(coeffs, points):
            total = total + f.scale(chart.chi(m))
        return ring.normal_form(total)
    return dot_combination(chart, ring, list(zip(coeffs, points)))


def primitivity(chart: OTParams, f: Poly) -> Poly:
    """f^(p-1) - t: vanishes exactly on the primitive points."""
    R = f.ring
    return R.normal_form(R.pow(f, chart.p - 1) - R.coerce(chart.t))


@dataclass
class LevelIdeal:
    """The level ideal in the universal ring, with labelled generators."""

    ambient: PresentedRing
    chart: OTParams
    matrix: Matrix
    generators: List[Poly]
    labels: List[str]
    additive: bool = False
    ideal: Ideal = field(init=False, repr=False)

    def __post_init__(self):
        self.ideal = Ideal(self.ambient, self.generators)

    @property
    def rank(self) -> int:
        """Dimension of the quotient of the universal ring."""
        return self.ideal.dimension()

    def contains(self, f: Poly) -> bool:
        return self.ideal.contains(f)


def level_generators(chart: OTParams, ring: PresentedRing, matrix: Matrix,
                     additive: bool = False) -> Tuple[List[Poly], List[str]]:
    """
    The 2(p^2 - 1) generators for a 2×2 point matrix.

    For (m, n) ≠ 0 the row generator is
    ((m·a +̇ n·b)^(p-1) - t)((m·c +̇ n·d)^(p-1) - t) and the column generator
    ((m·a +̇ n·c)^(p-1) - t)((m·b +̇ n·d)^(p-1) - t).
    """
    (a, b), (c, d) = matrix
    gens, labels = [], []
    for m, n in nonzero_vectors(chart.p):
        row = ring.mul(
            primitivity(chart, combine(chart, ring, (m, n), (a, b), additive)),
            primitivity(chart, combine(chart, ring, (m, n), (c, d), additive)),
        )
        col = ring.mul(
            primitivity(chart, combine(chart, ring, (m, n), (a, c), additive)),
            primitivity(chart, combine(chart, ring, (m, n), (b, d), additive)),
        )
        gens += [row, col]
        labels += [f"row({m},{n})", f"col({m},{n})"]
    return gens, labels


def full_level_ideal(p: int, chart: Optional[OTParams] = None,
                     additive: bool = False, order=None) -> LevelIdeal:
    """
    The full level ideal of a chart (the symbolic char-p chart by default).

    ``additive`` replaces dot-plus by the ring sum, which gives the
    s-free presentation of the same ideal.
    """
    chart = chart or char_p_chart(p)
    U = universal_hom_ring(p, chart, order)
    gens, labels = level_generators(chart, U.ring, U.matrix, additive)
    logger.debug(f"level ideal for {chart.describe()}: {len(gens)} generators")
    return LevelIdeal(U.ring, chart, U.matrix, gens, labels, additive)


def fiber_rank(p: int, point: Tuple[object, object], field=None) -> int:
    """
    Quotient dimension of the level ideal at a fiber (s, t) with s·t = 0.

    Raises:
        NotZeroDimensional: the fiber quotient is infinite (a construction bug)
    """
    s, t = point
    return full_level_ideal(p, char_p_chart(p, s, t, field)).rank


@dataclass
class FiberRank:
    """Rank of one fiber."""

    s: str
    t: str
    rank: int
    runtime_ms: int = 0

    @property
    def point(self) -> str:
        return f"({self.s},{self.t})"


@dataclass
class FlatnessReport:
    """Fiber ranks over all F_q-points of {st = 0}, against |GL_2(F_p)|."""

    p: int
    q: int
    expected: int
    fibers: List[FiberRank]
    spot_checks: List[FiberRank] = field(default_factory=list)
    runtime_ms: int = 0

    @property
    def verdict(self) -> bool:
        return all(f.rank == self.expected for f in self.fibers + self.spot_checks)


def _flatness_field(p: int, q: int):
    if q == p:
        return PrimeField(p)
    if q == p * p:
        return ExtField(p, 2)
    raise ValueError(f"q must be p or p^2, got {q}")


def _fiber_worker(p: int, q: int, s: int, t: int, budget: Tuple[int, int, float]) -> Tuple[int, int, int, int]:
    """Worker entry point; arguments are plain values so it can run in a subprocess."""
    start = time.perf_counter()
    field_ = _flatness_field(p, q)
    with budget_scope(Budget(*budget)):
        rank = fiber_rank(p, (s, t), field_)
    return s, t, rank, int((time.perf_counter() - start) * 1000)


def verify_flatness(p: int, q: Optional[int] = None, jobs: int = 1) -> FlatnessReport:
    """
    Compute the level-ideal rank at every F_q-point of {st = 0}.

    For p = 2 one characteristic-0 fiber, (s, t) = (1, 2) over QQ, is added.
    Fibers run in a process pool when ``jobs`` > 1; the report is sorted by
    fiber point whatever the completion order.
    """
    q = q or p
    field_ = _flatness_field(p, q)
    expected = gl_order_formula(2, p)
    points = field_fiber_points(p, field_)
    budget = default_budget()
    budget_args = (budget.max_pairs, budget.max_degree, budget.max_seconds)
    start = time.perf_counter()
    logger.info(f"flatness p={p} q={q}: {len(points)} fibers, jobs={jobs}")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_fiber_worker, p, q, s, t, budget_args) for s, t in points]
            results = [f.result() for f in futures]
    else:
        results = [_fiber_worker(p, q, s, t, budget_args) for s, t in points]
    fibers = [
        FiberRank(field_.to_str(s), field_.to_str(t), rank, ms)
        for s, t, rank, ms in sorted(results)
    ]
    spot_checks = []
    if p == 2:
        spot_start = time.perf_counter()
        rank = full_level_ideal(2, p2_exact_chart(1, 2)).rank
        spot_checks.append(FiberRank("1", "2", rank, int((time.perf_counter() - spot_start) * 1000)))
    for f in fibers + spot_checks:
        logger.info(f"fiber {f.point}: rank {f.rank}")
    return FlatnessReport(p, q, expected, fibers, spot_checks,
                          int((time.perf_counter() - start) * 1000))


# GL_2 actions

def gl2_generators(p: int) -> List[IntMatrix]:
    """Upper and lower transvections and diag(r, 1) for a primitive root r."""
    gens = [((1, 1), (0, 1)), ((1, 0), (1, 1))]
    r = primitive_root(p)
    if r != 1:
        gens.append(((r, 0), (0, 1)))
    return gens


def precompose_map(level: LevelIdeal, g: IntMatrix) -> RingMap:
    """
    The substitution h ↦ h∘g on the universal ring.

    Row i of the point matrix is h(e_i), so h∘g sends e_j to
    Σ_i g_ij·h(e_i), combined with dot-plus.
    """
    chart, R = level.chart, level.ambient
    (a, b), (c, d) = level.matrix
    (g11, g12), (g21, g22) = g
    images = {
        "a": combine(chart, R, (g11, g21), (a, c), level.additive),
        "b": combine(chart, R, (g11, g21), (b, d), level.additive),
        "c": combine(chart, R, (g12, g22), (a, c), level.additive),
        "d": combine(chart, R, (g12, g22), (b, d), level.additive),
    }
    return RingMap(R, R, images)


def maps_ideal_into_itself(level: LevelIdeal, phi: RingMap) -> bool:
    image = Ideal(level.ambient, [phi(g) for g in level.generators])
    return ideal_contains_ideal(level.ideal, image)


def gl2_precompose_invariance(p: int, chart: Optional[OTParams] = None,
                              full_group: bool = False,
                              matrices: Optional[Sequence[IntMatrix]] = None) -> bool:
    """
    True iff precomposition by GL_2(F_p) maps the level ideal into itself.

    Checks the group generators by default, every element of GL_2(F_p) with
    ``full_group``, or the given ``matrices``. For a finite group, mapping
    into itself is the same as preserving.
    """
    level = full_level_ideal(p, chart)
    if matrices is None:
        matrices = general_linear_group(2, p) if full_group else gl2_generators(p)
    for g in matrices:
        if not maps_ideal_into_itself(level, precompose_map(level, g)):
            logger.info(f"level ideal not invariant under precomposition by {g}")
            return False
    return True


# Unit factorization and s-independence

def dotplus_defect(p: int) -> Poly:
    """g(x, y) = Σ_{0<i<p} x^i y^(p-i) / (i!(p-i)!) over F_p."""
    R = PresentedRing(["x", "y"], PrimeField(p))
    x, y = R.var("x"), R.var("y")
    g = R.zero()
    for i in range(1, p):
        g = g + (x ** i * y ** (p - i)).times(
            pow(factorial_mod(i, p) * factorial_mod(p - i, p), -1, p)
        )
    return g


@dataclass
class UnitIdentity:
    """The identities for one (m, n): ma +̇ nb = (ma + nb)·u, u^p = 1, and the primitivity relation."""

    m: int
    n: int
    factorization: bool
    unit_power: bool
    primitivity: bool

    @property
    def passed(self) -> bool:
        return self.factorization and self.unit_power and self.primitivity


def unit_factorization_details(p: int) -> List[UnitIdentity]:
    """
    Check ma +̇ nb = (ma + nb)·u with u = 1 + s·g'(ma, nb) for every (m, n) ≠ 0.

    g' is g(x, y)/(x + y); for p = 2 the unit is 1 + s·m·a.

    Raises:
        DivisionFailed: x + y does not divide g
    """
    chart = char_p_chart(p)
    R = universal_ring(chart, ["a", "b"])
    a, b, s, t = (R.var(v) for v in ("a", "b", "s", "t"))
    if p == 2:
        quotient = None
    else:
        g = dotplus_defect(p)
        quotient = divide_exact(g, g.ring.var("x") + g.ring.var("y"))
    results = []
    for m, n in nonzero_vectors(p):
        ma, nb = a.times(m), b.times(n)
        if quotient is None:
            u = R.normal_form(R.one() + s * ma)
        else:
            sub = RingMap(quotient.ring, R, {"x": ma, "y": nb}, check=False)
            u = R.normal_form(R.one() + s * sub(quotient))
        plain = R.normal_form(ma + nb)
        dotted = combine(chart, R, (m, n), (a, b))
        factorization = dotted == R.mul(plain, u)
        unit_power = R.pow(u, p) == R.one()
        lhs = R.normal_form(R.pow(dotted, p - 1) - t)
        rhs = R.mul(R.pow(u, p - 1), R.pow(plain, p - 1) - t)
        results.append(UnitIdentity(m, n, factorization, unit_power, lhs == rhs))
    return results


def unit_factorization_check(p: int) -> bool:
    return all(r.passed for r in unit_factorization_details(p))


def s_independence_check(p: int, chart: Optional[OTParams] = None) -> bool:
    """True iff the dot-plus level ideal equals the plain-sum one."""
    chart = chart or char_p_chart(p)
    dotted = full_level_ideal(p, chart)
    plain = full_level_ideal(p, chart, additive=True)
    return ideal_equal(dotted.ideal, plain.ideal)


def base_change_check(p: int, points: Optional[Sequence[Tuple[int, int]]] = None) -> Dict[Tuple[int, int], bool]:
    """
    Specializing the symbolic level ideal at (s, t) gives the fiber's own level ideal.

    Returns the verdict per F_p-point of {st = 0}.
    """
    symbolic = full_level_ideal(p)
    field_ = PrimeField(p)
    out = {}
    for s, t in points or field_fiber_points(p, field_):
        special_ring, quotient = symbolic.ambient.specialize({"s": s, "t": t})
        direct = full_level_ideal(p, char_p_chart(p, s, t, field_))
        moved = Ideal(direct.ambient, [direct.ambient.coerce(quotient(g)) for g in symbolic.generators])
        out[(s, t)] = special_ring == direct.ambient and ideal_equal(moved, direct.ideal)
    return out


# Étale fibers

@dataclass
class EtaleFiber:
    s: str
    t: str
    rank: int
    rational_points: int
    field_equations: bool

    @property
    def reduced(self) -> bool:
        """
        The fiber is reduced and split.

        Containing x^q - x for every coordinate makes the quotient a quotient
        of the ring of F_q-valued functions, hence reduced with only rational
        points; the rank then has to match the point count.
        """
        return self.field_equations and self.rank == self.rational_points


def group_points_over_field(chart: OTParams) -> List[object]:
    """Field elements x with x^p = t·x."""
    coeffs = chart.base.coeffs
    t = chart.t.constant_term()
    return [x for x in coeffs.elements()
            if coeffs.pow(x, chart.p) == coeffs.mul(t, x)]


def count_rational_points(level: LevelIdeal) -> int:
    """Number of F_q-valued matrices on which every generator vanishes."""
    coeffs = level.chart.base.coeffs
    base = level.chart.base
    pts = group_points_over_field(level.chart)
    count = 0
    for a in pts:
        for b in pts:
            for c in pts:
                for d in pts:
                    values = {v: base.scalar(x) for v, x in zip("abcd", (a, b, c, d))}
                    ev = RingMap(level.ambient, base, values, check=False)
                    if all(ev(g).is_zero() for g in level.generators):
                        count += 1
    logger.debug(f"{count} rational points over {coeffs.name}")
    return count


def contains_field_equations(level: LevelIdeal) -> bool:
    """True when x^q - x lies in the level ideal for every matrix entry x."""
    R = level.ambient
    q = level.chart.base.coeffs.size
    return all(level.ideal.contains(R.var(v) ** q - R.var(v)) for v in "abcd")


def etale_fibers(p: int, q: int) -> List[Tuple[int, int]]:
    """Fibers (0, t) with t = λ^(1-p), so that x^(p-1) = t splits over F_q."""
    field_ = _flatness_field(p, q)
    ts = sorted({field_.pow(lam, 1 - p) for lam in field_.units()})
    return [(0, t) for t in ts]


def etale_fiber_check(p: int, q: Optional[int] = None) -> List[EtaleFiber]:
    """Rank, rational point count and field equations at each split étale fiber."""
    q = q or p
    field_ = _flatness_field(p, q)
    out = []
    for s, t in etale_fibers(p, q):
        level = full_level_ideal(p, char_p_chart(p, s, t, field_))
        out.append(EtaleFiber(
            field_.to_str(s), field_.to_str(t), level.rank,
            count_rational_points(level), contains_field_equations(level),
        ))
    return out


# Generic construction from a Hopf algebra

def hopf_level_ideal(H: HopfAlgebra, p: int, strategy: str = "elimination") -> Tuple[PresentedRing, Ideal]:
    """
    The level ideal of Hom((Z/p)^2, H^2) built from the primitive ideal of H^2.

    The universal ring is O(H^4) with copies 1..4 playing a, b, c, d. For each
    nonzero (m, n) the points (m·a + n·b, m·c + n·d) and (m·a + n·c,
    m·b + n·d) of H^2, formed with the group law of H, must be primitive.
    """
    G2 = hopf_power(H, 2)
    P = primitive_ideal(G2, strategy)
    U = hopf_power(H, 4).ring
    a, b, c, d = (
        GroupPoint(H, U, {v: U.var(copy_name(v, i)) for v in H.fiber_vars}, check=False)
        for i in range(1, 5)
    )

    def lin(m: int, n: int, P1: GroupPoint, P2: GroupPoint) -> GroupPoint:
        return point_add(point_scale(m, P1), point_scale(n, P2))

    gens = []
    for m, n in nonzero_vectors(p):
        for first, second in ((lin(m, n, a, b), lin(m, n, c, d)),
                              (lin(m, n, a, c), lin(m, n, b, d))):
            images = {}
            for v in H.fiber_vars:
                images[copy_name(v, 1)] = first.coords[v]
                images[copy_name(v, 2)] = second.coords[v]
            pull = RingMap(G2.ring, U, images, check=False)
            gens.extend(pull(g) for g in P.generators)
    return U, Ideal(U, gens)


def expected_rank(p: int, l: int = 1) -> int:
    """|GL_2(Z/p^l)| by enumeration."""
    return gl_order(2, p ** l)
