"""
Oort–Tate group schemes of rank p as concrete Hopf algebras.

A chart fixes a base ring with elements s, t (s·t = w_p) and presents the
group as base[x]/(x^p - t·x) with

    Δ(x) = x_1 + x_2 + Σ_{0<i<p} d_i · x_1^i · x_2^(p-i)

where d_i = s/((1-p)·w_i·w_{p-i}). Three kinds of chart are supported:

    char-p     base of characteristic p, w_i = i!, so d_i = s/(i!(p-i)!)
    p2-exact   p = 2 over QQ with w_1 = 1, w_2 = 2, so d_1 = -s
    solved     base Z/p^N with t = 1 and d_i = c_i solved from the
               Teichmüller identities (see ``solve_group_constants``)
"""

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from arith import (
    QQ,
    ArithmeticDomainError,
    ExtField,
    LevelforgeError,
    LinearSystemError,
    PadicInt,
    PadicRing,
    PrimeField,
    factorial_mod,
    solve_mod_prime_power,
    teichmuller,
    teichmuller_table,
)
from hopf import (
    GroupPoint,
    HopfAlgebra,
    PointConditionError,
    constant_group,
    hopf_create,
    is_hopf_morphism,
    point_scale,
)
from poly import Poly, PresentedRing, RingMap, copy_name, tensor_square
from utils import Logger

logger = Logger("ot")

WMODES = ("char-p", "p2-exact", "solved")


class InconsistentSystem(LevelforgeError):
    """Raised when the group-constant equations have no solution."""


class VerificationFailed(LevelforgeError):
    """Raised when a constructed map fails an algebraic check."""


def _element(ring: PresentedRing, value) -> Poly:
    """A constant of ``ring`` given by a field element encoding or integer."""
    if isinstance(value, Poly):
        return ring.coerce(value)
    if isinstance(ring.coeffs, ExtField):
        return ring.scalar(value % ring.coeffs.size)
    return ring.const(value)


@dataclass
class OTParams:
    """
    An Oort–Tate chart.

    ``dot_coeffs`` are the d_1, ..., d_{p-1} of the comultiplication as base
    elements; ``w`` holds w_1, ..., w_p when the chart fixes them.
    """

    p: int
    base: PresentedRing
    s: Optional[Poly]
    t: Poly
    wmode: str
    dot_coeffs: Tuple[Poly, ...]
    w: Optional[Tuple[object, ...]] = None
    N: Optional[int] = None
    label: str = ""
    point: Optional[Tuple[object, object]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.wmode not in WMODES:
            raise ArithmeticDomainError(f"unknown w-mode {self.wmode!r}")
        self.validate()

    @property
    def is_symbolic(self) -> bool:
        return bool(self.base.variables)

    @property
    def coeffs(self):
        return self.base.coeffs

    @property
    def characteristic(self) -> int:
        return self.base.coeffs.characteristic

    def validate(self) -> None:
        """Check s·t = w_p, w_i = i! mod p and (char 0) w_p = p·w_{p-1}."""
        p = self.p
        if self.w is None or self.s is None:
            return
        if len(self.w) != p:
            raise ArithmeticDomainError(f"expected {p} w-constants, got {len(self.w)}")
        coeffs = self.base.coeffs
        for i, w_i in enumerate(self.w, 1):
            if (int(w_i) - factorial_mod(i, p)) % p:
                raise ArithmeticDomainError(f"w_{i} = {w_i} is not {i}! mod {p}")
        w_p = _element(self.base, self.w[-1])
        if not self.base.equal(self.base.mul(self.s, self.t), w_p):
            raise ArithmeticDomainError(f"s*t != w_{p} in the base of chart {self.label}")
        if coeffs.characteristic == 0 and self.w[-1] != p * self.w[-2]:
            raise ArithmeticDomainError(f"w_{p} != {p}*w_{p - 1}")

    def chi(self, m: int):
        """Coefficient χ(m) used for scalar multiples [m]x = χ(m)·x."""
        m %= self.p
        if self.wmode == "solved":
            return teichmuller(m, self.p, self.N).value
        return m

    def describe(self) -> str:
        return self.label or f"OT(p={self.p})"


def _char_p_coeffs(p: int, base: PresentedRing, s: Poly) -> Tuple[Poly, ...]:
    return tuple(
        base.normal_form(s.times(pow(factorial_mod(i, p) * factorial_mod(p - i, p), -1, p)))
        for i in range(1, p)
    )


def char_p_chart(p: int, s=None, t=None, field: Optional[PrimeField] = None) -> OTParams:
    """
    Characteristic-p chart.

    With s and t omitted the base is F_p[s,t]/(st) with symbolic parameters;
    otherwise the base is a field (F_p by default) and s, t are elements of
    it with s·t = 0. Extension-field elements are given by their encodings.
    """
    if (s is None) != (t is None):
        raise ValueError("give both s and t or neither")
    if s is None:
        coeffs = field or PrimeField(p)
        base = PresentedRing(["s", "t"], coeffs, relations=["s*t"], params=["s", "t"],
                             name=f"{coeffs.name}[s,t]/(st)")
        s_el, t_el = base.var("s"), base.var("t")
        label = f"OT(p={p}; s,t symbolic)"
        point = None
    else:
        coeffs = field or PrimeField(p)
        if coeffs.characteristic != p:
            raise ArithmeticDomainError(f"field {coeffs.name} does not have characteristic {p}")
        base = PresentedRing([], coeffs, name=coeffs.name)
        s_el, t_el = _element(base, s), _element(base, t)
        label = f"OT(p={p}; s={coeffs.to_str(s)}, t={coeffs.to_str(t)} over {coeffs.name})"
        point = (s, t)
    w = tuple(factorial_mod(i, p) for i in range(1, p + 1))
    return OTParams(p, base, s_el, t_el, "char-p", _char_p_coeffs(p, base, s_el), w,
                    label=label, point=point)


def p2_exact_chart(s=None, t=None) -> OTParams:
    """p = 2 over QQ with w_1 = 1, w_2 = 2 (so s·t = 2 and d_1 = -s)."""
    if (s is None) != (t is None):
        raise ValueError("give both s and t or neither")
    if s is None:
        base = PresentedRing(["s", "t"], QQ, relations=["s*t - 2"], params=["s", "t"],
                             name="QQ[s,t]/(st-2)")
        s_el, t_el = base.var("s"), base.var("t")
        label = "OT(p=2 exact; s,t symbolic)"
    else:
        base = PresentedRing([], QQ, name="QQ")
        s_el, t_el = base.const(s), base.const(t)
        label = f"OT(p=2 exact; s={s}, t={t})"
    return OTParams(2, base, s_el, t_el, "p2-exact", (-s_el,), (1, 2), label=label,
                    point=None if s is None else (s, t))


def solved_chart(p: int, N: int) -> OTParams:
    """The (t = 1) chart over Z/p^N whose constants come from the Teichmüller identities."""
    constants = solve_group_constants(p, N)
    base = PresentedRing([], PadicRing(p, N), name=f"Z/{p}^{N}")
    coeffs = tuple(base.const(c.value) for c in constants.c)
    return OTParams(p, base, None, base.one(), "solved", coeffs, N=N,
                    label=f"OT(p={p}; solved mod {p}^{N})")


def cartier_dual_chart(params: OTParams) -> OTParams:
    """
    The chart of the Cartier dual: the roles of s and t are exchanged.

    For example the μ_p chart (1, 0) is dual to the constant chart (0, 1).
    """
    if params.wmode != "char-p":
        raise ArithmeticDomainError("Cartier duality is only wired for char-p charts")
    if params.is_symbolic:
        base = params.base
        s_el, t_el = base.var("t"), base.var("s")
        return OTParams(params.p, base, s_el, t_el, "char-p",
                        _char_p_coeffs(params.p, base, s_el), params.w,
                        label=f"dual of {params.describe()}")
    s, t = params.point
    return char_p_chart(params.p, t, s, params.base.coeffs)


def scaled_chart(params: OTParams, lam) -> OTParams:
    """The chart (λ^{p-1}·s, λ^{1-p}·t) of a field fiber."""
    if params.is_symbolic or params.wmode != "char-p":
        raise ArithmeticDomainError("scaling is defined here for char-p field fibers")
    coeffs = params.base.coeffs
    p = params.p
    s, t = params.point
    return char_p_chart(p, coeffs.mul(coeffs.pow(lam, p - 1), s),
                        coeffs.mul(coeffs.pow(lam, 1 - p), t), coeffs)


def ot_group(params: OTParams, verify: bool = True) -> HopfAlgebra:
    """
    The Hopf algebra base[x]/(x^p - t·x) of a chart.

    Raises:
        HopfAxiomError: the chart's constants do not give a coassociative law
    """
    p = params.p
    base = params.base
    variables = ["x"] + list(base.variables)
    scratch = PresentedRing(variables, base.coeffs, base.order, params=base.variables)
    x = scratch.var("x")
    relations = [x ** p - scratch.transfer(params.t) * x] + [scratch.transfer(b) for b in base.basis]
    ring = PresentedRing(variables, base.coeffs, base.order, relations=relations,
                         params=base.variables, name=f"O({params.describe()})")
    T2 = tensor_square(ring)
    x1, x2 = T2.var(copy_name("x", 1)), T2.var(copy_name("x", 2))
    delta = x1 + x2
    for i, d in enumerate(params.dot_coeffs, 1):
        delta = delta + T2.transfer(d) * x1 ** i * x2 ** (p - i)
    return hopf_create(ring, {"x": T2.normal_form(delta)}, {"x": 0},
                       name=params.describe(), verify=verify)


def check_point_condition(params: OTParams, f: Poly) -> None:
    """Raise PointConditionError unless f^p = t·f in f's ring."""
    R = f.ring
    t = R.coerce(params.t)
    if not R.normal_form(f ** params.p - t * f).is_zero():
        raise PointConditionError(f"{f} does not satisfy x^{params.p} = t*x")


def dotplus(params: OTParams, f: Poly, g: Poly, check: bool = True) -> Poly:
    """
    Closed-form group law f +̇ g = f + g + Σ d_i f^i g^(p-i).

    Both arguments must lie in the same ring, which contains the chart's
    base parameters by name (or none for a field chart).
    """
    R = f.ring
    if check:
        check_point_condition(params, f)
        check_point_condition(params, g)
    p = params.p
    total = f + g
    f_powers = [R.one()]
    g_powers = [R.one()]
    for _ in range(p):
        f_powers.append(R.normal_form(f_powers[-1] * f))
        g_powers.append(R.normal_form(g_powers[-1] * g))
    for i, d in enumerate(params.dot_coeffs, 1):
        total = total + R.coerce(d) * R.normal_form(f_powers[i] * g_powers[p - i])
    return R.normal_form(total)


def scalar_multiple(params: OTParams, m: int, f: Poly) -> Poly:
    """[m]f = χ(m)·f for a point f of the group (χ(m) = m in char p)."""
    return f.ring.normal_form(f.scale(params.chi(m)))


def dot_combination(params: OTParams, ring: PresentedRing,
                    terms: Sequence[Tuple[int, Poly]]) -> Poly:
    """The point +̇_k [m_k] f_k; zero multiples are skipped."""
    result: Optional[Poly] = None
    for m, f in terms:
        if m % params.p == 0:
            continue
        scaled = scalar_multiple(params, m, f)
        result = scaled if result is None else dotplus(params, result, scaled, check=False)
    return result if result is not None else ring.zero()


def universal_ring(params: OTParams, names: Sequence[str], order=None) -> PresentedRing:
    """base[names]/(v^p - t·v for each name): the ring of |names| points of the group."""
    base = params.base
    variables = list(names) + list(base.variables)
    scratch = PresentedRing(variables, base.coeffs, order or base.order, params=base.variables)
    t = scratch.transfer(params.t)
    relations = [scratch.var(v) ** params.p - t * scratch.var(v) for v in names]
    relations += [scratch.transfer(b) for b in base.basis]
    return PresentedRing(variables, base.coeffs, order or base.order, relations=relations,
                         params=base.variables)


class UniversalHom(NamedTuple):
    """Universal homomorphism (Z/p)^2 → G^2: its ring and the matrix ((a, b), (c, d))."""

    ring: PresentedRing
    matrix: Tuple[Tuple[Poly, Poly], Tuple[Poly, Poly]]
    chart: OTParams


def universal_hom_ring(p: int, chart: OTParams, order=None) -> UniversalHom:
    """
    The ring representing Hom((Z/p)^2, G^2) = G^4.

    Rows of the matrix are the images of (1,0) and (0,1): (1,0) ↦ (a, b),
    (0,1) ↦ (c, d).
    """
    if chart.p != p:
        raise ArithmeticDomainError(f"chart is for p={chart.p}, not {p}")
    ring = universal_ring(chart, ["a", "b", "c", "d"], order)
    a, b, c, d = (ring.var(v) for v in "abcd")
    return UniversalHom(ring, ((a, b), (c, d)), chart)


def verify_scalar_identity(p: int, chart: OTParams, m: int) -> bool:
    """[m]a computed through the comultiplication equals χ(m)·a for the universal point a."""
    G = ot_group(chart)
    U = universal_hom_ring(p, chart)
    a = U.matrix[0][0]
    P = GroupPoint(G, U.ring, {"x": a})
    return point_scale(m, P).coords["x"] == scalar_multiple(chart, m, a)


@dataclass(frozen=True)
class GroupConstants:
    """c_1, ..., c_{p-1} with χ(j+k) = χ(j) + χ(k) + Σ c_i χ(j)^i χ(k)^(p-i) mod p^N."""

    p: int
    N: int
    c: Tuple[PadicInt, ...]

    def as_ints(self) -> List[int]:
        return [x.value for x in self.c]


def group_constant_equations(p: int, N: int) -> Tuple[List[List[int]], List[int]]:
    """One equation per pair (j, k) of residues; unknowns c_1..c_{p-1}."""
    chi = {j: v.value for j, v in teichmuller_table(p, N).items()}
    modulus = p ** N
    rows, rhs = [], []
    for j in range(p):
        for k in range(p):
            rows.append([pow(chi[j], i, modulus) * pow(chi[k], p - i, modulus) % modulus
                         for i in range(1, p)])
            rhs.append((chi[(j + k) % p] - chi[j] - chi[k]) % modulus)
    return rows, rhs


def solve_group_constants(p: int, N: int) -> GroupConstants:
    """
    Solve the Teichmüller addition identities for c_1..c_{p-1} over Z/p^N.

    Checks the symmetry c_i = c_{p-i} and the congruence
    c_i = -p/(i!(p-i)!) mod p^2 (so c_i = 0 mod p).

    Raises:
        InconsistentSystem: no solution, or a check fails
    """
    if N < 1 or N > 6:
        raise ArithmeticDomainError(f"precision N must be in 1..6, got {N}")
    rows, rhs = group_constant_equations(p, N)
    try:
        values = solve_mod_prime_power(rows, rhs, p, N)
    except LinearSystemError as exc:
        raise InconsistentSystem(f"group constants for p={p}, N={N}: {exc}") from exc
    c = tuple(PadicInt(p, N, v) for v in values)
    for i in range(1, p):
        if c[i - 1] != c[p - i - 1]:
            raise InconsistentSystem(f"c_{i} != c_{p - i} for p={p}, N={N}")
        if c[i - 1].value % p:
            raise InconsistentSystem(f"c_{i} = {c[i - 1]} is not divisible by {p}")
        if N >= 2:
            expected = -pow(factorial_mod(i, p) * factorial_mod(p - i, p), -1, p) % p
            if (c[i - 1].value // p) % p != expected:
                raise InconsistentSystem(
                    f"c_{i}/{p} = {(c[i - 1].value // p) % p} mod {p}, expected {expected}"
                )
    logger.debug(f"group constants p={p} N={N}: {[x.value for x in c]}")
    return GroupConstants(p, N, c)


@dataclass
class ConstantIsomorphism:
    """The isomorphism between the solved chart group and the constant group Z/p."""

    forward: RingMap
    inverse: RingMap
    constants: GroupConstants
    verified: bool


def constant_isomorphism_lambda(i: int, p: int, N: int) -> int:
    """λ(0) = -1 and λ(i) = 1/(p-1): inverse of Π_{j≠i}(χ(i) - χ(j))."""
    modulus = p ** N
    if i == 0:
        return -1 % modulus
    return pow(p - 1, -1, modulus)


def constant_iso(p: int, N: int) -> ConstantIsomorphism:
    """
    Identify Z/p^N[x]/(x^p - x) with the functions on Z/p.

    forward:  x ↦ Σ χ(i)·e_i
    inverse:  e_i ↦ λ(i)·Π_{j≠i}(x - χ(j))

    Both maps are checked to be well defined, mutually inverse on generators,
    and compatible with comultiplication and counit.

    Raises:
        VerificationFailed: naming the generator where a check fails
    """
    chart = solved_chart(p, N)
    G = ot_group(chart)
    H = constant_group(p, PadicRing(p, N))
    chi = {j: v.value for j, v in teichmuller_table(p, N).items()}
    R, F = G.ring, H.ring
    image = F.zero()
    for i in range(1, p):
        image = image + F.var(f"e{i}").scale(chi[i])
    try:
        forward = RingMap(R, F, {"x": image})
        x = R.var("x")
        inverse_images = {}
        for i in range(1, p):
            prod = R.one()
            for j in range(p):
                if j != i:
                    prod = R.normal_form(prod * (x - R.const(chi[j])))
            inverse_images[f"e{i}"] = prod.times(constant_isomorphism_lambda(i, p, N))
        inverse = RingMap(F, R, inverse_images)
    except LevelforgeError as exc:
        raise VerificationFailed(f"constant isomorphism p={p}, N={N}: {exc}") from exc
    if inverse(forward(x)) != x:
        raise VerificationFailed("inverse(forward(x)) != x")
    for v in H.fiber_vars:
        if forward(inverse.images[v]) != F.var(v):
            raise VerificationFailed(f"forward(inverse({v})) != {v}")
    if not is_hopf_morphism(G, H, forward):
        raise VerificationFailed("forward map does not intertwine comultiplications on x")
    if not is_hopf_morphism(H, G, inverse):
        raise VerificationFailed("inverse map does not intertwine comultiplications")
    return ConstantIsomorphism(forward, inverse, chart_constants(chart), True)


def chart_constants(chart: OTParams) -> GroupConstants:
    return GroupConstants(chart.p, chart.N, tuple(
        PadicInt(chart.p, chart.N, d.constant_term()) for d in chart.dot_coeffs
    ))


def scaling_isomorphism(params: OTParams, lam) -> Tuple[OTParams, RingMap]:
    """
    The isomorphism between the groups of (s, t) and (λ^{p-1}s, λ^{1-p}t).

    Returns the scaled chart and the co-map x' ↦ λ^{-1}·x from the scaled
    group's ring to the original group's ring, after checking that it is a
    Hopf-algebra map.

    Raises:
        VerificationFailed: the map fails to intertwine the structure maps
    """
    scaled = scaled_chart(params, lam)
    G = ot_group(params)
    G_scaled = ot_group(scaled)
    coeffs = params.base.coeffs
    x = G.ring.var("x")
    inv = coeffs.inv(lam)
    phi = RingMap(G_scaled.ring, G.ring, {"x": G.ring.from_terms({m: coeffs.mul(c, inv) for m, c in x.terms.items()})})
    if not is_hopf_morphism(G_scaled, G, phi):
        raise VerificationFailed(f"scaling by {coeffs.to_str(lam)} is not a Hopf map")
    return scaled, phi


def field_fiber_points(p: int, field) -> List[Tuple[int, int]]:
    """All (s, t) in field^2 with s·t = 0, sorted by encoding."""
    return sorted(
        (s, t) for s in field.elements() for t in field.elements()
        if field.mul(s, t) == 0
    )


def chi_table(p: int, N: int) -> Dict[int, int]:
    return {j: v.value for j, v in teichmuller_table(p, N).items()}
