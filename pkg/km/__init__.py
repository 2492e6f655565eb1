"""
Katz–Mazur level conditions through the norm identity.

A homomorphism h: (Z/p)^g → H is a ×-homomorphism when its points form a
full set of sections: for a generic element f = Σ u_j e_j of O_H,

    Π_x f(h(x)) = N(f)

where N is the norm of O_H over the base. Comparing coefficients of the
u-monomials turns this into finitely many equations on the universal ring.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from arith import LevelforgeError, PrimeField, gl_order_formula, is_prime
from gro import Ideal, divide_exact
from hopf import (
    GroupPoint,
    HopfAlgebra,
    additive_group,
    hopf_power,
    hopf_product,
    multiplicative_group,
    point_add,
    point_scale,
)
from level import full_level_ideal
from ot import char_p_chart, ot_group
from poly import Monomial, Poly, PresentedRing, RingMap, copy_name
from utils import Logger

logger = Logger("km")


class RankMismatch(LevelforgeError):
    """Raised when the source group order differs from the rank of O_H."""


def determinant(matrix: List[List[Poly]]) -> Poly:
    """Fraction-free (Bareiss) determinant over a free polynomial ring."""
    n = len(matrix)
    if n == 0:
        raise ValueError("determinant of an empty matrix")
    R = matrix[0][0].ring
    a = [list(row) for row in matrix]
    sign = 1
    previous = R.one()
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return R.zero()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = divide_exact(a[i][j] * a[k][k] - a[i][k] * a[k][j], previous)
        previous = a[k][k]
    result = a[n - 1][n - 1]
    return result if sign == 1 else -result


@dataclass
class NormForm:
    """
    The norm of the generic element Σ u_j e_j of a finite free algebra.

    ``basis`` are the standard monomials e_j of ``host``; the norm lives in
    the free ring ``coeff_ring`` = k[u_1, ..., u_n].
    """

    host: PresentedRing
    basis: Tuple[Monomial, ...]
    coeff_ring: PresentedRing
    norm: Poly

    @property
    def rank(self) -> int:
        return len(self.basis)

    def evaluate(self, values: Sequence) -> object:
        """N(Σ values_j e_j) as a coefficient."""
        sub = RingMap(self.coeff_ring, PresentedRing([], self.host.coeffs),
                      dict(zip(self.coeff_ring.variables, values)), check=False)
        return sub(self.norm).constant_term()


def norm_form(host: PresentedRing) -> NormForm:
    """
    Determinant of multiplication by f = Σ u_j e_j on the standard-monomial basis.

    Raises:
        NotZeroDimensional: ``host`` is not finite over its coefficients
    """
    basis = host.standard_monomials()
    names = [f"u{j}" for j in range(len(basis))]
    U = PresentedRing(names, host.coeffs)
    # matrix[i][k] = coefficient of e_k in e_i * f
    matrix = [[U.zero() for _ in basis] for _ in basis]
    for j, ej in enumerate(basis):
        uj = U.var(names[j])
        for i, ei in enumerate(basis):
            coords = host.coordinates(host.monomial(ei) * host.monomial(ej))
            for k, c in enumerate(coords):
                if c != 0:
                    matrix[i][k] = matrix[i][k] + uj.scale(c)
    return NormForm(host, basis, U, determinant(matrix))


def source_points(p: int, g: int) -> List[Tuple[int, ...]]:
    return list(itertools.product(range(p), repeat=g))


@dataclass
class KMIdeal:
    """The ×-homomorphism ideal on Hom((Z/p)^g, H)."""

    ambient: PresentedRing
    host: HopfAlgebra
    p: int
    g: int
    norm: NormForm
    generators: List[Poly]
    degree: int
    ideal: Ideal = field(init=False, repr=False)

    def __post_init__(self):
        self.ideal = Ideal(self.ambient, self.generators)

    @property
    def rank(self) -> int:
        return self.ideal.dimension()


def _infer_prime(n: int, g: int) -> int:
    for p in range(2, n + 1):
        if not is_prime(p):
            continue
        if p ** g == n:
            return p
        if p ** g > n:
            break
    raise RankMismatch(f"rank {n} is not a {g}-th power of a prime")


def km_ideal(H: HopfAlgebra, g: int, p: Optional[int] = None,
             points: Optional[Sequence[GroupPoint]] = None) -> KMIdeal:
    """
    Coefficients of Π_x f(h(x)) - N(f) for the universal h: (Z/p)^g → H.

    The universal ring is O(H^g); generator k of the source maps to copy k.
    Points h(x) for x ∈ (Z/p)^g are formed with H's group law.

    Raises:
        RankMismatch: p^g differs from the rank of O_H
    """
    host = H.ring
    n = host.dimension
    p = p or _infer_prime(n, g)
    if p ** g != n:
        raise RankMismatch(f"|(Z/{p})^{g}| = {p ** g} but O_H has rank {n}")
    nf = norm_form(host)
    if points is None:
        U = hopf_power(H, g).ring
        points = [
            GroupPoint(H, U, {v: U.var(copy_name(v, k)) for v in H.fiber_vars}, check=False)
            for k in range(1, g + 1)
        ]
    U = points[0].target
    W = PresentedRing(list(U.variables) + list(nf.coeff_ring.variables), U.coeffs, U.order,
                      relations=list(U.basis), params=U.params)
    f_generic = [W.var(u) for u in nf.coeff_ring.variables]
    product = W.one()
    for x in source_points(p, g):
        point = H.identity(U)
        for k, xk in enumerate(x):
            if xk:
                point = point_add(point, point_scale(xk, points[k]))
        value = W.zero()
        for u, e in zip(f_generic, nf.basis):
            value = value + u * W.transfer(point.map(host.monomial(e)))
        product = W.normal_form(product * value)
    difference = W.normal_form(product - W.transfer(nf.norm))
    generators = _u_coefficients(difference, nf.coeff_ring.variables, U, n)
    logger.debug(f"KM ideal for {H.name}, g={g}: {len(generators)} coefficient equations")
    return KMIdeal(U, H, p, g, nf, generators, n)


def alpha2_square() -> HopfAlgebra:
    alpha = additive_group(2, PrimeField(2))
    return hopf_product(alpha, alpha)


def mu2_square() -> HopfAlgebra:
    mu = multiplicative_group(2, PrimeField(2))
    return hopf_product(mu, mu)


def expand_determinant(matrix: List[List[Poly]], ring: PresentedRing) -> Poly:
    """Permutation expansion of a determinant, reduced in ``ring`` (which may have nilpotents)."""
    n = len(matrix)
    if n == 0:
        raise ValueError("determinant of an empty matrix")
    total = ring.zero()
    for perm in itertools.permutations(range(n)):
        term = ring.one()
        for i, j in enumerate(perm):
            term = ring.normal_form(term * matrix[i][j])
            if term.is_zero():
                break
        if term.is_zero():
            continue
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        total = total - term if inversions % 2 else total + term
    return ring.normal_form(total)


def hom_ring(ambient: PresentedRing, source: HopfAlgebra) -> PresentedRing:
    """ambient ⊗ O(source): functions on the source over the universal ring."""
    return PresentedRing(list(ambient.variables) + list(source.ring.variables), ambient.coeffs,
                         ambient.order, relations=list(ambient.basis) + list(source.ring.basis))


def divisor_identity(ambient: PresentedRing, source: HopfAlgebra, target: HopfAlgebra,
                     images: Dict[str, Poly]) -> List[Poly]:
    """
    Coefficients of N_source(φ*f) - N_target(f) for a generic f on the target.

    φ*: O(target) → ambient ⊗ O(source) sends each target coordinate to
    ``images[v]``. The identity says that the source, pushed forward along
    φ as a relative divisor, is all of the target; for a constant source it
    is the product formula behind ``km_ideal``.

    Raises:
        RankMismatch: source and target have different ranks
    """
    if source.ring.dimension != target.ring.dimension:
        raise RankMismatch(
            f"{source.name} has rank {source.ring.dimension} but {target.name} has {target.ring.dimension}"
        )
    nf = norm_form(target.ring)
    u_names = list(nf.coeff_ring.variables)
    src_names = list(source.ring.variables)
    S = hom_ring(ambient, source)
    pullback = RingMap(target.ring, S, {v: S.coerce(f) for v, f in images.items()})
    W = PresentedRing(list(S.variables) + u_names, S.coeffs, S.order, relations=list(S.basis))
    C = PresentedRing(list(ambient.variables) + u_names, ambient.coeffs, ambient.order,
                      relations=list(ambient.basis))
    g = W.zero()
    for u, e in zip(u_names, nf.basis):
        g = g + W.var(u) * W.transfer(pullback(target.ring.monomial(e)))
    g = W.normal_form(g)

    src_index = [W.index[v] for v in src_names]
    rest_index = [W.index[v] for v in C.variables]
    basis = source.ring.standard_monomials()
    position = {m: k for k, m in enumerate(basis)}
    matrix = []
    for e in basis:
        mono = [0] * W.nvars
        for i, exp in zip(src_index, e):
            mono[i] = exp
        product = W.normal_form(W.monomial(tuple(mono)) * g)
        row: List[Dict] = [{} for _ in basis]
        for m, c in product.terms.items():
            key = tuple(m[i] for i in src_index)
            row[position[key]][tuple(m[i] for i in rest_index)] = c
        matrix.append([C.from_terms(terms) for terms in row])
    difference = C.normal_form(expand_determinant(matrix, C) - C.transfer(nf.norm))
    return _u_coefficients(difference, u_names, ambient, len(basis))


def _u_coefficients(difference: Poly, u_names: Sequence[str], ambient: PresentedRing,
                    degree: int) -> List[Poly]:
    """Coefficients of the u-monomials of ``difference``, moved into ``ambient``."""
    W = difference.ring
    u_index = [W.index[u] for u in u_names]
    u_set = set(u_index)
    grouped: Dict[Tuple[int, ...], Dict] = {}
    for mono, c in difference.terms.items():
        key = tuple(mono[i] for i in u_index)
        rest = tuple(0 if i in u_set else e for i, e in enumerate(mono))
        grouped.setdefault(key, {})[rest] = c
    degrees = {sum(key) for key in grouped}
    if degrees - {degree}:
        raise LevelforgeError(f"norm identity is not homogeneous of degree {degree}: {sorted(degrees)}")
    out = [ambient.coerce(W.from_terms(terms)) for _, terms in sorted(grouped.items())]
    return [f for f in out if not f.is_zero()]


def cartier_dual_images(km: KMIdeal, dual_source: HopfAlgebra, ring: PresentedRing) -> Dict[str, Poly]:
    """
    The dual h^D: α_2^2 → μ_2^2 of the universal h: (Z/2)^2 → α_2^2.

    With the pairings ⟨x, x'⟩ = 1 + x·x' on α_2 and ⟨m, ζ⟩ = ζ^m on
    Z/2 × μ_2, the k-th coordinate of h^D is Π_i (1 + M_ik·x_i), where
    M_ik is coordinate i of h(e_k). So h^D has the transposed matrix.
    """
    alpha = km.host
    if km.p != 2 or km.g != 2 or len(alpha.fiber_vars) != 2:
        raise LevelforgeError(f"the Cartier dual is wired for (Z/2)^2 → alpha_2^2, not {alpha.name}")
    images = {}
    for k in (1, 2):
        image = ring.one()
        for v, x in zip(alpha.fiber_vars, dual_source.fiber_vars):
            entry = ring.var(copy_name(v, k))
            image = ring.normal_form(image * (ring.one() + entry * ring.var(x)))
        images[copy_name("y", k)] = image
    return images


@dataclass
class KMDResult:
    rank: int
    km_rank: int
    expected: int
    ideal: Ideal
    dual_generators: int = 0


def kmd_rank_alpha2() -> KMDResult:
    """
    KM+D on Hom((Z/2)^2, α_2^2): h is a ×-homomorphism and so is its dual.

    The dual of Z/2 is μ_2 and α_2 is self-dual, so h^D maps α_2^2 to
    μ_2^2; its condition is the divisor identity for h^D.
    """
    km = km_ideal(alpha2_square(), 2, 2)
    dual_source, target = alpha2_square(), mu2_square()
    images = cartier_dual_images(km, dual_source, hom_ring(km.ambient, dual_source))
    dual = divisor_identity(km.ambient, dual_source, target, images)
    ideal = Ideal(km.ambient, list(km.generators) + dual)
    rank = ideal.dimension()
    logger.info(f"KM+D on alpha_2^2: rank {rank} ({len(dual)} dual equations, KM rank {km.rank})")
    return KMDResult(rank, km.rank, gl_order_formula(2, 2), ideal, len(dual))


@dataclass
class FiberComparison:
    fiber: str
    km_rank: int
    level_rank: int
    expected: int

    @property
    def km_matches(self) -> bool:
        return self.km_rank == self.expected


FIBERS = {"mu": (1, 0), "alpha": (0, 0), "etale": (0, 1)}


def km_vs_primitive(p: int, fibers: Optional[Sequence[str]] = None) -> List[FiberComparison]:
    """KM (g = 2) against the primitive-point level ideal on the μ_p^2, α_p^2 and étale fibers."""
    out = []
    expected = gl_order_formula(2, p)
    for name in fibers or FIBERS:
        s, t = FIBERS[name]
        chart = char_p_chart(p, s, t)
        G2 = hopf_power(ot_group(chart), 2)
        km_rank = km_ideal(G2, 2, p).rank
        level_rank = full_level_ideal(p, chart).rank
        out.append(FiberComparison(f"{name}({s},{t})", km_rank, level_rank, expected))
        logger.info(f"p={p} {name}: KM {km_rank}, level {level_rank}")
    return out
