"""
Finite commutative Hopf algebras and the points of their group schemes.

A ``HopfAlgebra`` is a presented ring with a comultiplication into its tensor
square and a counit onto its base. A T-valued point is an algebra map from the
Hopf algebra to T, stored as the images of the fiber generators; the group law
on points is convolution through the comultiplication.
"""

from typing import Dict, Mapping, Optional, Sequence

from arith import CoefficientRing, LevelforgeError
from gro import Ideal, annihilator, ideal_equal
from poly import (
    Poly,
    PresentedRing,
    RingMap,
    WellDefinednessError,
    copy_name,
    rename_variables,
    tensor_power,
    tensor_square,
)
from utils import Logger

logger = Logger("hopf")


class HopfAxiomError(LevelforgeError):
    """Raised when a comultiplication or counit violates a Hopf axiom."""


class PointConditionError(LevelforgeError):
    """Raised when proposed point coordinates do not satisfy the host relations."""


def _copy_map(R: PresentedRing, source: PresentedRing, target: PresentedRing,
              positions: Sequence[int]) -> RingMap:
    """Map the tensor power ``source`` into ``target`` sending copy i to copy positions[i]."""
    images = {
        copy_name(v, i + 1): target.var(copy_name(v, j))
        for i, j in enumerate(positions) for v in R.fiber_vars
    }
    return RingMap(source, target, images, check=False)


class HopfAlgebra:
    """
    A commutative Hopf algebra presented by generators and relations.

    The comultiplication sends each fiber generator into ``ring ⊗ ring``
    (variables ``v_1``, ``v_2``), the counit sends it into the base ring of
    parameters. Axioms are checked on generators only; both structure maps are
    algebra maps, so agreement on generators is agreement everywhere.
    """

    def __init__(self, ring: PresentedRing, comult: RingMap, counit: RingMap,
                 name: str = "H", verify: bool = True):
        self.ring = ring
        self.comult = comult
        self.counit = counit
        self.name = name
        self.square = comult.target
        self.base = counit.target
        self.fiber_vars = ring.fiber_vars
        if verify:
            self.verify()

    def __repr__(self) -> str:
        return f"HopfAlgebra({self.name})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, HopfAlgebra):
            return NotImplemented
        return self is other or (
            self.ring == other.ring
            and all(self.comult.images[v] == other.comult.images[v] for v in self.fiber_vars)
            and all(self.counit.images[v] == other.counit.images[v] for v in self.fiber_vars)
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.name))

    @property
    def rank(self) -> int:
        """Rank over the base, read off the fiber at the origin of the parameters."""
        if self.ring.params:
            fiber, _ = self.ring.specialize({v: 0 for v in self.ring.params})
            return fiber.dimension
        return self.ring.dimension

    def verify(self) -> None:
        """
        Check coassociativity, both counit laws and that the counit fixes the base.

        Raises:
            HopfAxiomError: naming the axiom and generator that fail
        """
        R = self.ring
        T2 = self.square
        T3 = tensor_power(R, 3)
        first_two = _copy_map(R, T2, T3, (1, 2))
        last_two = _copy_map(R, T2, T3, (2, 3))
        left = RingMap(T2, T3, {
            **{copy_name(v, 1): first_two(self.comult.images[v]) for v in self.fiber_vars},
            **{copy_name(v, 2): T3.var(copy_name(v, 3)) for v in self.fiber_vars},
        }, check=False)
        right = RingMap(T2, T3, {
            **{copy_name(v, 1): T3.var(copy_name(v, 1)) for v in self.fiber_vars},
            **{copy_name(v, 2): last_two(self.comult.images[v]) for v in self.fiber_vars},
        }, check=False)
        counit_left = RingMap(T2, R, {
            **{copy_name(v, 1): R.coerce(self.counit.images[v]) for v in self.fiber_vars},
            **{copy_name(v, 2): R.var(v) for v in self.fiber_vars},
        }, check=False)
        counit_right = RingMap(T2, R, {
            **{copy_name(v, 1): R.var(v) for v in self.fiber_vars},
            **{copy_name(v, 2): R.coerce(self.counit.images[v]) for v in self.fiber_vars},
        }, check=False)
        for v in self.fiber_vars:
            delta = self.comult.images[v]
            if left(delta) != right(delta):
                raise HopfAxiomError(f"{self.name}: coassociativity fails on generator {v}")
            if counit_left(delta) != R.var(v):
                raise HopfAxiomError(f"{self.name}: left counit law fails on generator {v}")
            if counit_right(delta) != R.var(v):
                raise HopfAxiomError(f"{self.name}: right counit law fails on generator {v}")
        for v in R.params:
            if self.counit.images[v] != self.base.var(v):
                raise HopfAxiomError(f"{self.name}: counit does not fix base parameter {v}")
        logger.debug(f"{self.name}: Hopf axioms verified on {list(self.fiber_vars)}")

    def augmentation_ideal(self) -> Ideal:
        """Kernel of the counit, generated by g - ε(g) over the fiber generators."""
        R = self.ring
        return Ideal(R, [R.var(v) - R.coerce(self.counit.images[v]) for v in self.fiber_vars])

    def point(self, target: PresentedRing, coords: Mapping[str, object],
              base_images: Optional[Mapping[str, object]] = None) -> "GroupPoint":
        return GroupPoint(self, target, coords, base_images)

    def identity(self, target: PresentedRing,
                 base_images: Optional[Mapping[str, object]] = None) -> "GroupPoint":
        """The identity point: the counit followed by the structure map to target."""
        to_target = _base_to_target(self, target, base_images)
        coords = {v: to_target(self.counit.images[v]) for v in self.fiber_vars}
        return GroupPoint(self, target, coords, base_images, check=False)


def _base_to_target(H: HopfAlgebra, target: PresentedRing,
                    base_images: Optional[Mapping[str, object]]) -> RingMap:
    images = dict(base_images or {})
    return RingMap(H.base, target, images, check=False)


def hopf_create(ring: PresentedRing, comult_images: Mapping[str, object],
                counit_images: Mapping[str, object], name: str = "H",
                verify: bool = True) -> HopfAlgebra:
    """
    Build and verify a Hopf algebra.

    Args:
        ring: Presented ring; ``ring.params`` are base parameters
        comult_images: Image of each fiber generator in ring ⊗ ring (text or Poly
            over the variables v_1, v_2)
        counit_images: Image of each fiber generator in the base ring
        name: Display name

    Raises:
        WellDefinednessError: a structure map does not respect the relations
        HopfAxiomError: coassociativity or a counit law fails
    """
    missing = [v for v in ring.fiber_vars if v not in comult_images or v not in counit_images]
    if missing:
        raise ValueError(f"structure maps need images of every fiber generator; missing {missing}")
    T2 = tensor_square(ring)
    base = ring.base_ring()
    comult = RingMap(ring, T2, {v: comult_images[v] for v in ring.fiber_vars})
    counit = RingMap(ring, base, {v: counit_images[v] for v in ring.fiber_vars})
    return HopfAlgebra(ring, comult, counit, name, verify)


class GroupPoint:
    """
    A target-valued point of a group scheme: images of the fiber generators.

    Base parameters go to the target variable of the same name unless
    ``base_images`` says otherwise. The host relations are re-checked on
    construction.
    """

    def __init__(self, host: HopfAlgebra, target: PresentedRing,
                 coords: Mapping[str, object],
                 base_images: Optional[Mapping[str, object]] = None,
                 check: bool = True):
        self.host = host
        self.target = target
        self.base_images = dict(base_images or {})
        missing = [v for v in host.fiber_vars if v not in coords]
        if missing:
            raise ValueError(f"point needs coordinates for {missing}")
        images = {v: coords[v] for v in host.fiber_vars}
        images.update(self.base_images)
        try:
            self.map = RingMap(host.ring, target, images, check=check)
        except WellDefinednessError as exc:
            raise PointConditionError(f"not a point of {host.name}: {exc}") from exc
        self.coords: Dict[str, Poly] = {v: self.map.images[v] for v in host.fiber_vars}

    def __getitem__(self, v: str) -> Poly:
        return self.coords[v]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupPoint):
            return NotImplemented
        return (
            self.host == other.host
            and self.target == other.target
            and all(self.coords[v] == other.coords[v] for v in self.host.fiber_vars)
        )

    def __hash__(self) -> int:
        return hash(tuple(self.coords[v] for v in self.host.fiber_vars))

    def __add__(self, other: "GroupPoint") -> "GroupPoint":
        return point_add(self, other)

    def __rmul__(self, m: int) -> "GroupPoint":
        return point_scale(m, self)

    def __repr__(self) -> str:
        shown = ", ".join(f"{v} -> {c}" for v, c in self.coords.items())
        return f"GroupPoint({shown})"


def point_add(P: GroupPoint, Q: GroupPoint) -> GroupPoint:
    """Convolution P +̇ Q: (P ⊗ Q) applied to Δ of each generator."""
    if not (P.host is Q.host or P.host == Q.host):
        raise PointConditionError(f"points of different groups: {P.host.name} vs {Q.host.name}")
    if P.target != Q.target:
        raise PointConditionError("points with different target rings")
    H = P.host
    images = {}
    for v in H.fiber_vars:
        images[copy_name(v, 1)] = P.coords[v]
        images[copy_name(v, 2)] = Q.coords[v]
    images.update(P.base_images)
    pair = RingMap(H.square, P.target, images, check=False)
    coords = {v: pair(H.comult.images[v]) for v in H.fiber_vars}
    return GroupPoint(H, P.target, coords, P.base_images)


def point_scale(m: int, P: GroupPoint) -> GroupPoint:
    """[m]P by double-and-add; [0]P is the identity point."""
    if m < 0:
        raise ValueError("point_scale needs m >= 0")
    result = P.host.identity(P.target, P.base_images)
    addend = P
    while m:
        if m & 1:
            result = point_add(result, addend)
        m >>= 1
        if m:
            addend = point_add(addend, addend)
    return result


def primitive_ideal(H: HopfAlgebra, strategy: str = "elimination") -> Ideal:
    """Annihilator of the augmentation ideal: the scheme of generators."""
    return annihilator(H.ring, H.augmentation_ideal(), strategy)


def hopf_product(*factors: HopfAlgebra, verify: bool = False) -> HopfAlgebra:
    """
    Product group scheme G_1 × ... × G_k.

    Fiber generator v of factor i is renamed v_i; base parameters are shared.
    The structure maps are the factorwise ones, so the axioms follow from
    those of the factors and are only re-checked when ``verify`` is set.
    """
    if not factors:
        raise ValueError("product of no Hopf algebras")
    coeffs = factors[0].ring.coeffs
    order = factors[0].ring.order
    params = []
    for H in factors:
        if H.ring.coeffs != coeffs:
            raise ValueError("factors must share the coefficient ring")
        params.extend(v for v in H.ring.params if v not in params)
    variables = [copy_name(v, i) for i, H in enumerate(factors, 1) for v in H.fiber_vars] + params
    scratch = PresentedRing(variables, coeffs, order, params=params)
    relations = []
    seen = set()
    for i, H in enumerate(factors, 1):
        rename = {v: copy_name(v, i) for v in H.fiber_vars}
        for b in H.ring.basis:
            r = rename_variables(b, scratch, rename)
            key = frozenset(r.terms.items())
            if key not in seen:
                seen.add(key)
                relations.append(r)
    ring = PresentedRing(variables, coeffs, order, relations=relations, params=params)
    T2 = tensor_square(ring)
    comult = {}
    counit = {}
    for i, H in enumerate(factors, 1):
        for v in H.fiber_vars:
            w = copy_name(v, i)
            rename = {copy_name(u, j): copy_name(copy_name(u, i), j)
                      for u in H.fiber_vars for j in (1, 2)}
            comult[w] = rename_variables(H.comult.images[v], T2, rename)
            counit[w] = H.counit.images[v]
    name = " x ".join(H.name for H in factors)
    return hopf_create(ring, comult, counit, name=name, verify=verify)


def hopf_power(H: HopfAlgebra, k: int, verify: bool = False) -> HopfAlgebra:
    """G^k, with generators v_1, ..., v_k."""
    return hopf_product(*([H] * k), verify=verify)


def tensor_map(H1: HopfAlgebra, H2: HopfAlgebra, phi: RingMap) -> RingMap:
    """φ ⊗ φ between the tensor squares."""
    images = {}
    for i in (1, 2):
        inclusion = H2.square.inclusion(i)
        for v in H1.fiber_vars:
            images[copy_name(v, i)] = inclusion(phi.images[v])
    return RingMap(H1.square, H2.square, images, check=False)


def is_hopf_morphism(H1: HopfAlgebra, H2: HopfAlgebra, phi: RingMap) -> bool:
    """
    True iff φ: O(H1) → O(H2) intertwines comultiplications and counits.

    This is the co-map of a group homomorphism H2 → H1.
    """
    square = tensor_map(H1, H2, phi)
    to_base = RingMap(H1.base, H2.base, {}, check=False) if H1.ring.params else None
    for v in H1.fiber_vars:
        if square(H1.comult.images[v]) != H2.comult(phi.images[v]):
            return False
        eps1 = H1.counit.images[v]
        eps1 = to_base(eps1) if to_base else H2.base.coerce(eps1)
        if eps1 != H2.counit(phi.images[v]):
            return False
    return True


def preserves_primitive_ideal(H: HopfAlgebra, phi: RingMap) -> bool:
    """For an automorphism φ of O(H): φ maps the primitive ideal onto itself."""
    P = primitive_ideal(H)
    image = Ideal(H.ring, [phi(g) for g in P.generators])
    return ideal_equal(image, P)


# Standard group schemes

def multiplicative_group(n: int, coeffs: CoefficientRing) -> HopfAlgebra:
    """μ_n = Spec k[y]/(y^n - 1) with Δ(y) = y_1·y_2 and ε(y) = 1."""
    ring = PresentedRing(["y"], coeffs, relations=[f"y^{n} - 1"], name=f"O(mu_{n})")
    return hopf_create(ring, {"y": "y_1*y_2"}, {"y": 1}, name=f"mu_{n}")


def additive_group(p: int, coeffs: CoefficientRing) -> HopfAlgebra:
    """α_p = Spec k[x]/(x^p) with Δ(x) = x_1 + x_2 and ε(x) = 0."""
    ring = PresentedRing(["x"], coeffs, relations=[f"x^{p}"], name=f"O(alpha_{p})")
    return hopf_create(ring, {"x": "x_1 + x_2"}, {"x": 0}, name=f"alpha_{p}")


def constant_group(n: int, coeffs: CoefficientRing) -> HopfAlgebra:
    """
    The constant group Z/n: functions on n points.

    Presented on the idempotents e_1, ..., e_{n-1} of the nonzero elements;
    e_0 = 1 - Σ e_i is the indicator of the identity. Δ(e_i) = Σ_j e_j ⊗ e_{i-j}.
    """
    names = [f"e{i}" for i in range(1, n)]
    relations = [f"{e}^2 - {e}" for e in names]
    relations += [f"{a}*{b}" for i, a in enumerate(names) for b in names[i + 1:]]
    ring = PresentedRing(names, coeffs, relations=relations, name=f"O(Z/{n})")
    T2 = tensor_square(ring)

    def idem(i: int, copy: int) -> Poly:
        if i % n == 0:
            return T2.one() - sum((T2.var(copy_name(e, copy)) for e in names), T2.zero())
        return T2.var(copy_name(f"e{i % n}", copy))

    comult = {}
    for i in range(1, n):
        total = T2.zero()
        for j in range(n):
            total = total + idem(j, 1) * idem(i - j, 2)
        comult[f"e{i}"] = T2.normal_form(total)
    return hopf_create(ring, comult, {e: 0 for e in names}, name=f"Z/{n}")


def constant_identity_idempotent(H: HopfAlgebra) -> Poly:
    """e_0 = 1 - Σ e_i in a constant group's function ring."""
    R = H.ring
    return R.one() - sum((R.var(v) for v in H.fiber_vars), R.zero())
