"""
Truncated level structures for split models of G[p^l].

Hom((Z/p^l)^2, G^2) is cut down by asking that the image of the quadruple
p^(l-1)-multiplication map G^4 → G[p]^4 lands in the level scheme of G[p]^2.
Only the split models are wired: μ_(p^l) and the constant group Z/p^l.
"""

from dataclasses import dataclass

from arith import PrimeField
from gro import Ideal
from hopf import HopfAlgebra, constant_group, hopf_power, multiplicative_group
from poly import RingMap, copy_name
from utils import Logger

from level import expected_rank, hopf_level_ideal

logger = Logger("level.truncated")

FLAVORS = ("multiplicative", "constant")


@dataclass
class TruncatedLevel:
    p: int
    l: int
    flavor: str
    rank: int
    expected: int
    ideal: Ideal

    @property
    def verdict(self) -> bool:
        return self.rank == self.expected


def split_model(p: int, l: int, flavor: str) -> HopfAlgebra:
    """μ_(p^l) or Z/p^l over F_p."""
    coeffs = PrimeField(p)
    if flavor == "multiplicative":
        return multiplicative_group(p ** l, coeffs)
    if flavor == "constant":
        return constant_group(p ** l, coeffs)
    raise ValueError(f"flavor must be one of {FLAVORS}, got {flavor!r}")


def power_map(G: HopfAlgebra, Gp: HopfAlgebra, p: int, l: int, flavor: str) -> RingMap:
    """
    Co-map of [p^(l-1)]: G → G[p] on a single factor.

    Multiplicative: z ↦ y^(p^(l-1)). Constant: the indicator of j ∈ Z/p pulls
    back to the indicator of every x ≡ j mod p.
    """
    R = G.ring
    if flavor == "multiplicative":
        return RingMap(Gp.ring, R, {"y": R.var("y") ** (p ** (l - 1))})
    images = {}
    for j in range(1, p):
        total = R.zero()
        for x in range(j, p ** l, p):
            total = total + R.var(f"e{x}")
        images[f"e{j}"] = total
    return RingMap(Gp.ring, R, images)


def truncated_level_rank(p: int, l: int, flavor: str = "multiplicative",
                         strategy: str = "elimination") -> TruncatedLevel:
    """
    Rank of the truncated level scheme, against |GL_2(Z/p^l)|.

    The level ideal of G[p]^2 is computed from G[p]'s own primitive ideal and
    pulled back to O(G^4) factor by factor.

    Raises:
        WellDefinednessError: the pull-back map does not respect the relations
    """
    if l not in (1, 2):
        raise ValueError(f"level must be 1 or 2, got {l}")
    G = split_model(p, l, flavor)
    Gp = split_model(p, 1, flavor)
    single = power_map(G, Gp, p, l, flavor)
    small, small_ideal = hopf_level_ideal(Gp, p, strategy)
    big = hopf_power(G, 4).ring
    images = {}
    for i in range(1, 5):
        slot = RingMap(G.ring, big, {v: big.var(copy_name(v, i)) for v in G.fiber_vars}, check=False)
        for v in Gp.fiber_vars:
            images[copy_name(v, i)] = slot(single.images[v])
    pullback = RingMap(small, big, images)
    ideal = Ideal(big, [pullback(g) for g in small_ideal.generators])
    rank = ideal.dimension()
    expected = expected_rank(p, l)
    logger.info(f"truncated {flavor} p={p} l={l}: rank {rank}, expected {expected}")
    return TruncatedLevel(p, l, flavor, rank, expected, ideal)
