"""
The level ideal of α_p^2 is not stable under GL_2 of a larger field.

Over F_(p^2) the α_p^2 level ideal is preserved by scalars and by
precomposition with GL_2(F_p), but some g ∈ GL_2(F_(p^2)) acting on the
point matrix moves it. So the level condition does not descend to the
quotient stack of the Oort–Tate chart.
"""

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from arith import ExtField
from gro import Ideal, ideal_equal
from ot import char_p_chart
from poly import Poly, PresentedRing, RingMap
from utils import Logger

from level import LevelIdeal, full_level_ideal, gl2_precompose_invariance

logger = Logger("level.stack")

ORIENTATIONS = ("right", "left")


def _times(ring: PresentedRing, f: Poly, c) -> Poly:
    """f times a coefficient given by its field encoding."""
    coeffs = ring.coeffs
    return ring.from_terms({m: coeffs.mul(v, c) for m, v in f.terms.items()})


def act(level: LevelIdeal, g, orientation: str = "right") -> RingMap:
    """
    Linear substitution of the point matrix M = ((a, b), (c, d)).

    "right" replaces M by M·g, "left" by g·M.
    """
    R = level.ambient
    (a, b), (c, d) = level.matrix
    (g11, g12), (g21, g22) = g
    if orientation == "right":
        images = {
            "a": _times(R, a, g11) + _times(R, b, g21),
            "b": _times(R, a, g12) + _times(R, b, g22),
            "c": _times(R, c, g11) + _times(R, d, g21),
            "d": _times(R, c, g12) + _times(R, d, g22),
        }
    elif orientation == "left":
        images = {
            "a": _times(R, a, g11) + _times(R, c, g12),
            "b": _times(R, b, g11) + _times(R, d, g12),
            "c": _times(R, a, g21) + _times(R, c, g22),
            "d": _times(R, b, g21) + _times(R, d, g22),
        }
    else:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}")
    return RingMap(R, R, images)


def preserves(level: LevelIdeal, g, orientation: str = "right") -> bool:
    phi = act(level, g, orientation)
    moved = Ideal(level.ambient, [phi(h) for h in level.generators])
    return ideal_equal(moved, level.ideal)


def _det(F: ExtField, g) -> int:
    (g11, g12), (g21, g22) = g
    return F.sub(F.mul(g11, g22), F.mul(g12, g21))


def candidate_matrices(F: ExtField):
    """(1, θ; 0, 1) for θ outside F_p first, then all of GL_2(F_q) with an entry outside F_p."""
    outside = [x for x in F.elements() if not F.in_prime_field(x)]
    for theta in outside:
        yield ((1, theta), (0, 1))
    for entries in itertools.product(list(F.elements()), repeat=4):
        g = (entries[:2], entries[2:])
        if _det(F, g) and any(not F.in_prime_field(x) for x in entries):
            yield g


@dataclass
class StackReport:
    p: int
    orientation: str
    witness: Optional[Tuple[Tuple[str, str], Tuple[str, str]]]
    searched: int
    scalars_preserve: bool
    gl2_fp_preserves: bool
    field_name: str = ""
    notes: List[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return self.witness is not None and self.scalars_preserve and self.gl2_fp_preserves


def stack_counterexample(p: int, orientation: str = "right",
                         max_candidates: Optional[int] = None) -> StackReport:
    """
    Search GL_2(F_(p^2)) for a matrix that moves the α_p^2 level ideal.

    Also checks that every scalar λ·id over F_(p^2) and every precomposition
    by GL_2(F_p) preserves the ideal.
    """
    if p not in (2, 3):
        raise ValueError(f"the stack search is wired for p in (2, 3), got {p}")
    F = ExtField(p, 2)
    level = full_level_ideal(p, char_p_chart(p, 0, 0, F))
    witness = None
    searched = 0
    seen = set()
    for g in candidate_matrices(F):
        if g in seen:
            continue
        seen.add(g)
        searched += 1
        if not preserves(level, g, orientation):
            witness = tuple(tuple(F.to_str(x) for x in row) for row in g)
            logger.info(f"p={p}: {witness} moves the level ideal ({orientation} action)")
            break
        if max_candidates and searched >= max_candidates:
            break
    scalars = all(preserves(level, ((lam, 0), (0, lam)), orientation) for lam in F.units())
    gl2 = gl2_precompose_invariance(p, level.chart, full_group=True)
    return StackReport(p, orientation, witness, searched, scalars, gl2, F.name)
