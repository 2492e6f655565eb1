"""
Partial level structures on μ_p^3 and the candidate level ideal on G^3.

Everything runs in the μ_p chart (s, t) = (1, 0) over F_p. A 2×3 point
matrix is a partial level structure when every nonzero combination of its
rows and of its columns is primitive, and, after every left GL_2 and right
GL_3 change of coordinates, one of its three 2×2 blocks is a full level
structure. The candidate ideal on G^3 asks the same of every 2×3 row block
of the 3×3 point matrix (and of its transpose when the dual is included).
"""

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from arith import (
    gl_order_formula,
    primitive_root,
    rank_two_count,
    row_reduce_mod_p,
)
from gro import GroebnerBasis, Ideal, ideal_intersect, ideal_product, ideal_sum
from level import level_generators, nonzero_vectors, primitivity
from ot import OTParams, char_p_chart, dot_combination, universal_ring
from poly import Poly, PresentedRing, RingMap
from utils import Logger

logger = Logger("ext3")

BLOCKS = ((0, 1), (0, 2), (1, 2))


def mu_chart(p: int) -> OTParams:
    return char_p_chart(p, 1, 0)


def entry_name(i: int, j: int) -> str:
    return f"a{i + 1}{j + 1}"


def matrix_ring(chart: OTParams, rows: int, cols: int) -> Tuple[PresentedRing, List[List[Poly]]]:
    """Universal ring of a rows×cols point matrix with entries a11, a12, ..."""
    names = [entry_name(i, j) for i in range(rows) for j in range(cols)]
    R = universal_ring(chart, names)
    return R, [[R.var(entry_name(i, j)) for j in range(cols)] for i in range(rows)]


def transform(chart: OTParams, R: PresentedRing, M: Sequence[Sequence[Poly]],
              left: Sequence[Sequence[int]], right: Sequence[Sequence[int]]) -> List[List[Poly]]:
    """The point matrix left·M·right, entries combined with dot-plus."""
    rows = len(left)
    cols = len(right[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            terms = [
                (left[i][k] * right[l][j], M[k][l])
                for k in range(len(M)) for l in range(len(M[0]))
            ]
            row.append(dot_combination(chart, R, terms))
        out.append(row)
    return out


def _identity(n: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def primitivity_generators(chart: OTParams, R: PresentedRing,
                           M: Sequence[Sequence[Poly]]) -> List[Poly]:
    """
    Every nonzero combination of rows and of columns is primitive.

    A combination of the rows is a point of G^cols; its primitivity is the
    product over its coordinates of (x^(p-1) - t). Likewise for columns.
    """
    p = chart.p
    rows, cols = len(M), len(M[0])
    gens = []
    for vec in nonzero_vectors(p, rows):
        factors = [primitivity(chart, dot_combination(chart, R, [(vec[i], M[i][j]) for i in range(rows)]))
                   for j in range(cols)]
        gens.append(R.product(factors))
    for vec in nonzero_vectors(p, cols):
        factors = [primitivity(chart, dot_combination(chart, R, [(vec[j], M[i][j]) for j in range(cols)]))
                   for i in range(rows)]
        gens.append(R.product(factors))
    return gens


@dataclass
class BlockIdealTriple:
    """The level ideals I_1, I_2, I_3 of the three 2×2 blocks of a 2×3 matrix."""

    ambient: PresentedRing
    chart: OTParams
    matrix: List[List[Poly]]
    blocks: Tuple[Ideal, Ideal, Ideal]

    def union_ideal(self, strategy: str = "elimination") -> Ideal:
        """I_1·I_2 ∩ I_1·I_3 ∩ I_2·I_3: at least one block is a full level structure."""
        I1, I2, I3 = self.blocks
        J = ideal_intersect(ideal_product(I1, I2), ideal_product(I1, I3), strategy)
        return ideal_intersect(J, ideal_product(I2, I3), strategy)


def block_ideals(p: int) -> BlockIdealTriple:
    chart = mu_chart(p)
    R, M = matrix_ring(chart, 2, 3)
    blocks = []
    for j, k in BLOCKS:
        sub = ((M[0][j], M[0][k]), (M[1][j], M[1][k]))
        gens, _ = level_generators(chart, R, sub)
        blocks.append(Ideal(R, gens))
    return BlockIdealTriple(R, chart, M, tuple(blocks))


def _substitution(chart: OTParams, R: PresentedRing, M, left, right) -> RingMap:
    moved = transform(chart, R, M, left, right)
    images = {entry_name(i, j): moved[i][j] for i in range(len(M)) for j in range(len(M[0]))}
    return RingMap(R, R, images, check=False)


def elementary_generators(p: int, n: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """Transvections I + E_ij (i ≠ j) and diag(r, 1, ..., 1): a generating set of GL_n(F_p)."""
    gens = []
    for i in range(n):
        for j in range(n):
            if i != j:
                gens.append(tuple(tuple(int(a == b) + int((a, b) == (i, j)) for b in range(n))
                                  for a in range(n)))
    r = primitive_root(p)
    if r != 1:
        gens.append(tuple(tuple((r if a == 0 else 1) if a == b else 0 for b in range(n))
                          for a in range(n)))
    return gens


@dataclass
class OrbitResult:
    ideals: List[Ideal]
    pairs_visited: int


def orbit_of_union_ideal(triple: BlockIdealTriple, strategy: str = "elimination") -> OrbitResult:
    """
    The distinct transforms g·J·g' of J = I_1I_2 ∩ I_1I_3 ∩ I_2I_3.

    The orbit is closed by breadth-first search over generators of
    GL_2(F_p) × GL_3(F_p); transforms are keyed by their reduced Gröbner basis.
    """
    chart, R, M = triple.chart, triple.ambient, triple.matrix
    p = chart.p
    J = triple.union_ideal(strategy)
    moves = [(g, _identity(3)) for g in elementary_generators(p, 2)]
    moves += [(_identity(2), h) for h in elementary_generators(p, 3)]
    maps = [_substitution(chart, R, M, g, h) for g, h in moves]
    seen: Dict[GroebnerBasis, Ideal] = {J.groebner(): J}
    queue = deque([J])
    visited = 0
    while queue:
        current = queue.popleft()
        for phi in maps:
            visited += 1
            moved = Ideal(R, [phi(f) for f in current.generators])
            key = moved.groebner()
            if key not in seen:
                seen[key] = Ideal(R, key.elements)
                queue.append(seen[key])
    logger.info(f"p={p}: orbit of the block condition has {len(seen)} ideals")
    return OrbitResult(list(seen.values()), visited)


@dataclass
class PartialLevelResult:
    ideal: Ideal
    rank: int
    expected: int
    orbit_size: int

    @property
    def verdict(self) -> bool:
        return self.rank == self.expected


def partial_level_ideal(p: int, strategy: str = "elimination") -> PartialLevelResult:
    """
    The 2×3 partial level ideal and its rank, against the number of rank-2 2×3 matrices.

    Raises:
        BudgetExceeded: p = 3 needs raised budgets
    """
    triple = block_ideals(p)
    condition_one = Ideal(triple.ambient, primitivity_generators(triple.chart, triple.ambient, triple.matrix))
    orbit = orbit_of_union_ideal(triple, strategy)
    total = ideal_sum([condition_one] + orbit.ideals)
    rank = total.dimension()
    expected = rank_two_count(2, 3, p)
    logger.info(f"partial 2x3 p={p}: rank {rank}, expected {expected}")
    return PartialLevelResult(total, rank, expected, len(orbit.ideals))


def row_subspaces(p: int, dim: int = 2, n: int = 3) -> List[Tuple[Tuple[int, ...], ...]]:
    """Reduced row echelon bases of the dim-dimensional subspaces of F_p^n."""
    found = set()
    for entries in itertools.product(range(p), repeat=dim * n):
        rows = [entries[i * n:(i + 1) * n] for i in range(dim)]
        reduced = row_reduce_mod_p(rows, p)
        if len(reduced) == dim:
            found.add(tuple(tuple(int(x) for x in row) for row in reduced))
    return sorted(found)


@dataclass
class CandidateResult:
    p: int
    include_dual: bool
    rank: int
    gl3_order: int
    ambient_dimension: int
    subspaces: int


def g3_candidate_rank(p: int, include_dual: bool = True,
                      partial: Optional[PartialLevelResult] = None) -> CandidateResult:
    """
    Rank of the candidate level ideal on Hom((Z/p)^3, G^3).

    Each 2-dimensional row space of the 3×3 point matrix (and of its
    transpose with ``include_dual``) must span a partial level structure.
    Left GL_2 and right GL_3 invariance of the partial ideal make the choice
    of basis of the row space irrelevant.
    """
    partial = partial or partial_level_ideal(p)
    chart = mu_chart(p)
    R, M = matrix_ring(chart, 3, 3)
    P = partial.ideal
    source = P.ambient
    generators = list(P.groebner().elements)
    candidates = [M]
    if include_dual:
        candidates.append([[M[j][i] for j in range(3)] for i in range(3)])
    spaces = row_subspaces(p)
    gens: List[Poly] = []
    for N in candidates:
        for basis in spaces:
            block = transform(chart, R, N, basis, _identity(3))
            images = {entry_name(i, j): block[i][j] for i in range(2) for j in range(3)}
            pull = RingMap(source, R, images, check=False)
            gens.extend(pull(source.transfer(g)) for g in generators)
    rank = Ideal(R, gens).dimension()
    logger.info(f"G^3 candidate p={p} dual={include_dual}: rank {rank}")
    return CandidateResult(p, include_dual, rank, gl_order_formula(3, p), p ** 9,
                           len(spaces))
