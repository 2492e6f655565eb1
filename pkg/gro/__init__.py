"""
Gröbner bases and ideal calculus.

The engine is Buchberger's algorithm with the Gebauer–Möller pair criteria,
normal pair selection (least lcm degree, then pair indices) and a final
inter-reduction. Ideals live in a ``PresentedRing``; the ring's relations are
folded into every computation so callers reason about ideals of the quotient.

For finite-dimensional rings over a prime field a linear-algebra kernel is
also available: ideals become subspaces closed under multiplication by the
variables.
"""

import heapq
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from arith import ArithmeticDomainError, ExtField, LevelforgeError, PrimeField, row_reduce_mod_p
from config import Config
from poly import (
    Monomial,
    MonomialOrder,
    Poly,
    PresentedRing,
    RingMismatchError,
    coprime,
    divides,
    lcm,
    mono_div,
    mono_mul,
    prepare_divisors,
    reduce_terms,
    standard_monomials_for,
)
from utils import Logger

logger = Logger("gro")


class BudgetExceeded(LevelforgeError):
    """Raised when a Gröbner computation exceeds its pair, degree or time budget."""


class NotZeroDimensional(LevelforgeError):
    """Raised when a quotient is asked for its dimension but is infinite."""


class DivisionFailed(LevelforgeError):
    """Raised when an exact polynomial division leaves a remainder."""


@dataclass(frozen=True)
class Budget:
    """Limits on a single Buchberger run; max_seconds = 0 means unlimited."""

    max_pairs: int = 200000
    max_degree: int = 64
    max_seconds: float = 0.0

    @classmethod
    def from_config(cls) -> "Budget":
        return cls(**Config.get_budget_config())

    def scaled(self, factor: int) -> "Budget":
        return Budget(self.max_pairs * factor, self.max_degree * 2, self.max_seconds)


_default_budget = Budget.from_config()


def default_budget() -> Budget:
    return _default_budget


def set_default_budget(budget: Budget) -> None:
    global _default_budget
    _default_budget = budget


@contextmanager
def budget_scope(budget: Budget) -> Iterator[Budget]:
    """Temporarily replace the default budget."""
    previous = default_budget()
    set_default_budget(budget)
    try:
        yield budget
    finally:
        set_default_budget(previous)


class _Buchberger:
    def __init__(self, ring: PresentedRing, budget: Budget):
        self.ring = ring
        self.order = ring.order
        self.coeffs = ring.coeffs
        self.budget = budget
        self.basis: List[Poly] = []
        self.lms: List[Monomial] = []
        self.prepared: List[Tuple] = []
        self.active: List[int] = []
        self.pairs: List[Tuple[int, int, int, Monomial]] = []
        self._active_divisors: List[Tuple] = []
        self.processed = 0
        self.started = time.monotonic()

    def _reduce(self, terms) -> dict:
        return reduce_terms(terms, self._active_divisors, self.order, self.coeffs)

    def _add(self, terms: dict) -> None:
        f = Poly(self.ring, terms).monic()
        h = len(self.basis)
        self.basis.append(f)
        self.lms.append(f.lm())
        self.prepared.append(prepare_divisors([f])[0])
        self._update(h)
        self._active_divisors = [self.prepared[i] for i in self.active]

    def _update(self, h: int) -> None:
        lms = self.lms
        lm_h = lms[h]
        candidates = list(self.active)
        kept: List[int] = []
        while candidates:
            i = candidates.pop(0)
            l_ih = lcm(lms[i], lm_h)
            if coprime(lms[i], lm_h):
                kept.append(i)
                continue
            redundant = any(divides(lcm(lms[j], lm_h), l_ih) for j in candidates) or any(
                divides(lcm(lms[j], lm_h), l_ih) for j in kept
            )
            if not redundant:
                kept.append(i)
        new_pairs = []
        for i in kept:
            if coprime(lms[i], lm_h):
                continue
            l_ih = lcm(lms[i], lm_h)
            new_pairs.append((sum(l_ih), i, h, l_ih))
        survivors = [
            pair for pair in self.pairs
            if not (
                divides(lm_h, pair[3])
                and lcm(lms[pair[1]], lm_h) != pair[3]
                and lcm(lms[pair[2]], lm_h) != pair[3]
            )
        ]
        self.pairs = survivors + new_pairs
        heapq.heapify(self.pairs)
        self.active = [g for g in self.active if not divides(lm_h, lms[g])] + [h]

    def _spoly(self, i: int, j: int, l: Monomial) -> dict:
        mod = self.coeffs.modulus
        coeffs = self.coeffs
        qi = mono_div(l, self.lms[i])
        qj = mono_div(l, self.lms[j])
        out = {}
        for m, c in self.prepared[i][3]:
            out[mono_mul(m, qi)] = c
        for m, c in self.prepared[j][3]:
            nm = mono_mul(m, qj)
            old = out.get(nm)
            if mod:
                val = ((old or 0) - c) % mod
            else:
                val = coeffs.sub(coeffs.zero if old is None else old, c)
            if val == 0:
                out.pop(nm, None)
            else:
                out[nm] = val
        return out

    def _check_budget(self, degree: int) -> None:
        if self.processed > self.budget.max_pairs:
            raise BudgetExceeded(
                f"S-pair budget exhausted after {self.processed} pairs "
                f"(basis size {len(self.basis)}, limit {self.budget.max_pairs})"
            )
        if degree > self.budget.max_degree:
            raise BudgetExceeded(
                f"S-pair of lcm degree {degree} exceeds limit {self.budget.max_degree}"
            )
        if self.budget.max_seconds and time.monotonic() - self.started > self.budget.max_seconds:
            raise BudgetExceeded(
                f"time budget of {self.budget.max_seconds}s exceeded after {self.processed} pairs"
            )

    def run(self, polys: Sequence[Poly]) -> List[Poly]:
        for f in polys:
            r = self._reduce(f.terms)
            if r:
                self._add(r)
        while self.pairs:
            degree, i, j, l = heapq.heappop(self.pairs)
            self.processed += 1
            self._check_budget(degree)
            r = self._reduce(self._spoly(i, j, l))
            if r:
                self._add(r)
        logger.debug(
            f"buchberger: {self.processed} pairs, {len(self.basis)} polys, "
            f"{len(self.active)} in minimal basis"
        )
        return self._interreduce()

    def _interreduce(self) -> List[Poly]:
        minimal = [self.basis[i] for i in self.active]
        prepared = [self.prepared[i] for i in self.active]
        result = []
        for idx, g in enumerate(minimal):
            others = prepared[:idx] + prepared[idx + 1:]
            lm = g.lm()
            tail = {m: c for m, c in g.terms.items() if m != lm}
            reduced = reduce_terms(tail, others, self.order, self.coeffs)
            reduced[lm] = self.coeffs.one
            result.append(Poly(self.ring, reduced))
        result.sort(key=lambda f: self.order.key(f.lm()), reverse=True)
        return result


def groebner_polys(polys: Iterable[Poly], budget: Optional[Budget] = None) -> List[Poly]:
    """
    Reduced Gröbner basis of polynomials in a free polynomial ring.

    Args:
        polys: Generators, all attached to rings with the same variables
        budget: Limits; defaults to the configured budget

    Returns:
        Monic, inter-reduced basis sorted by descending leading monomial

    Raises:
        ArithmeticDomainError: coefficients are not a field
        BudgetExceeded: a limit was hit
    """
    polys = [f for f in polys if f.terms]
    if not polys:
        return []
    ring = polys[0].ring
    if not ring.coeffs.is_field:
        raise ArithmeticDomainError(
            f"Gröbner bases need field coefficients, got {ring.coeffs.name}"
        )
    engine = _Buchberger(ring, budget or default_budget())
    return engine.run([ring.transfer(f) for f in polys])


class GroebnerBasis:
    """A reduced Gröbner basis with its order; elements live in a free ring."""

    def __init__(self, ring: PresentedRing, elements: Sequence[Poly]):
        self.ring = ring
        self.order = ring.order
        self.elements = tuple(elements)
        self.leading_monomials = tuple(g.lm() for g in self.elements)
        self._divisors = prepare_divisors(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return self.ring.variables == other.ring.variables and [
            g.terms for g in self.elements
        ] == [g.terms for g in other.elements]

    def __hash__(self) -> int:
        return hash(tuple(frozenset(g.terms.items()) for g in self.elements))

    def reduce(self, f: Poly) -> Poly:
        f = self.ring.transfer(f)
        return Poly(self.ring, reduce_terms(f.terms, self._divisors, self.order, self.ring.coeffs))

    def contains(self, f: Poly) -> bool:
        return self.reduce(f).is_zero()

    @property
    def is_unit_ideal(self) -> bool:
        return any(not any(m) for m in self.leading_monomials)

    def _pure_power_bounds(self) -> Optional[List[int]]:
        bounds = []
        for i in range(self.ring.nvars):
            powers = [m[i] for m in self.leading_monomials
                      if m[i] and all(e == 0 for j, e in enumerate(m) if j != i)]
            if not powers:
                return None
            bounds.append(min(powers))
        return bounds

    @property
    def is_zero_dimensional(self) -> bool:
        return self.is_unit_ideal or self._pure_power_bounds() is not None

    def standard_monomials(self) -> Tuple[Monomial, ...]:
        if self.is_unit_ideal:
            return ()
        bounds = self._pure_power_bounds()
        if bounds is None:
            missing = [
                v for i, v in enumerate(self.ring.variables)
                if not any(m[i] and sum(m) == m[i] for m in self.leading_monomials)
            ]
            raise NotZeroDimensional(
                f"no pure-power leading term for {missing}; quotient is infinite-dimensional"
            )
        return standard_monomials_for(self.leading_monomials, bounds, self.order)

    def dimension(self) -> int:
        return len(self.standard_monomials())

    def to_text(self) -> List[str]:
        return [str(g) for g in self.elements]


class Ideal:
    """
    An ideal of a presented ring.

    Generators are stored in normal form with zeros and duplicates removed.
    The reduced Gröbner basis (of the generators together with the ring's
    relations, in the free ring) is computed on first use and cached.
    """

    def __init__(self, ambient: PresentedRing, generators: Iterable = (),
                 budget: Optional[Budget] = None):
        self.ambient = ambient
        seen = set()
        gens = []
        for g in generators:
            g = ambient.element(g)
            if g.is_zero():
                continue
            key = frozenset(g.terms.items())
            if key not in seen:
                seen.add(key)
                gens.append(g)
        self.generators = tuple(gens)
        self.budget = budget
        self._gb: Optional[GroebnerBasis] = None
        self._lock = threading.Lock()

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_lock"] = None
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def groebner(self) -> GroebnerBasis:
        if self._gb is None:
            with self._lock:
                if self._gb is None:
                    free = self.ambient.free()
                    polys = [free.transfer(b) for b in self.ambient.basis]
                    polys += [free.transfer(g) for g in self.generators]
                    self._gb = GroebnerBasis(free, groebner_polys(polys, self.budget))
        return self._gb

    def contains(self, f) -> bool:
        return self.groebner().contains(self.ambient.element(f))

    __contains__ = contains

    def reduce(self, f) -> Poly:
        return self.ambient.transfer(self.groebner().reduce(self.ambient.element(f)))

    def standard_monomials(self) -> Tuple[Monomial, ...]:
        return self.groebner().standard_monomials()

    def dimension(self) -> int:
        return self.groebner().dimension()

    def is_unit(self) -> bool:
        return self.groebner().is_unit_ideal

    def _same_ambient(self, other: "Ideal") -> None:
        if self.ambient != other.ambient:
            raise RingMismatchError(
                f"ideals live in different rings: {self.ambient.describe()} vs {other.ambient.describe()}"
            )

    def __add__(self, other: "Ideal") -> "Ideal":
        return ideal_combine("sum", self, other)

    def __mul__(self, other: "Ideal") -> "Ideal":
        return ideal_combine("product", self, other)

    def __and__(self, other: "Ideal") -> "Ideal":
        return ideal_intersect(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        return ideal_equal(self, other)

    def __hash__(self) -> int:
        return hash((self.ambient, self.groebner()))

    def __repr__(self) -> str:
        shown = ", ".join(str(g) for g in self.generators[:6])
        more = ", ..." if len(self.generators) > 6 else ""
        return f"Ideal({shown}{more})"


def ideal(ambient: PresentedRing, generators: Iterable = (),
          budget: Optional[Budget] = None) -> Ideal:
    """Create an ideal from Poly or text generators."""
    return Ideal(ambient, generators, budget)


def groebner(I: Ideal) -> GroebnerBasis:
    """Reduced Gröbner basis of I together with the ambient relations."""
    return I.groebner()


def ideal_combine(kind: str, I: Ideal, J: Ideal) -> Ideal:
    """Sum or product of two ideals of the same ring."""
    I._same_ambient(J)
    if kind == "sum":
        return Ideal(I.ambient, I.generators + J.generators, I.budget)
    if kind == "product":
        R = I.ambient
        return Ideal(R, [R.mul(f, g) for f in I.generators for g in J.generators], I.budget)
    raise ValueError(f"unknown combination {kind!r}")


def ideal_sum(ideals: Sequence[Ideal]) -> Ideal:
    if not ideals:
        raise ValueError("sum of no ideals")
    gens = []
    for I in ideals:
        ideals[0]._same_ambient(I)
        gens.extend(I.generators)
    return Ideal(ideals[0].ambient, gens, ideals[0].budget)


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    return ideal_combine("product", I, J)


def _fresh_name(base: str, taken: Sequence[str]) -> str:
    name = base
    n = 0
    while name in taken:
        n += 1
        name = f"{base}{n}"
    return name


def _intersect_free(free: PresentedRing, gens_a: Sequence[Poly], gens_b: Sequence[Poly],
                    budget: Optional[Budget]) -> List[Poly]:
    """Generators of (A) ∩ (B) in a free ring via u·A + (1−u)·B and elimination of u."""
    u = _fresh_name("u", free.variables)
    E = PresentedRing((u,) + free.variables, free.coeffs,
                      MonomialOrder.block(1, free.order), params=free.params)
    uvar = E.var(u)
    polys = [uvar * E.transfer(g) for g in gens_a]
    polys += [(E.one() - uvar) * E.transfer(g) for g in gens_b]
    basis = groebner_polys(polys, budget)
    return [free.transfer(g) for g in basis if g.lm()[0] == 0]


def ideal_intersect(I: Ideal, J: Ideal, strategy: str = "elimination") -> Ideal:
    """
    Intersection of two ideals of the same ring.

    Args:
        strategy: "elimination" (auxiliary variable with a block order) or
            "linear" (subspace intersection; finite-dimensional, prime field)
    """
    I._same_ambient(J)
    R = I.ambient
    if strategy == "linear":
        A = ideal_span(I)
        B = ideal_span(J)
        rows = subspace_intersection(A, B, _prime_modulus(R))
        return Ideal(R, [R.from_coordinates([int(x) for x in row]) for row in rows], I.budget)
    if strategy != "elimination":
        raise ValueError(f"unknown intersection strategy {strategy!r}")
    if not I.generators or not J.generators:
        return Ideal(R, [], I.budget)
    free = R.free()
    rels = [free.transfer(b) for b in R.basis]
    gens = _intersect_free(
        free,
        [free.transfer(g) for g in I.generators] + rels,
        [free.transfer(g) for g in J.generators] + rels,
        I.budget,
    )
    return Ideal(R, gens, I.budget)


def divide_exact(h: Poly, f: Poly) -> Poly:
    """
    Exact quotient h / f in a free polynomial ring.

    Raises:
        DivisionFailed: f does not divide h
    """
    ring = h.ring
    coeffs = ring.coeffs
    order = ring.order
    f = ring.transfer(f)
    lm_f = f.lm()
    inv = coeffs.inv(f.terms[lm_f])
    remainder = dict(h.terms)
    quotient = {}
    while remainder:
        m = max(remainder, key=order.key)
        if not divides(lm_f, m):
            raise DivisionFailed(f"{f} does not divide {h}: stuck at monomial {m}")
        c = coeffs.mul(remainder[m], inv)
        q = mono_div(m, lm_f)
        quotient[q] = c
        for fm, fc in f.terms.items():
            nm = mono_mul(fm, q)
            val = coeffs.sub(remainder.get(nm, coeffs.zero), coeffs.mul(c, fc))
            if val == 0:
                remainder.pop(nm, None)
            else:
                remainder[nm] = val
    return Poly(ring, quotient)


def ideal_quotient(I: Ideal, f) -> Ideal:
    """(I : f) = {g : g·f ∈ I}, via (I ∩ (f)) divided by f."""
    R = I.ambient
    if not R.coeffs.is_field:
        raise ArithmeticDomainError("ideal quotients need field coefficients")
    f = R.element(f)
    if f.is_zero():
        return Ideal(R, [R.one()], I.budget)
    free = R.free()
    F = free.transfer(f)
    gens_a = [free.transfer(g) for g in I.generators] + [free.transfer(b) for b in R.basis]
    if not gens_a:
        return Ideal(R, [], I.budget)
    inter = _intersect_free(free, gens_a, [F], I.budget)
    return Ideal(R, [divide_exact(h, F) for h in inter], I.budget)


def annihilator(R: PresentedRing, J: Ideal, strategy: str = "elimination") -> Ideal:
    """
    Annihilator of J: the intersection over generators g of ((0) : g).

    The "linear" strategy computes the common kernel of multiplication
    matrices instead (finite-dimensional rings over a prime field).
    """
    if J.ambient != R:
        raise RingMismatchError("annihilator of an ideal of another ring")
    if not J.generators:
        return Ideal(R, [R.one()], J.budget)
    if strategy == "linear":
        p = _prime_modulus(R)
        stacked = np.hstack([multiplication_matrix(R, g) for g in J.generators])
        kernel = left_nullspace_mod_p(stacked, p)
        return Ideal(R, [R.from_coordinates([int(x) for x in row]) for row in kernel], J.budget)
    zero = Ideal(R, [], J.budget)
    result: Optional[Ideal] = None
    for g in J.generators:
        Q = ideal_quotient(zero, g)
        result = Q if result is None else ideal_intersect(result, Q)
    return result


def eliminate(I: Ideal, names: Sequence[str]) -> Ideal:
    """
    Elimination ideal I ∩ k[remaining variables], returned in the free ring of
    the remaining variables.
    """
    R = I.ambient
    names = list(names)
    for v in names:
        if v not in R.index:
            raise ValueError(f"cannot eliminate undeclared variable {v!r}")
    rest = [v for v in R.variables if v not in names]
    inner = R.order if R.order.kind != "block" else MonomialOrder()
    E = PresentedRing(names + rest, R.coeffs, MonomialOrder.block(len(names), inner))
    polys = [E.transfer(b) for b in R.basis] + [E.transfer(g) for g in I.generators]
    basis = groebner_polys(polys, I.budget)
    k = len(names)
    kept = [g for g in basis if not any(g.lm()[:k])]
    target = PresentedRing(rest, R.coeffs, inner, params=[v for v in R.params if v in rest])
    return Ideal(target, [target.transfer(g) for g in kept], I.budget)


def quotient_dimension(R: PresentedRing, I: Ideal) -> Tuple[int, Tuple[Monomial, ...]]:
    """
    Vector-space dimension of R/I and its standard monomials.

    Raises:
        NotZeroDimensional: the quotient is infinite-dimensional
    """
    if I.ambient != R:
        raise RingMismatchError("ideal does not belong to the given ring")
    monomials = I.standard_monomials()
    return len(monomials), monomials


def ideal_equal(I: Ideal, J: Ideal) -> bool:
    """True iff the reduced Gröbner bases coincide."""
    I._same_ambient(J)
    return I.groebner() == J.groebner()


def ideal_contains(I: Ideal, f) -> bool:
    return I.contains(f)


def ideal_contains_ideal(I: Ideal, J: Ideal) -> bool:
    """True iff J ⊆ I."""
    I._same_ambient(J)
    gb = I.groebner()
    return all(gb.contains(g) for g in J.generators)


# Linear-algebra kernel

def _prime_modulus(R: PresentedRing) -> int:
    coeffs = R.coeffs
    if isinstance(coeffs, PrimeField) or (isinstance(coeffs, ExtField) and coeffs.k == 1):
        if not R.is_finite_dimensional:
            raise NotZeroDimensional(f"{R.describe()} is not finite-dimensional")
        return coeffs.p
    raise ArithmeticDomainError(
        f"the linear kernel needs prime-field coefficients, got {coeffs.name}"
    )


def multiplication_matrix(R: PresentedRing, f: Poly) -> np.ndarray:
    """
    Matrix of multiplication by f on the standard-monomial basis.

    Row i holds the coordinates of nf(e_i · f), so a coordinate row vector v
    maps to v @ M.
    """
    p = _prime_modulus(R)
    basis = R.standard_monomials()
    rows = [R.coordinates(R.monomial(m) * f) for m in basis]
    return np.array(rows, dtype=np.int64).reshape(len(basis), len(basis)) % p


def ideal_span(I: Ideal) -> np.ndarray:
    """
    Row-reduced basis of I as a subspace of the ring.

    Starts from the generators and closes under multiplication by every
    variable until the rank stabilizes.
    """
    R = I.ambient
    p = _prime_modulus(R)
    n = R.dimension
    if not I.generators:
        return np.zeros((0, n), dtype=np.int64)
    movers = [multiplication_matrix(R, R.var(v)) for v in R.variables]
    span = row_reduce_mod_p([R.coordinates(g) for g in I.generators], p)
    while True:
        blocks = [span] + [(span @ X) % p for X in movers]
        grown = row_reduce_mod_p(np.vstack(blocks), p)
        if len(grown) == len(span):
            return grown
        span = grown


def linear_quotient_dimension(I: Ideal) -> int:
    return I.ambient.dimension - len(ideal_span(I))


def subspace_intersection(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Zassenhaus intersection of two row spaces over F_p."""
    n = A.shape[1] if A.ndim == 2 and A.size else B.shape[1] if B.size else 0
    if A.size == 0 or B.size == 0:
        return np.zeros((0, n), dtype=np.int64)
    top = np.hstack([A, A])
    bottom = np.hstack([B, np.zeros_like(B)])
    reduced = row_reduce_mod_p(np.vstack([top, bottom]), p)
    rows = [row[n:] for row in reduced if not row[:n].any()]
    if not rows:
        return np.zeros((0, n), dtype=np.int64)
    return row_reduce_mod_p(np.array(rows), p)


def left_nullspace_mod_p(M: np.ndarray, p: int) -> np.ndarray:
    """Basis of {v : v @ M = 0} over F_p."""
    rows = M.shape[0]
    augmented = np.hstack([M % p, np.eye(rows, dtype=np.int64)])
    reduced = row_reduce_mod_p(augmented, p)
    cols = M.shape[1]
    kernel = [row[cols:] for row in reduced if not row[:cols].any()]
    if not kernel:
        return np.zeros((0, rows), dtype=np.int64)
    return row_reduce_mod_p(np.array(kernel), p)
