"""
Sparse multivariate polynomials and presented quotient rings.

A ``Poly`` is a dictionary from exponent tuples to nonzero coefficients,
attached to the ``PresentedRing`` whose variables index the tuples. Arithmetic
on ``Poly`` values is free (no reduction); ``PresentedRing.normal_form`` maps
an element to its unique representative modulo the ring's relations.
"""

import functools
import heapq
import itertools
import random
import re
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from arith import CoefficientRing, ExtField, LevelforgeError, PrimeField

Monomial = Tuple[int, ...]
Terms = Dict[Monomial, object]

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

# per order; keys are rebuilt on a miss
KEY_CACHE_SIZE = 1 << 16


class WellDefinednessError(LevelforgeError):
    """Raised when a ring map does not send every relation to zero."""


class ParseError(LevelforgeError):
    """Raised for malformed polynomial text or undeclared variables."""


class RingMismatchError(LevelforgeError):
    """Raised when combining elements of incompatible rings."""


class MonomialOrder:
    """
    Monomial order with sort keys kept in a bounded LRU cache.

    ``key(m)`` is a tuple that compares larger for larger monomials. Block
    orders compare the first ``elim`` exponents by degrevlex and break ties
    with ``inner`` on the remaining ones, so the leading block is eliminated.
    """

    def __init__(self, kind: str = "degrevlex", elim: int = 0,
                 inner: Optional["MonomialOrder"] = None, cache_size: int = KEY_CACHE_SIZE):
        if kind not in ("degrevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {kind!r}")
        if kind == "block" and (inner is None or elim < 1):
            raise ValueError("block order needs a positive block size and an inner order")
        self.kind = kind
        self.elim = elim
        self.inner = inner
        self.cache_size = cache_size
        self.key = functools.lru_cache(maxsize=cache_size)(self._compute)
        self.neg_key = functools.lru_cache(maxsize=cache_size)(self._negate)

    @classmethod
    def block(cls, elim: int, inner: "MonomialOrder") -> "MonomialOrder":
        return cls("block", elim, inner)

    def _spec(self) -> Tuple:
        return (self.kind, self.elim, self.inner._spec() if self.inner else None)

    def __eq__(self, other) -> bool:
        return isinstance(other, MonomialOrder) and self._spec() == other._spec()

    def __hash__(self) -> int:
        return hash(self._spec())

    def __repr__(self) -> str:
        if self.kind == "block":
            return f"block({self.elim}, {self.inner!r})"
        return self.kind

    def __getstate__(self):
        return {"kind": self.kind, "elim": self.elim, "inner": self.inner, "cache_size": self.cache_size}

    def __setstate__(self, state):
        self.__init__(state["kind"], state["elim"], state["inner"], state["cache_size"])

    def _compute(self, m: Monomial) -> Tuple[int, ...]:
        if self.kind == "lex":
            return m
        if self.kind == "degrevlex":
            return (sum(m),) + tuple(-e for e in reversed(m))
        head = m[:self.elim]
        return (sum(head),) + tuple(-e for e in reversed(head)) + self.inner.key(m[self.elim:])

    def _negate(self, m: Monomial) -> Tuple[int, ...]:
        """Key whose ascending order is descending monomial order (for heaps)."""
        return tuple(-x for x in self.key(m))


DEGREVLEX = MonomialOrder("degrevlex")
LEX = MonomialOrder("lex")


def order_from_name(name: Union[str, MonomialOrder]) -> MonomialOrder:
    if isinstance(name, MonomialOrder):
        return name
    if name == "degrevlex":
        return DEGREVLEX
    if name == "lex":
        return LEX
    raise ValueError(f"unknown monomial order {name!r}")


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def coprime(a: Monomial, b: Monomial) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _coeff_compatible(a: CoefficientRing, b: CoefficientRing) -> bool:
    if a == b:
        return True
    # the prime subfield of an extension field is encoded by the same residues
    if isinstance(a, (PrimeField, ExtField)) and isinstance(b, (PrimeField, ExtField)):
        return a.p == b.p
    return False


class Poly:
    """An element of the free polynomial ring over ``ring``'s variables."""

    __slots__ = ("ring", "terms", "_lm")

    def __init__(self, ring: "PresentedRing", terms: Terms):
        self.ring = ring
        self.terms = terms
        self._lm = None

    # construction helpers

    def _new(self, terms: Terms) -> "Poly":
        return Poly(self.ring, terms)

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring is self.ring:
                return other
            if other.ring.variables != self.ring.variables or not _coeff_compatible(
                self.ring.coeffs, other.ring.coeffs
            ):
                raise RingMismatchError(
                    f"cannot combine elements of {self.ring.describe()} and {other.ring.describe()}"
                )
            return other
        return self.ring.const(other)

    # arithmetic

    def __add__(self, other) -> "Poly":
        other = self._lift(other)
        coeffs = self.ring.coeffs
        out = dict(self.terms)
        for m, c in other.terms.items():
            old = out.get(m)
            if old is None:
                out[m] = c
            else:
                val = coeffs.add(old, c)
                if val == 0:
                    del out[m]
                else:
                    out[m] = val
        return self._new(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        coeffs = self.ring.coeffs
        return self._new({m: coeffs.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def __mul__(self, other) -> "Poly":
        other = self._lift(other)
        coeffs = self.ring.coeffs
        mod = coeffs.modulus
        out: Terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                if mod:
                    out[m] = (out.get(m, 0) + c1 * c2) % mod
                else:
                    old = out.get(m)
                    prod = coeffs.mul(c1, c2)
                    out[m] = prod if old is None else coeffs.add(old, prod)
        return self._new({m: c for m, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c) -> "Poly":
        """Multiply by an element of the coefficient ring (see ``times`` for integers)."""
        coeffs = self.ring.coeffs
        c = coeffs.element(c)
        if c == 0:
            return self._new({})
        return self._new({m: v for m, v in ((m, coeffs.mul(v, c)) for m, v in self.terms.items()) if v != 0})

    def times(self, n: int) -> "Poly":
        """The integer multiple n·f."""
        return self.scale(self.ring.coeffs.from_int(n))

    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.coeffs.zero)

    def lm(self) -> Monomial:
        if self._lm is None:
            if not self.terms:
                raise ValueError("the zero polynomial has no leading monomial")
            self._lm = max(self.terms, key=self.ring.order.key)
        return self._lm

    def lc(self):
        return self.terms[self.lm()]

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self.scale(self.ring.coeffs.inv(self.lc()))

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def support(self) -> List[int]:
        """Indices of variables that occur."""
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return sorted(used)

    def sorted_terms(self) -> List[Tuple[Monomial, object]]:
        return sorted(self.terms.items(), key=lambda item: self.ring.order.key(item[0]), reverse=True)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.ring.variables == other.ring.variables and self.terms == other.terms
        if isinstance(other, int):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring.variables, frozenset(self.terms.items())))

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"


def prepare_divisors(polys: Iterable[Poly]) -> List[Tuple]:
    """Pre-split each divisor into (lm, support, lc inverse, tail terms)."""
    prepared = []
    for g in polys:
        if not g.terms:
            continue
        lm = g.lm()
        coeffs = g.ring.coeffs
        inv = coeffs.inv(g.terms[lm])
        support = tuple((i, e) for i, e in enumerate(lm) if e)
        tail = tuple((m, c) for m, c in g.terms.items() if m != lm)
        prepared.append((lm, support, inv, tail))
    return prepared


def reduce_terms(terms: Terms, divisors: Sequence[Tuple], order: MonomialOrder,
                 coeffs: CoefficientRing) -> Terms:
    """
    Fully reduce a term dictionary by prepared divisors.

    Terms are processed from the largest monomial down through a heap; a term
    divisible by no leading monomial moves to the remainder.
    """
    if not divisors or not terms:
        return dict(terms)
    mod = coeffs.modulus
    key = order.neg_key
    work = dict(terms)
    heap = [(key(m), m) for m in work]
    heapq.heapify(heap)
    result: Terms = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = work.pop(m, None)
        if c is None:
            continue
        for lm, support, inv, tail in divisors:
            for i, e in support:
                if m[i] < e:
                    break
            else:
                q = tuple(a - b for a, b in zip(m, lm))
                factor = c * inv % mod if mod else coeffs.mul(c, inv)
                for tm, tc in tail:
                    nm = tuple(a + b for a, b in zip(tm, q))
                    old = work.get(nm)
                    if mod:
                        val = ((old or 0) - factor * tc) % mod
                    else:
                        val = coeffs.sub(coeffs.zero if old is None else old, coeffs.mul(factor, tc))
                    if old is None:
                        if val != 0:
                            work[nm] = val
                            heapq.heappush(heap, (key(nm), nm))
                    elif val == 0:
                        del work[nm]
                    else:
                        work[nm] = val
                break
        else:
            result[m] = c
    return result


def monomials_in_box(bounds: Sequence[int]) -> Iterable[Monomial]:
    return itertools.product(*(range(b) for b in bounds))


class PresentedRing:
    """
    A polynomial ring modulo a relations ideal, with unique normal forms.

    ``params`` names the base parameters (for example s and t of an
    Oort–Tate chart); the remaining variables are fiber variables, which are
    the ones copied by tensor powers. Over a field the relations are completed
    to a reduced Gröbner basis at construction; over other coefficient rings
    the relations must be monic and are used as given.
    """

    def __init__(self, variables: Sequence[str], coeffs: CoefficientRing,
                 order: Union[str, MonomialOrder] = "degrevlex",
                 relations: Sequence[Union[str, Poly]] = (),
                 params: Sequence[str] = (), name: Optional[str] = None,
                 tensor_of: Optional[Tuple["PresentedRing", int]] = None):
        self.variables = tuple(variables)
        for v in self.variables:
            if not _IDENT.match(v):
                raise ParseError(f"invalid variable name {v!r}")
        if len(set(self.variables)) != len(self.variables):
            raise ParseError(f"duplicate variable names in {self.variables}")
        self.index = {v: i for i, v in enumerate(self.variables)}
        self.nvars = len(self.variables)
        self.coeffs = coeffs
        self.order = order_from_name(order)
        self.params = tuple(params)
        for v in self.params:
            if v not in self.index:
                raise ParseError(f"parameter {v!r} is not a declared variable")
        self.fiber_vars = tuple(v for v in self.variables if v not in self.params)
        self.name = name
        self.tensor_of = tensor_of
        self._zero_mono = (0,) * self.nvars
        self._free: Optional["PresentedRing"] = None

        rels = [self._relation(r) for r in relations]
        self.relations = tuple(r for r in rels if r.terms)
        if coeffs.is_field:
            from gro import groebner_polys

            self.basis = tuple(groebner_polys(self.relations))
        else:
            for r in self.relations:
                if not coeffs.is_unit(r.lc()):
                    raise ParseError(
                        f"relation {r} must be monic over the non-field {coeffs.name}"
                    )
            self.basis = tuple(r.monic() for r in self.relations)
        self._divisors = prepare_divisors(self.basis)
        self.leading_monomials = tuple(b.lm() for b in self.basis)
        self._standard: Optional[Tuple[Monomial, ...]] = None
        self._signature = (
            self.variables, coeffs.key(), self.order._spec(), self.params,
            frozenset(frozenset(b.terms.items()) for b in self.basis),
        )
        self._hash = hash(self._signature)

    def _relation(self, r: Union[str, Poly]) -> Poly:
        if isinstance(r, str):
            return parse_poly(r, self, reduce=False)
        if r.ring is self:
            return r
        return self.transfer(r)

    # identity

    def __eq__(self, other) -> bool:
        return isinstance(other, PresentedRing) and (
            self is other or self._signature == other._signature
        )

    def __hash__(self) -> int:
        return self._hash

    def describe(self) -> str:
        if self.name:
            return self.name
        rels = ", ".join(str(b) for b in self.basis[:4])
        more = ", ..." if len(self.basis) > 4 else ""
        return f"{self.coeffs.name}[{', '.join(self.variables)}]/({rels}{more})"

    def __repr__(self) -> str:
        return f"PresentedRing({self.describe()})"

    # elements

    def zero(self) -> Poly:
        return Poly(self, {})

    def one(self) -> Poly:
        return self.const(1)

    def const(self, c) -> Poly:
        """The constant c; an int is the image of that integer."""
        c = self.coeffs.coerce(c)
        return Poly(self, {} if c == 0 else {self._zero_mono: c})

    def scalar(self, c) -> Poly:
        """The constant given by an element of the coefficient ring."""
        c = self.coeffs.element(c)
        return Poly(self, {} if c == 0 else {self._zero_mono: c})

    def var(self, name: str) -> Poly:
        if name not in self.index:
            raise ParseError(f"undeclared variable {name!r} in {self.describe()}")
        mono = [0] * self.nvars
        mono[self.index[name]] = 1
        return Poly(self, {tuple(mono): self.coeffs.one})

    def gens(self) -> Dict[str, Poly]:
        return {v: self.var(v) for v in self.variables}

    def monomial(self, mono: Monomial, c=1) -> Poly:
        c = self.coeffs.coerce(c)
        return Poly(self, {tuple(mono): c} if c != 0 else {})

    def from_terms(self, terms: Terms) -> Poly:
        return Poly(self, {tuple(m): c for m, c in terms.items() if c != 0})

    def parse(self, text: str) -> Poly:
        return parse_poly(text, self)

    def element(self, value) -> Poly:
        """Accept a Poly, text or scalar and return an element in normal form."""
        if isinstance(value, Poly):
            return self.coerce(value)
        if isinstance(value, str):
            return self.parse(value)
        return self.const(value)

    def transfer(self, f: Poly) -> Poly:
        """Re-index f onto this ring's variables by name, without reduction."""
        if f.ring is self:
            return f
        if not _coeff_compatible(self.coeffs, f.ring.coeffs):
            raise RingMismatchError(
                f"coefficients {f.ring.coeffs.name} do not embed in {self.coeffs.name}"
            )
        if f.ring.variables == self.variables:
            return Poly(self, dict(f.terms))
        positions = []
        for i, v in enumerate(f.ring.variables):
            if v in self.index:
                positions.append((i, self.index[v]))
            elif any(m[i] for m in f.terms):
                raise RingMismatchError(f"variable {v!r} is not declared in {self.describe()}")
        out: Terms = {}
        for m, c in f.terms.items():
            mono = [0] * self.nvars
            for i, j in positions:
                mono[j] = m[i]
            out[tuple(mono)] = c
        return Poly(self, out)

    def coerce(self, f: Poly) -> Poly:
        """Move f into this ring by variable names and reduce."""
        return self.normal_form(self.transfer(f))

    # normal forms

    def normal_form(self, f: Poly) -> Poly:
        if f.ring is not self:
            f = self.transfer(f)
        if not self._divisors:
            return f
        return Poly(self, reduce_terms(f.terms, self._divisors, self.order, self.coeffs))

    reduce = normal_form

    def mul(self, f: Poly, g: Poly) -> Poly:
        return self.normal_form(f * g)

    def pow(self, f: Poly, e: int) -> Poly:
        result = self.one()
        base = self.normal_form(f)
        while e:
            if e & 1:
                result = self.normal_form(result * base)
            e >>= 1
            if e:
                base = self.normal_form(base * base)
        return result

    def product(self, factors: Iterable[Poly]) -> Poly:
        result = self.one()
        for f in factors:
            result = self.normal_form(result * f)
        return result

    def equal(self, f: Poly, g: Poly) -> bool:
        return self.normal_form(f - g).is_zero()

    # structure

    def free(self) -> "PresentedRing":
        """The polynomial ring on the same variables, without relations."""
        if not self.relations:
            return self
        if self._free is None:
            self._free = PresentedRing(self.variables, self.coeffs, self.order,
                                       params=self.params)
        return self._free

    @property
    def is_finite_dimensional(self) -> bool:
        if not self.coeffs.is_field:
            return False
        return self._pure_power_bounds() is not None

    def _pure_power_bounds(self) -> Optional[List[int]]:
        bounds = []
        for i in range(self.nvars):
            powers = [m[i] for m in self.leading_monomials
                      if m[i] and all(e == 0 for j, e in enumerate(m) if j != i)]
            if not powers:
                return None
            bounds.append(min(powers))
        return bounds

    def standard_monomials(self) -> Tuple[Monomial, ...]:
        """Monomials divisible by no leading monomial, ascending in the order."""
        if self._standard is None:
            bounds = self._pure_power_bounds()
            if bounds is None or not self.coeffs.is_field:
                raise LevelforgeError(f"{self.describe()} is not finite-dimensional")
            self._standard = standard_monomials_for(self.leading_monomials, bounds, self.order)
        return self._standard

    @property
    def dimension(self) -> int:
        return len(self.standard_monomials())

    def coordinates(self, f: Poly) -> List:
        """Coefficient vector of nf(f) in the standard-monomial basis."""
        f = self.normal_form(f)
        zero = self.coeffs.zero
        return [f.terms.get(m, zero) for m in self.standard_monomials()]

    def from_coordinates(self, vec: Sequence) -> Poly:
        return self.from_terms(dict(zip(self.standard_monomials(), vec)))

    def random_element(self, rng: random.Random, nterms: int = 4) -> Poly:
        if self.is_finite_dimensional:
            pool = list(self.standard_monomials())
        else:
            pool = [m for m in monomials_in_box([3] * self.nvars) if sum(m) <= 2]
        terms = {}
        for _ in range(nterms):
            terms[rng.choice(pool)] = self.coeffs.random_element(rng)
        return self.normal_form(self.from_terms(terms))

    def base_ring(self) -> "PresentedRing":
        """The ring of base parameters with the relations that involve only them."""
        keep = [self.index[v] for v in self.params]
        rels = [b for b in self.basis if all(i in keep for i in b.support())]
        base = PresentedRing(self.params, self.coeffs, self.order)
        return PresentedRing(self.params, self.coeffs, self.order,
                             relations=[base.transfer(b) for b in rels],
                             params=self.params)

    def specialize(self, values: Mapping[str, object]) -> Tuple["PresentedRing", "RingMap"]:
        """
        Substitute constants, given as coefficient-ring elements, for base parameters.

        Returns:
            The specialized ring and the quotient map onto it
        """
        for v in values:
            if v not in self.params:
                raise ParseError(f"{v!r} is not a base parameter of {self.describe()}")
        keep = [v for v in self.variables if v not in values]
        free = PresentedRing(keep, self.coeffs, self.order,
                             params=[v for v in self.params if v not in values])
        images = {v: free.scalar(c) for v, c in values.items()}
        images.update({v: free.var(v) for v in keep})
        substitution = RingMap(self.free(), free, images, check=False)
        rels = [substitution(b) for b in self.basis]
        target = PresentedRing(keep, self.coeffs, self.order, relations=rels,
                               params=free.params)
        images = {v: target.scalar(c) for v, c in values.items()}
        return target, RingMap(self, target, images)

    def inclusion(self, i: int) -> "RingMap":
        """Inclusion of the base ring's i-th tensor factor (1-based)."""
        if self.tensor_of is None:
            raise LevelforgeError(f"{self.describe()} is not a tensor power")
        base, k = self.tensor_of
        if not 1 <= i <= k:
            raise ValueError(f"tensor factor {i} out of range 1..{k}")
        images = {v: self.var(copy_name(v, i)) for v in base.fiber_vars}
        return RingMap(base, self, images, check=False)


def standard_monomials_for(leading: Sequence[Monomial], bounds: Sequence[int],
                           order: MonomialOrder) -> Tuple[Monomial, ...]:
    found = [m for m in monomials_in_box(bounds)
             if not any(divides(lm, m) for lm in leading)]
    return tuple(sorted(found, key=order.key))


def copy_name(v: str, i: int) -> str:
    return f"{v}_{i}"


def ring_create(variables: Sequence[str], coeffs: CoefficientRing,
                order: Union[str, MonomialOrder] = "degrevlex",
                relations: Sequence[Union[str, Poly]] = (),
                params: Sequence[str] = (), name: Optional[str] = None) -> PresentedRing:
    """
    Create a presented ring.

    Args:
        variables: Variable names, in order
        coeffs: Coefficient ring
        order: "degrevlex", "lex" or a MonomialOrder
        relations: Relation polynomials (text or Poly)
        params: Names of base parameters among the variables
        name: Optional display name

    Returns:
        PresentedRing with a cached Gröbner basis of its relations
    """
    return PresentedRing(variables, coeffs, order, relations, params, name)


def tensor_power(R: PresentedRing, k: int) -> PresentedRing:
    """
    R tensored with itself k times over its base.

    Every fiber variable v becomes v_1, ..., v_k; base parameters and their
    relations are shared. Each copy of each fiber relation is included.
    """
    if k < 1:
        raise ValueError("tensor power must be >= 1")
    variables = [copy_name(v, i) for i in range(1, k + 1) for v in R.fiber_vars] + list(R.params)
    free = PresentedRing(variables, R.coeffs, R.order, params=R.params)
    rels = []
    fiber_idx = {R.index[v] for v in R.fiber_vars}
    for b in R.basis:
        if not any(i in fiber_idx for i in b.support()):
            rels.append(free.transfer(b))
            continue
        for i in range(1, k + 1):
            rename = {v: copy_name(v, i) for v in R.fiber_vars}
            rels.append(rename_variables(b, free, rename))
    name = f"{R.name}^({k})" if R.name else None
    return PresentedRing(variables, R.coeffs, R.order, relations=rels,
                         params=R.params, name=name, tensor_of=(R, k))


def tensor_square(R: PresentedRing) -> PresentedRing:
    """R ⊗ R with inclusions ``inclusion(1)`` and ``inclusion(2)``."""
    return tensor_power(R, 2)


def rename_variables(f: Poly, target: PresentedRing, rename: Mapping[str, str]) -> Poly:
    out: Terms = {}
    pos = [(i, target.index[rename.get(v, v)]) for i, v in enumerate(f.ring.variables)]
    for m, c in f.terms.items():
        mono = [0] * target.nvars
        for i, j in pos:
            if m[i]:
                mono[j] = m[i]
        out[tuple(mono)] = c
    return Poly(target, out)


class RingMap:
    """
    A ring homomorphism given by the images of the source variables.

    Source variables without an explicit image are sent to the target
    variable of the same name. Unless ``check`` is False, construction
    verifies that every relation of the source maps to zero.
    """

    def __init__(self, source: PresentedRing, target: PresentedRing,
                 images: Union[Mapping[str, object], Sequence[object]],
                 check: bool = True):
        self.source = source
        self.target = target
        if not _coeff_compatible(source.coeffs, target.coeffs):
            raise RingMismatchError(
                f"coefficients {source.coeffs.name} do not map to {target.coeffs.name}"
            )
        if not isinstance(images, Mapping):
            images = list(images)
            if len(images) != source.nvars:
                raise ValueError(
                    f"expected {source.nvars} images, got {len(images)}"
                )
            images = dict(zip(source.variables, images))
        self.images: Dict[str, Poly] = {}
        for v in source.variables:
            if v in images:
                self.images[v] = target.element(images[v])
            elif v in target.index:
                self.images[v] = target.var(v)
            else:
                raise ValueError(f"no image given for source variable {v!r}")
        unknown = set(images) - set(source.variables)
        if unknown:
            raise ParseError(f"images given for undeclared variables {sorted(unknown)}")
        self._image_list = [self.images[v] for v in source.variables]
        self._powers: Dict[Tuple[int, int], Poly] = {}
        if check:
            for r in source.basis:
                if not self.apply(r).is_zero():
                    raise WellDefinednessError(
                        f"relation {r} does not map to zero in {target.describe()}"
                    )

    def _power(self, i: int, e: int) -> Poly:
        key = (i, e)
        cached = self._powers.get(key)
        if cached is None:
            if e == 1:
                cached = self._image_list[i]
            else:
                half = self._power(i, e // 2)
                cached = self.target.normal_form(half * half)
                if e % 2:
                    cached = self.target.normal_form(cached * self._image_list[i])
            self._powers[key] = cached
        return cached

    def apply(self, f: Poly) -> Poly:
        T = self.target
        coeffs = T.coeffs
        if f.ring.variables != self.source.variables:
            f = self.source.transfer(f)
        acc: Terms = {}
        for m, c in f.terms.items():
            prod: Optional[Poly] = None
            for i, e in enumerate(m):
                if e:
                    pw = self._power(i, e)
                    prod = pw if prod is None else T.normal_form(prod * pw)
            if prod is None:
                items = ((T._zero_mono, coeffs.one),)
            else:
                items = prod.terms.items()
            for tm, tc in items:
                val = coeffs.mul(tc, c)
                old = acc.get(tm)
                if old is not None:
                    val = coeffs.add(old, val)
                if val == 0:
                    acc.pop(tm, None)
                else:
                    acc[tm] = val
        return T.normal_form(Poly(T, acc))

    __call__ = apply

    def then(self, other: "RingMap") -> "RingMap":
        """The composite ``other ∘ self``."""
        if other.source != self.target:
            raise RingMismatchError("composite of maps with mismatched rings")
        images = {v: other.apply(img) for v, img in self.images.items()}
        return RingMap(self.source, other.target, images, check=False)

    def __repr__(self) -> str:
        shown = ", ".join(f"{v} -> {img}" for v, img in self.images.items())
        return f"RingMap({shown})"


def ring_hom(source: PresentedRing, target: PresentedRing,
             images: Union[Mapping[str, object], Sequence[object]]) -> RingMap:
    """Build a ring map, verifying that source relations vanish in the target."""
    return RingMap(source, target, images)


def normal_form(f: Poly, R: PresentedRing) -> Poly:
    return R.normal_form(f)


# Text codec

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} at position {pos} in {text!r}")
        num, ident, op = match.groups()
        if num is not None:
            tokens.append(("num", num))
        elif ident is not None:
            tokens.append(("ident", ident))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = match.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


class _Parser:
    def __init__(self, text: str, ring: PresentedRing):
        self.text = text
        self.ring = ring
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of input in {self.text!r}")
        self.pos += 1
        return tok

    def parse(self) -> Poly:
        if not self.tokens:
            raise ParseError("empty polynomial text")
        result = self.expr()
        if self.peek() is not None:
            raise ParseError(f"unexpected token {self.peek()[1]!r} in {self.text!r}")
        return result

    def expr(self) -> Poly:
        result = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> Poly:
        result = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                result = result * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise ParseError(f"division by a non-constant or zero in {self.text!r}")
                result = result.scale(self.ring.coeffs.inv(rhs.constant_term()))
        return result

    def unary(self) -> Poly:
        if self.peek() in (("op", "-"), ("op", "+")):
            op = self.take()[1]
            inner = self.unary()
            return -inner if op == "-" else inner
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, value = self.take()
            if kind != "num":
                raise ParseError(f"exponent must be a nonnegative integer in {self.text!r}")
            return base ** int(value)
        return base

    def atom(self) -> Poly:
        kind, value = self.take()
        if kind == "num":
            return self.ring.const(int(value))
        if kind == "ident":
            if value not in self.ring.index:
                raise ParseError(f"undeclared variable {value!r} in {self.text!r}")
            return self.ring.var(value)
        if value == "(":
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError(f"missing ')' in {self.text!r}")
            return inner
        raise ParseError(f"unexpected token {value!r} in {self.text!r}")


def parse_poly(text: str, ring: PresentedRing, reduce: bool = True) -> Poly:
    """
    Parse polynomial text such as ``a^2*b + 2*s*t`` in a ring.

    Integers are interpreted in the coefficient ring; ``/`` divides by a
    nonzero constant; parentheses and ``**`` are accepted.
    """
    f = _Parser(text, ring).parse()
    return ring.normal_form(f) if reduce else f


def format_monomial(mono: Monomial, variables: Sequence[str]) -> str:
    parts = []
    for v, e in zip(variables, mono):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def format_poly(f: Poly) -> str:
    """Canonical text: terms in descending order, unit coefficients omitted."""
    if not f.terms:
        return "0"
    coeffs = f.ring.coeffs
    pieces = []
    for m, c in f.sorted_terms():
        negative = False
        if coeffs.characteristic == 0 and c < 0:
            negative = True
            c = -c
        mono = format_monomial(m, f.ring.variables)
        cstr = coeffs.to_str(c)
        if not mono:
            body = cstr
        elif c == coeffs.one:
            body = mono
        else:
            body = f"{cstr}*{mono}"
        pieces.append((negative, body))
    first_neg, first = pieces[0]
    text = ("-" if first_neg else "") + first
    for negative, body in pieces[1:]:
        text += (" - " if negative else " + ") + body
    return text
