"""
Exact coefficient arithmetic for levelforge.

This module provides the coefficient rings every polynomial computation runs
over: prime fields F_p, extension fields F_{p^k}, truncated p-adic integers
Z/p^N and the rationals. It also hosts the Teichmüller character and the small
amount of modular linear algebra the higher layers need.

Ring objects are stateless apart from lookup tables and are safe to share
between threads and to pickle into worker processes.
"""

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np


MAX_PRIME = 97
MAX_FIELD_SIZE = 2 ** 20

Rational = Fraction


class LevelforgeError(Exception):
    """Base class of every error raised by levelforge."""


class ArithmeticDomainError(LevelforgeError):
    """Raised for invalid moduli, degrees or out-of-range parameters."""


class NotInvertibleError(LevelforgeError):
    """Raised when inverting a non-unit."""


class LinearSystemError(LevelforgeError):
    """Raised when a modular linear system is inconsistent or underdetermined."""


def is_prime(n: int) -> bool:
    """Trial division primality test (adequate for the p <= 97 range)."""
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise ArithmeticDomainError(f"{p} is not prime")
    if p > MAX_PRIME:
        raise ArithmeticDomainError(f"prime {p} exceeds supported bound {MAX_PRIME}")


def factorial_mod(n: int, m: int) -> int:
    """Return n! mod m."""
    return reduce(lambda acc, k: acc * k % m, range(1, n + 1), 1 % m)


def prime_factors(n: int) -> List[int]:
    """Distinct prime factors of n, ascending."""
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        factors.append(n)
    return factors


class CoefficientRing:
    """
    Common interface of coefficient rings.

    Elements are plain Python values (``int`` or ``Fraction``); the ring object
    carries the arithmetic. ``modulus`` is set for rings whose elements are
    integers reduced modulo a fixed number, which lets hot loops in the
    polynomial layer use integer arithmetic directly.
    """

    name = "ring"
    characteristic = 0
    is_field = False
    modulus: Optional[int] = None

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def key(self) -> Tuple:
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        return isinstance(other, CoefficientRing) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return self.name

    def from_int(self, n: int):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def is_unit(self, a) -> bool:
        try:
            self.inv(a)
        except NotInvertibleError:
            return False
        return True

    def is_zero(self, a) -> bool:
        return a == 0

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def coerce(self, value):
        """Accept an int (or an element of this ring) and return an element."""
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return self.from_int(value)
        return value

    def element(self, value):
        """Accept an element of this ring; an int is read as its encoding."""
        return self.coerce(value)

    def to_str(self, a) -> str:
        return str(a)

    def random_element(self, rng: random.Random):
        raise NotImplementedError


class PrimeField(CoefficientRing):
    """The prime field F_p with elements represented by residues 0..p-1."""

    is_field = True

    def __init__(self, p: int):
        _require_prime(p)
        self.p = p
        self.characteristic = p
        self.modulus = p
        self.size = p
        self.name = f"GF({p})"

    def key(self) -> Tuple:
        return ("GF", self.p)

    def from_int(self, n: int) -> int:
        return n % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise NotInvertibleError(f"0 has no inverse in {self.name}")
        return pow(a, -1, self.p)

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def units(self) -> Iterator[int]:
        return iter(range(1, self.p))

    def primitive_element(self) -> int:
        return primitive_root(self.p)

    def frobenius(self, a: int) -> int:
        return a

    def random_element(self, rng: random.Random) -> int:
        return rng.randrange(self.p)


def primitive_root(p: int) -> int:
    """Least generator of the multiplicative group of F_p."""
    _require_prime(p)
    if p == 2:
        return 1
    factors = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in factors):
            return g
    raise ArithmeticDomainError(f"no primitive root found mod {p}")


# Dense polynomials over F_p as coefficient lists, lowest degree first.
# Only used to build extension fields.

def _fp_trim(f: List[int]) -> List[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _fp_mod(f: List[int], g: List[int], p: int) -> List[int]:
    f = _fp_trim(list(f))
    g = _fp_trim(list(g))
    inv_lead = pow(g[-1], -1, p)
    while len(f) >= len(g):
        factor = f[-1] * inv_lead % p
        shift = len(f) - len(g)
        for i, c in enumerate(g):
            f[shift + i] = (f[shift + i] - factor * c) % p
        _fp_trim(f)
    return f


def _fp_mulmod(f: List[int], g: List[int], m: List[int], p: int) -> List[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _fp_mod(out, m, p)


def _fp_powmod(f: List[int], e: int, m: List[int], p: int) -> List[int]:
    result = [1]
    base = _fp_mod(f, m, p)
    while e:
        if e & 1:
            result = _fp_mulmod(result, base, m, p)
        base = _fp_mulmod(base, base, m, p)
        e >>= 1
    return result


def _fp_gcd(f: List[int], g: List[int], p: int) -> List[int]:
    f = _fp_trim(list(f))
    g = _fp_trim(list(g))
    while g:
        f, g = g, _fp_mod(f, g, p)
    return f


def _fp_has_root(f: List[int], p: int) -> bool:
    for x in range(p):
        acc = 0
        for c in reversed(f):
            acc = (acc * x + c) % p
        if acc == 0:
            return True
    return False


def is_irreducible_mod_p(f: Sequence[int], p: int) -> bool:
    """
    Irreducibility of a monic polynomial over F_p.

    Degrees up to 3 are decided by the absence of roots; higher degrees by
    distinct-degree factorization (gcd(x^{p^i} - x, f) = 1 for i <= k/2).
    """
    f = _fp_trim([c % p for c in f])
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    if k <= 3:
        return not _fp_has_root(f, p)
    x = [0, 1]
    power = x
    for _ in range(1, k // 2 + 1):
        power = _fp_powmod(power, p, f, p)
        diff = list(power) + [0] * max(0, 2 - len(power))
        diff[1] = (diff[1] - 1) % p
        if len(_fp_gcd(f, _fp_trim(diff), p)) > 1:
            return False
    return True


def least_irreducible(p: int, k: int) -> List[int]:
    """
    Lexicographically least monic irreducible polynomial of degree k over F_p.

    Candidates x^k + a_{k-1}x^{k-1} + ... + a_0 are scanned with the tuple
    (a_{k-1}, ..., a_0) increasing. Returned lowest degree first.
    """
    for tail in itertools.product(range(p), repeat=k):
        candidate = list(reversed(tail)) + [1]
        if is_irreducible_mod_p(candidate, p):
            return candidate
    raise ArithmeticDomainError(f"no irreducible polynomial of degree {k} over GF({p})")


class ExtField(CoefficientRing):
    """
    The finite field F_{p^k} = F_p[z]/(modulus).

    An element is the integer whose base-p digits are its coefficient vector
    (c_0, ..., c_{k-1}) in the power basis of the generator z; so the prime
    subfield is 0..p-1 and z itself is the integer p. Multiplication runs
    through discrete log tables built from a primitive element.
    """

    is_field = True

    def __init__(self, p: int, k: int, modulus: Optional[Sequence[int]] = None,
                 generator_name: str = "z"):
        _require_prime(p)
        if k < 1:
            raise ArithmeticDomainError(f"extension degree must be >= 1, got {k}")
        if p ** k > MAX_FIELD_SIZE:
            raise ArithmeticDomainError(f"field size {p}^{k} exceeds {MAX_FIELD_SIZE}")
        if modulus is None:
            modulus = least_irreducible(p, k)
        modulus = [c % p for c in modulus]
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ArithmeticDomainError("modulus must be monic of the field degree")
        if not is_irreducible_mod_p(modulus, p):
            raise ArithmeticDomainError(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.k = k
        self.size = p ** k
        self.characteristic = p
        self.modulus_poly = tuple(modulus)
        self.generator_name = generator_name
        self.name = f"GF({p}^{k})" if k > 1 else f"GF({p})"
        self._build_tables()

    def key(self) -> Tuple:
        return ("GFq", self.p, self.k, self.modulus_poly)

    def vector(self, a: int) -> Tuple[int, ...]:
        """Coefficient vector (c_0, ..., c_{k-1}) of an element."""
        digits = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            digits.append(r)
        return tuple(digits)

    def from_vector(self, vec: Sequence[int]) -> int:
        if len(vec) > self.k:
            raise ArithmeticDomainError(f"vector of length {len(vec)} does not fit {self.name}")
        return sum((c % self.p) * self.p ** i for i, c in enumerate(vec))

    def _build_tables(self) -> None:
        q = self.size
        p = self.p
        m = list(self.modulus_poly)

        def poly_mul(a: int, b: int) -> int:
            prod = _fp_mulmod(_fp_trim(list(self.vector(a))), _fp_trim(list(self.vector(b))), m, p)
            return self.from_vector(prod)

        factors = prime_factors(q - 1) if q > 2 else []
        generator = None
        for candidate in range(1, q):
            power = 1
            order_ok = True
            for r in factors:
                e = (q - 1) // r
                power = 1
                base = candidate
                while e:
                    if e & 1:
                        power = poly_mul(power, base)
                    base = poly_mul(base, base)
                    e >>= 1
                if power == 1:
                    order_ok = False
                    break
            if order_ok:
                generator = candidate
                break
        if generator is None:
            raise ArithmeticDomainError(f"no primitive element in {self.name}")
        self._primitive = generator
        self._exp = [0] * (2 * (q - 1))
        self._log = [0] * q
        value = 1
        for i in range(q - 1):
            self._exp[i] = value
            self._log[value] = i
            value = poly_mul(value, generator)
        for i in range(q - 1, 2 * (q - 1)):
            self._exp[i] = self._exp[i - (q - 1)]

    def from_int(self, n: int) -> int:
        return n % self.p

    def element(self, value) -> int:
        if isinstance(value, int) and 0 <= value < self.size:
            return int(value)
        raise ArithmeticDomainError(f"{value!r} is not an element of {self.name}")

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        p = self.p
        out = 0
        scale = 1
        while a or b:
            a, da = divmod(a, p)
            b, db = divmod(b, p)
            out += ((da + db) % p) * scale
            scale *= p
        return out

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        p = self.p
        out = 0
        scale = 1
        while a:
            a, da = divmod(a, p)
            out += (-da % p) * scale
            scale *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise NotInvertibleError(f"0 has no inverse in {self.name}")
        return self._exp[(self.size - 1 - self._log[a]) % (self.size - 1)]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise NotInvertibleError(f"0 has no inverse in {self.name}")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.size - 1)]

    def generator(self) -> int:
        """The class of z, i.e. the root of the modulus."""
        return self.p if self.k > 1 else self.from_int(-self.modulus_poly[0])

    def primitive_element(self) -> int:
        return self._primitive

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def elements(self) -> Iterator[int]:
        return iter(range(self.size))

    def units(self) -> Iterator[int]:
        return iter(range(1, self.size))

    def in_prime_field(self, a: int) -> bool:
        return a < self.p

    def to_str(self, a: int) -> str:
        if self.k == 1 or a < self.p:
            return str(a)
        parts = []
        for i, c in enumerate(self.vector(a)):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mono = self.generator_name if i == 1 else f"{self.generator_name}^{i}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return "(" + "+".join(parts) + ")"

    def random_element(self, rng: random.Random) -> int:
        return rng.randrange(self.size)


def field_create(p: int, k: int = 1) -> ExtField:
    """
    Create the field with p^k elements and a reproducible modulus.

    Args:
        p: Prime characteristic
        k: Extension degree

    Returns:
        ExtField whose modulus is the lexicographically least monic
        irreducible polynomial of degree k
    """
    return ExtField(p, k)


class PadicRing(CoefficientRing):
    """The ring Z/p^N of p-adic integers truncated at precision N."""

    def __init__(self, p: int, N: int):
        _require_prime(p)
        if N < 1:
            raise ArithmeticDomainError(f"precision must be >= 1, got {N}")
        self.p = p
        self.N = N
        self.modulus = p ** N
        self.characteristic = self.modulus
        self.is_field = N == 1
        self.name = f"Z/{p}^{N}"

    def key(self) -> Tuple:
        return ("Zp", self.p, self.N)

    def from_int(self, n: int) -> int:
        return n % self.modulus

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def neg(self, a: int) -> int:
        return -a % self.modulus

    def mul(self, a: int, b: int) -> int:
        return a * b % self.modulus

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise NotInvertibleError(f"{a} is not a unit in {self.name}")
        return pow(a, -1, self.modulus)

    def valuation(self, a: int) -> int:
        a %= self.modulus
        if a == 0:
            return self.N
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def random_element(self, rng: random.Random) -> int:
        return rng.randrange(self.modulus)


class RationalField(CoefficientRing):
    """The rational numbers with exact Fraction elements."""

    is_field = True
    characteristic = 0
    name = "QQ"

    def key(self) -> Tuple:
        return ("QQ",)

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def coerce(self, value) -> Fraction:
        return Fraction(value)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise NotInvertibleError("0 has no inverse in QQ")
        return 1 / Fraction(a)

    def to_str(self, a) -> str:
        return str(Fraction(a))

    def random_element(self, rng: random.Random) -> Fraction:
        return Fraction(rng.randint(-9, 9), rng.randint(1, 5))


QQ = RationalField()


@dataclass(frozen=True)
class PadicInt:
    """A residue of Z/p^N, kept in [0, p^N)."""

    p: int
    N: int
    value: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p ** self.N)

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    def _check(self, other) -> "PadicInt":
        if isinstance(other, int):
            return PadicInt(self.p, self.N, other)
        if (other.p, other.N) != (self.p, self.N):
            raise ArithmeticDomainError(
                f"precision mismatch: Z/{self.p}^{self.N} vs Z/{other.p}^{other.N}"
            )
        return other

    def __add__(self, other) -> "PadicInt":
        other = self._check(other)
        return PadicInt(self.p, self.N, self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other) -> "PadicInt":
        other = self._check(other)
        return PadicInt(self.p, self.N, self.value - other.value)

    def __rsub__(self, other) -> "PadicInt":
        return self._check(other) - self

    def __neg__(self) -> "PadicInt":
        return PadicInt(self.p, self.N, -self.value)

    def __mul__(self, other) -> "PadicInt":
        other = self._check(other)
        return PadicInt(self.p, self.N, self.value * other.value)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PadicInt":
        if e < 0:
            return self.inverse() ** (-e)
        return PadicInt(self.p, self.N, pow(self.value, e, self.modulus))

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return (self.value - other) % self.modulus == 0
        if isinstance(other, PadicInt):
            return (self.p, self.N, self.value) == (other.p, other.N, other.value)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.N, self.value))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.p}^{self.N})"

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def valuation(self) -> int:
        return PadicRing(self.p, self.N).valuation(self.value)

    def inverse(self) -> "PadicInt":
        if not self.is_unit():
            raise NotInvertibleError(f"{self} is not a unit")
        return PadicInt(self.p, self.N, pow(self.value, -1, self.modulus))

    def reduce(self, N: int) -> "PadicInt":
        """Reduce to a lower precision."""
        return PadicInt(self.p, min(N, self.N), self.value)


def teichmuller(j: int, p: int, N: int) -> PadicInt:
    """
    Teichmüller lift of a residue class.

    Iterates w <- w^p starting from j; each step fixes one more p-adic digit,
    so the fixed point is reached after at most N iterations. The lift of 0
    is 0.

    Args:
        j: Residue class, 0 <= j < p
        p: Prime
        N: Precision

    Returns:
        The unique w mod p^N with w^p = w and w = j mod p
    """
    _require_prime(p)
    if N < 1:
        raise ArithmeticDomainError(f"precision must be >= 1, got {N}")
    if not 0 <= j < p:
        raise ArithmeticDomainError(f"residue {j} outside [0, {p})")
    modulus = p ** N
    w = j % modulus
    for _ in range(N + 1):
        nxt = pow(w, p, modulus)
        if nxt == w:
            return PadicInt(p, N, w)
        w = nxt
    raise ArithmeticDomainError(f"Teichmüller iteration for {j} mod {p}^{N} did not stabilize")


def teichmuller_table(p: int, N: int) -> Dict[int, PadicInt]:
    """chi(j) for every residue j mod p."""
    return {j: teichmuller(j, p, N) for j in range(p)}


# Modular linear algebra

def rank_mod_p(matrix, p: int) -> int:
    """Rank of an integer matrix over F_p."""
    return len(row_reduce_mod_p(matrix, p))


def row_reduce_mod_p(matrix, p: int) -> np.ndarray:
    """
    Reduced row echelon form over F_p of an integer matrix.

    Returns:
        Array whose rows are the nonzero rows of the RREF
    """
    a = np.array(matrix, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.size == 0:
        return a.reshape(0, a.shape[1] if a.ndim == 2 else 0)
    a %= p
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        candidates = np.nonzero(a[rank:, col])[0]
        if candidates.size == 0:
            continue
        pivot = rank + int(candidates[0])
        if pivot != rank:
            a[[rank, pivot]] = a[[pivot, rank]]
        inv = pow(int(a[rank, col]), -1, p)
        a[rank] = (a[rank] * inv) % p
        others = np.nonzero(a[:, col])[0]
        others = others[others != rank]
        if others.size:
            a[others] = (a[others] - np.outer(a[others, col], a[rank])) % p
        rank += 1
    return a[:rank]


def solve_mod_prime_power(matrix: Sequence[Sequence[int]], rhs: Sequence[int],
                          p: int, N: int) -> List[int]:
    """
    Solve A c = b over Z/p^N when the solution is unique.

    Elimination pivots on units only. Every column must acquire a unit pivot
    (otherwise the system is underdetermined mod p) and every leftover row must
    reduce to 0 = 0 (otherwise the system is inconsistent).

    Raises:
        LinearSystemError: on an inconsistent or underdetermined system
    """
    modulus = p ** N
    rows = [[x % modulus for x in row] + [b % modulus] for row, b in zip(matrix, rhs)]
    ncols = len(matrix[0]) if matrix else 0
    pivot_row = 0
    for col in range(ncols):
        unit_row = next(
            (r for r in range(pivot_row, len(rows)) if rows[r][col] % p != 0), None
        )
        if unit_row is None:
            raise LinearSystemError(f"no unit pivot in column {col}; solution not unique mod {p}")
        rows[pivot_row], rows[unit_row] = rows[unit_row], rows[pivot_row]
        inv = pow(rows[pivot_row][col], -1, modulus)
        rows[pivot_row] = [x * inv % modulus for x in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [(x - factor * y) % modulus for x, y in zip(rows[r], rows[pivot_row])]
        pivot_row += 1
    for r in range(pivot_row, len(rows)):
        if rows[r][-1] % modulus != 0:
            raise LinearSystemError(f"inconsistent equation {r}: 0 = {rows[r][-1]} mod {modulus}")
    return [rows[i][-1] for i in range(ncols)]


def matrices_mod(n: int, modulus: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """All n x n matrices over Z/modulus as row tuples."""
    for entries in itertools.product(range(modulus), repeat=n * n):
        yield tuple(tuple(entries[i * n:(i + 1) * n]) for i in range(n))


def det_mod(matrix: Sequence[Sequence[int]], modulus: int) -> int:
    """Determinant over Z/modulus by cofactor expansion (small n only)."""
    n = len(matrix)
    if n == 1:
        return matrix[0][0] % modulus
    if n == 2:
        return (matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]) % modulus
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        total += (-1) ** j * matrix[0][j] * det_mod(minor, modulus)
    return total % modulus


def general_linear_group(n: int, modulus: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """
    Enumerate GL_n(Z/modulus) by brute force.

    A matrix is invertible iff its determinant is a unit; for a prime power
    modulus p^l that means the determinant is nonzero mod p.
    """
    base = prime_factors(modulus)
    return [
        m for m in matrices_mod(n, modulus)
        if all(det_mod(m, modulus) % r != 0 for r in base)
    ]


def gl_order(n: int, modulus: int) -> int:
    """|GL_n(Z/modulus)| by enumeration."""
    return len(general_linear_group(n, modulus))


def gl_order_formula(n: int, p: int) -> int:
    """|GL_n(F_p)| = prod_{i<n} (p^n - p^i)."""
    out = 1
    for i in range(n):
        out *= p ** n - p ** i
    return out


def rank_two_count(rows: int, cols: int, p: int) -> int:
    """Number of rows x cols matrices of full rank over F_p (rows <= cols)."""
    out = 1
    for i in range(rows):
        out *= p ** cols - p ** i
    return out


# Factory functions
def create_prime_field(p: int) -> PrimeField:
    """Create the prime field F_p."""
    return PrimeField(p)


def create_padic_ring(p: int, N: int) -> PadicRing:
    """Create the ring Z/p^N."""
    return PadicRing(p, N)
