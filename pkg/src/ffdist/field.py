"""Arithmetic in F_q for odd prime powers q = p^k.

Elements are stored in the polynomial basis F_p[t]/(m(t)) as little-endian
coefficient tuples.  Every element also has an integer *index*

    index = c_0 + c_1 p + ... + c_{k-1} p^{k-1},

which is how the vectorized layers (geometry, counting) address elements in
numpy arrays.  For k = 1 the index is simply the residue.

Two arithmetic routes exist on purpose.  ``FieldElement`` operators work
coefficientwise with schoolbook polynomial multiplication and reduction; the
array methods on ``Field`` (``add``, ``mul``, ``pow`` ...) use digit
arithmetic plus discrete log/antilog tables.  The test suite checks one
against the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import UsageError

# envelope in which irreducibility is checked by exhaustive factor search
MAX_EXT_DEGREE = 4
MAX_EXT_CHAR = 13


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m, coefficients mod p."""
    r = _trim([x % p for x in a])
    dm = len(m) - 1
    while len(r) - 1 >= dm:
        lead = r[-1]
        shift = len(r) - 1 - dm
        for i, mi in enumerate(m):
            r[shift + i] = (r[shift + i] - lead * mi) % p
        _trim(r)
    return r


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Exhaustive test: no monic factor of degree 1..k//2 divides ``modulus``."""
    k = len(modulus) - 1
    if k < 1 or modulus[-1] % p != 1:
        return False
    if k == 1:
        return True
    for deg in range(1, k // 2 + 1):
        for low in product(range(p), repeat=deg):
            if not _poly_mod(modulus, list(low) + [1], p):
                return False
    return True


class Field:
    """The finite field F_q, q = p^k, p an odd prime.

    >>> F9 = Field(3, 2, (1, 0, 1))    # F_3[t]/(t^2 + 1)
    >>> t = F9((0, 1))
    >>> t * t == F9(2)
    True
    """

    def __init__(self, p: int, k: int = 1, modulus: Sequence[int] | None = None):
        p, k = int(p), int(k)
        if not is_prime(p):
            raise UsageError(f"characteristic {p} is not prime")
        if p == 2:
            raise UsageError("characteristic 2 is not supported")
        if k < 1:
            raise UsageError(f"extension degree must be >= 1, got {k}")
        if k == 1:
            if modulus is not None and len(modulus) != 2:
                raise UsageError("prime fields take no modulus")
            modulus = None
        else:
            if modulus is None:
                raise UsageError(f"F_{p}^{k} needs an explicit irreducible modulus")
            if k > MAX_EXT_DEGREE or p > MAX_EXT_CHAR:
                raise UsageError(
                    f"extension fields are supported for k <= {MAX_EXT_DEGREE}, "
                    f"p <= {MAX_EXT_CHAR}; got p={p}, k={k}"
                )
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise UsageError(f"modulus must be monic of degree {k}: {modulus}")
            if not is_irreducible(modulus, p):
                raise UsageError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus: tuple[int, ...] | None = modulus

    # identity ---------------------------------------------------------------

    @property
    def _key(self):
        return (self.p, self.k, self.modulus)

    def __eq__(self, other):
        return isinstance(other, Field) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        if self.k == 1:
            return f"Field({self.p})"
        return f"Field({self.p}, {self.k}, {self.modulus})"

    # elements ---------------------------------------------------------------

    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise UsageError(f"element of {value.field!r} used in {self!r}")
            return value
        if isinstance(value, str):
            return self.decode(value)
        if isinstance(value, (tuple, list)):
            if len(value) != self.k:
                raise UsageError(f"expected {self.k} coefficients, got {len(value)}")
            return FieldElement(self, tuple(int(c) % self.p for c in value))
        if isinstance(value, (int, np.integer)):
            value = int(value)
            if self.k == 1:
                return FieldElement(self, (value % self.p,))
            if not 0 <= value < self.q:
                raise UsageError(f"element index {value} out of range for q={self.q}")
            return self.from_index(value)
        raise UsageError(f"cannot interpret {value!r} as an element of {self!r}")

    def from_index(self, index: int) -> FieldElement:
        coeffs = []
        for _ in range(self.k):
            index, c = divmod(index, self.p)
            coeffs.append(c)
        return FieldElement(self, tuple(coeffs))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, (0,) * self.k)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, (1,) + (0,) * (self.k - 1))

    def elements(self) -> Iterator[FieldElement]:
        for i in range(self.q):
            yield self.from_index(i)

    # text encoding ----------------------------------------------------------

    def encode(self, e: FieldElement | int) -> str:
        """Decimal residue for k = 1, colon-separated coefficients otherwise."""
        if not isinstance(e, FieldElement):
            e = self(int(e))
        if self.k == 1:
            return str(e.coeffs[0])
        return ":".join(str(c) for c in e.coeffs)

    def decode(self, text: str) -> FieldElement:
        parts = text.strip().split(":")
        try:
            vals = [int(x) for x in parts]
        except ValueError:
            raise UsageError(f"malformed field element {text!r}") from None
        if len(vals) != self.k:
            raise UsageError(f"element {text!r} needs {self.k} coefficient(s)")
        if any(not 0 <= v < self.p for v in vals):
            raise UsageError(f"coefficient out of range in {text!r}")
        return FieldElement(self, tuple(vals))

    # scalar polynomial arithmetic -------------------------------------------

    def _mul_coeffs(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        p = self.p
        if self.k == 1:
            return ((a[0] * b[0]) % p,)
        prod_ = [0] * (2 * self.k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod_[i + j] += ai * bj
        r = _poly_mod(prod_, self.modulus, p)
        return tuple(r + [0] * (self.k - len(r)))

    # array arithmetic on element indices ------------------------------------

    @cached_property
    def _digit_weights(self) -> np.ndarray:
        return self.p ** np.arange(self.k, dtype=np.int64)

    def add(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a + b) % self.p
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
        for w in self._digit_weights:
            out += (((a // w) + (b // w)) % self.p) * w
        return out

    def neg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.k == 1:
            return (-a) % self.p
        out = np.zeros_like(a)
        for w in self._digit_weights:
            out += ((-(a // w)) % self.p) * w
        return out

    def sub(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a - b) % self.p
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
        for w in self._digit_weights:
            out += (((a // w) - (b // w)) % self.p) * w
        return out

    @cached_property
    def generator(self) -> FieldElement:
        """Smallest-index primitive element."""
        order = self.q - 1
        factors = prime_factors(order)
        for i in range(2, self.q):
            g = self.from_index(i)
            if all(g ** (order // f) != self.one for f in factors):
                return g
        raise AssertionError("no primitive element found")

    @cached_property
    def _log_tables(self) -> tuple[np.ndarray, np.ndarray]:
        exp = np.empty(self.q - 1, dtype=np.int64)
        log = np.full(self.q, -1, dtype=np.int64)
        g = self.generator.coeffs
        x = self.one.coeffs
        w = [self.p**i for i in range(self.k)]
        for e in range(self.q - 1):
            idx = sum(c * wi for c, wi in zip(x, w))
            exp[e] = idx
            log[idx] = e
            x = self._mul_coeffs(x, g)
        if (log[1:] < 0).any():
            raise AssertionError("generator does not span the multiplicative group")
        return exp, log

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a * b) % self.p
        exp, log = self._log_tables
        out = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def pow(self, a, s: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if s < 0:
            raise UsageError("negative exponents are not supported")
        if s == 0:
            return np.ones_like(a)
        exp, log = self._log_tables
        out = exp[(log[a] * s) % (self.q - 1)]
        return np.where(a == 0, 0, out)

    def power_table(self, s: int) -> np.ndarray:
        """``t[i]`` is the index of element(i)**s."""
        return self.pow(np.arange(self.q, dtype=np.int64), s)

    def scale_table(self, c: int) -> np.ndarray:
        """``t[i]`` is the index of c * element(i)."""
        return self.mul(np.full(self.q, c, dtype=np.int64), np.arange(self.q, dtype=np.int64))


@dataclass(frozen=True, slots=True)
class FieldElement:
    field: Field
    coeffs: tuple[int, ...]

    @property
    def index(self) -> int:
        p = self.field.p
        return sum(c * p**i for i, c in enumerate(self.coeffs))

    def __int__(self):
        return self.index

    def __index__(self):
        return self.index

    def __repr__(self):
        return f"<{self.field.encode(self)} in F_{self.field.q}>"

    def __str__(self):
        return self.field.encode(self)

    def __lt__(self, other):
        return self.index < _same(self, other).index

    def _check(self, other) -> FieldElement:
        # plain integers in arithmetic mean n * 1, not an element index
        if isinstance(other, (int, np.integer)):
            F = self.field
            return FieldElement(F, (int(other) % F.p,) + (0,) * (F.k - 1))
        return _same(self, other)

    def __add__(self, other):
        other = self._check(other)
        p = self.field.p
        return FieldElement(self.field, tuple((x + y) % p for x, y in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple((-x) % p for x in self.coeffs))

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field._mul_coeffs(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, s: int):
        if s < 0:
            raise UsageError("negative exponents are not supported")
        result = self.field.one
        base = self
        while s:
            if s & 1:
                result = result * base
            base = base * base
            s >>= 1
        return result

    def __bool__(self):
        return any(self.coeffs)


def _same(a: FieldElement, b) -> FieldElement:
    if not isinstance(b, FieldElement):
        raise UsageError(f"expected a field element, got {b!r}")
    if a.field != b.field:
        raise UsageError(f"mixed fields: {a.field!r} and {b.field!r}")
    return b


def fe_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + _same(a, b)


def fe_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * _same(a, b)


def fe_pow(a: FieldElement, s: int) -> FieldElement:
    """Square-and-multiply power.  ``fe_pow(0, 0)`` is 1 by convention."""
    return a**s


def parse_field(text: str, modulus: str | Iterable[int] | None = None) -> Field:
    """Parse ``"7"``, ``"9"`` or ``"3^2"`` (with a modulus for k > 1)."""
    text = text.strip()
    try:
        if "^" in text:
            p_s, k_s = text.split("^", 1)
            p, k = int(p_s), int(k_s)
        else:
            q = int(text)
            p, k = _split_prime_power(q)
    except ValueError:
        raise UsageError(f"malformed field {text!r}") from None
    if isinstance(modulus, str):
        try:
            modulus = [int(c) for c in modulus.split(":")]
        except ValueError:
            raise UsageError(f"malformed modulus {modulus!r}") from None
    return Field(p, k, None if modulus is None else tuple(modulus))


def _split_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise UsageError(f"{q} is not a prime power")
    factors = prime_factors(q)
    if len(factors) != 1:
        raise UsageError(f"{q} is not a prime power")
    p = factors[0]
    k = 0
    while q > 1:
        q //= p
        k += 1
    return p, k
