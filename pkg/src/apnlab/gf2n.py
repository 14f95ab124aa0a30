"""Arithmetic in GF(2^n) with plain-int elements and numpy bulk helpers.

Field elements are integers in ``[0, 2^n)`` whose bits are the coefficients of
the polynomial representative (bit i = coefficient of x^i).  A :class:`Field`
carries the modulus and lazily built log/exp tables; :class:`FieldElement` is a
thin operator-overloading wrapper used by the symbolic layers.  Bulk paths
(truth tables, difference counting, rank feeds) work on numpy integer arrays
through the ``*_vec`` methods.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import PreconditionError

__all__ = [
    "DEFAULT_MODULI",
    "Field",
    "FieldElement",
    "SubfieldMap",
    "cube_class",
    "field_from_header",
    "field_new",
    "poly_is_irreducible",
    "primitive_elements",
    "subfield_embedding",
    "subfield_map",
    "trace",
]

# Lexicographically least irreducible polynomial of each degree (bit i is the
# coefficient of x^i), shipped as a fixed table so default fields are stable
# across versions.  Verified by tests against an independent sieve.
DEFAULT_MODULI: dict[int, int] = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201B,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002B,
    17: 0x20009,
    18: 0x40009,
    19: 0x80027,
    20: 0x100009,
    21: 0x200005,
    22: 0x400003,
    23: 0x800021,
    24: 0x100001B,
}

_MAX_TABLE_N = 24  # log/exp tables are built only up to this size


# ---------------------------------------------------------------------------
# GF(2)[x] arithmetic on int-encoded polynomials


def _pdeg(a: int) -> int:
    return a.bit_length() - 1


def _pmod(a: int, m: int) -> int:
    dm = _pdeg(m)
    while _pdeg(a) >= dm:
        a ^= m << (_pdeg(a) - dm)
    return a


def _pmulmod(a: int, b: int, m: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a = _pmod(a << 1, m)
    return _pmod(r, m)


def _pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, _pmod(a, b)
    return a


def _prime_factors(k: int) -> list[int]:
    out = []
    d = 2
    while d * d <= k:
        if k % d == 0:
            out.append(d)
            while k % d == 0:
                k //= d
        d += 1
    if k > 1:
        out.append(k)
    return out


def poly_is_irreducible(p: int) -> bool:
    """Whether the int-encoded polynomial is irreducible over GF(2).

    Uses Rabin's criterion: x^(2^d) == x (mod p) and, for every prime q | d,
    gcd(x^(2^(d/q)) + x, p) == 1.
    """
    d = _pdeg(p)
    if d < 1:
        return False
    if d == 1:
        return True
    if not p & 1:  # x divides p
        return False
    x = 0b10
    t = x
    for _ in range(d):
        t = _pmulmod(t, t, p)
    if t != x:
        return False
    for q in _prime_factors(d):
        t = x
        for _ in range(d // q):
            t = _pmulmod(t, t, p)
        if _pgcd(t ^ x, p) != 1:
            return False
    return True


# ---------------------------------------------------------------------------


class Field:
    """GF(2^n) under a fixed irreducible modulus.

    Elements are ints; the scalar methods (:meth:`mul`, :meth:`inv`, ...) and
    the numpy bulk methods (:meth:`mul_vec`, :meth:`pow_vec`, ...) all share
    this representation.  ``primitive`` is the least element (by bit pattern)
    of multiplicative order 2^n - 1.
    """

    __slots__ = ("n", "modulus", "order", "mult_order", "primitive",
                 "_exp", "_log")

    def __init__(self, n: int, modulus: int | None = None):
        if not 1 <= n <= 64:
            raise PreconditionError(f"field degree in [1, 64], got {n}")
        if modulus is None:
            if n not in DEFAULT_MODULI:
                raise PreconditionError(
                    f"no default modulus for n={n} (defaults cover n <= 24); "
                    "pass modulus explicitly")
            modulus = DEFAULT_MODULI[n]
        if _pdeg(modulus) != n or not poly_is_irreducible(modulus):
            raise PreconditionError(
                f"modulus must be irreducible of degree {n}, got 0x{modulus:x}")
        self.n = n
        self.modulus = modulus
        self.order = 1 << n
        self.mult_order = self.order - 1
        self._exp: np.ndarray | None = None
        self._log: np.ndarray | None = None
        self.primitive = self._find_primitive()

    # -- identity ----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Field) and self.n == other.n
                and self.modulus == other.modulus)

    def __hash__(self) -> int:
        return hash((self.n, self.modulus))

    def __repr__(self) -> str:
        return f"GF(2^{self.n}, modulus=0x{self.modulus:x})"

    def header(self) -> str:
        """One-line serialization: ``n=<int> modulus=0x<hex> primitive=0x<hex>``."""
        return (f"n={self.n} modulus=0x{self.modulus:x} "
                f"primitive=0x{self.primitive:x}")

    # -- scalar arithmetic ---------------------------------------------------

    def _mul_raw(self, a: int, b: int) -> int:
        m, n = self.modulus, self.n
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a >> n:
                a ^= m
        return r

    def mul(self, a: int, b: int) -> int:
        if self._log is not None:
            if a == 0 or b == 0:
                return 0
            return int(self._exp[(int(self._log[a]) + int(self._log[b]))
                                 % self.mult_order])
        return self._mul_raw(a, b)

    def sqr(self, a: int) -> int:
        return self.mul(a, a)

    def pow(self, a: int, e: int) -> int:
        """a**e with the function-semantics conventions 0^0 = 1, 0^e = 0 (e > 0)."""
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("inverse of 0 in " + repr(self))
            return 0
        e %= self.mult_order
        if self._log is not None:
            return int(self._exp[(int(self._log[a]) * e) % self.mult_order])
        r, b = 1, a
        while e:
            if e & 1:
                r = self._mul_raw(r, b)
            b = self._mul_raw(b, b)
            e >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in " + repr(self))
        return self.pow(a, -1)

    def trace_to(self, m: int, a: int) -> int:
        """Relative trace onto the subfield GF(2^m): sum of a^(2^(m*i))."""
        if self.n % m:
            raise PreconditionError(f"trace target degree must divide n: {m} | {self.n} fails")
        acc = 0
        cur = a
        for _ in range(self.n // m):
            acc ^= cur
            for _ in range(m):
                cur = self.sqr(cur)
        return acc

    def _find_primitive(self) -> int:
        if self.mult_order == 1:
            return 1
        ps = _prime_factors(self.mult_order)
        for a in range(2, self.order):
            if all(self.pow(a, self.mult_order // p) != 1 for p in ps):
                return a
        raise AssertionError("no primitive element found")  # pragma: no cover

    # -- elements ------------------------------------------------------------

    def element(self, bits: int) -> "FieldElement":
        if not 0 <= bits < self.order:
            raise PreconditionError(
                f"element bits out of range [0, 2^{self.n}): {bits}")
        return FieldElement(self, bits)

    def coerce(self, value: "FieldElement | int") -> int:
        """Accept an int or a FieldElement of this field; return the int."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise PreconditionError(
                    f"mixed-field operands: {value.field!r} vs {self!r}")
            return value.bits
        bits = int(value)
        if not 0 <= bits < self.order:
            raise PreconditionError(
                f"element bits out of range [0, 2^{self.n}): {bits}")
        return bits

    def primitive_power(self, k: int) -> int:
        """The element primitive**k (k may be negative)."""
        return self.pow(self.primitive, k)

    def elements(self) -> Iterator["FieldElement"]:
        for bits in range(self.order):
            yield FieldElement(self, bits)

    # -- tables and bulk operations -------------------------------------------

    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        if self._exp is None:
            if self.n > _MAX_TABLE_N:
                raise PreconditionError(
                    f"log/exp tables unsupported beyond n={_MAX_TABLE_N}")
            m = self.mult_order
            exp = np.empty(2 * m, dtype=np.uint32)
            log = np.empty(self.order, dtype=np.int64)
            log[0] = -1  # sentinel; bulk paths mask zeros before gathering
            x = 1
            for i in range(m):
                exp[i] = x
                log[x] = i
                x = self._mul_raw(x, self.primitive)
            assert x == 1, "primitive does not have full order"
            exp[m:] = exp[:m]
            self._exp, self._log = exp, log
        return self._exp, self._log

    def all_elements_vec(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.uint32)

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise product of two arrays of field elements."""
        exp, log = self._tables()
        a = np.asarray(a, dtype=np.uint32)
        b = np.asarray(b, dtype=np.uint32)
        nz = (a != 0) & (b != 0)
        la = log[a]
        lb = log[b]
        idx = np.where(nz, la + lb, 0)  # la+lb < 2*mult_order: exp is doubled
        out = exp[idx].astype(np.uint32)
        out[~nz] = 0
        return out

    def mul_scalar_vec(self, c: int, a: np.ndarray) -> np.ndarray:
        """Elementwise c * a for a scalar field element c."""
        a = np.asarray(a, dtype=np.uint32)
        if c == 0:
            return np.zeros_like(a)
        if c == 1:
            return a.copy()
        exp, log = self._tables()
        lc = int(log[c])
        nz = a != 0
        idx = np.where(nz, log[a] + lc, 0)
        out = exp[idx].astype(np.uint32)
        out[~nz] = 0
        return out

    def pow_vec(self, a: np.ndarray, e: int) -> np.ndarray:
        """Elementwise a**e (scalar integer e; 0^0 = 1, 0^e = 0 for e > 0)."""
        exp, log = self._tables()
        a = np.asarray(a, dtype=np.uint32)
        if e == 0:
            return np.ones_like(a)
        m = self.mult_order
        nz = a != 0
        idx = np.where(nz, (log[a] * (e % m)) % m, 0)
        out = exp[idx].astype(np.uint32)
        if e < 0 and not nz.all():
            raise ZeroDivisionError("inverse of 0 in " + repr(self))
        out[~nz] = 0
        return out

    def inv_vec(self, a: np.ndarray) -> np.ndarray:
        return self.pow_vec(a, -1)

    def sqr_vec(self, a: np.ndarray) -> np.ndarray:
        return self.mul_vec(a, a)

    def frob_vec(self, a: np.ndarray, k: int = 1) -> np.ndarray:
        """Elementwise a^(2^k) (k-fold Frobenius)."""
        return self.pow_vec(a, pow(2, k, self.mult_order) if self.mult_order > 1 else 1)

    def trace_vec(self, m: int, a: np.ndarray) -> np.ndarray:
        if self.n % m:
            raise PreconditionError(f"trace target degree must divide n: {m} | {self.n} fails")
        acc = np.zeros_like(np.asarray(a, dtype=np.uint32))
        cur = np.asarray(a, dtype=np.uint32)
        for _ in range(self.n // m):
            acc = acc ^ cur
            cur = self.frob_vec(cur, m)
        return acc


def field_new(n: int, modulus: int | None = None) -> Field:
    """Construct GF(2^n); with no modulus, use the shipped default table."""
    return Field(n, modulus)


_HEADER_RE = re.compile(
    r"^n=(\d+) modulus=0x([0-9a-fA-F]+) primitive=0x([0-9a-fA-F]+)\s*$")


def field_from_header(line: str) -> Field:
    """Parse the ``n=.. modulus=0x.. primitive=0x..`` header line."""
    m = _HEADER_RE.match(line)
    if not m:
        raise PreconditionError(f"malformed field header: {line!r}")
    n, modulus, primitive = int(m.group(1)), int(m.group(2), 16), int(m.group(3), 16)
    f = Field(n, modulus)
    if f.primitive != primitive:
        raise PreconditionError(
            f"header primitive 0x{primitive:x} is not the least generator "
            f"0x{f.primitive:x} of 0x{modulus:x}")
    return f


class FieldElement:
    """An element of a specific :class:`Field`, supporting operator syntax."""

    __slots__ = ("field", "bits")

    def __init__(self, field: Field, bits: int):
        self.field = field
        self.bits = bits

    def _other(self, other: "FieldElement | int") -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise PreconditionError(
                    f"mixed-field operands: {self.field!r} vs {other.field!r}")
            return other.bits
        return self.field.coerce(other)

    def __add__(self, other: "FieldElement | int") -> "FieldElement":
        return FieldElement(self.field, self.bits ^ self._other(other))

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other: "FieldElement | int") -> "FieldElement":
        return FieldElement(self.field, self.field.mul(self.bits, self._other(other)))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "FieldElement":
        return FieldElement(self.field, self.field.pow(self.bits, e))

    def __truediv__(self, other: "FieldElement | int") -> "FieldElement":
        return FieldElement(
            self.field, self.field.mul(self.bits, self.field.inv(self._other(other))))

    def inv(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.bits))

    def trace(self) -> int:
        """Absolute trace, as a bit."""
        return self.field.trace_to(1, self.bits)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.bits == other.bits
        if isinstance(other, int):
            return self.bits == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.bits))

    def __lt__(self, other: "FieldElement") -> bool:
        return self.bits < self._other(other)

    def __int__(self) -> int:
        return self.bits

    __index__ = __int__

    def __bool__(self) -> bool:
        return self.bits != 0

    def __repr__(self) -> str:
        return f"GF(2^{self.field.n}):0x{self.bits:x}"


def trace(field: Field, m: int, z: "FieldElement | int") -> FieldElement:
    """Relative trace of z from GF(2^n) onto its subfield GF(2^m) (m | n)."""
    return FieldElement(field, field.trace_to(m, field.coerce(z)))


def cube_class(field: Field, z: "FieldElement | int") -> str:
    """Classify z as ``'zero'``, ``'cube'`` or ``'noncube'``.

    Cubes form a proper subgroup only when 3 | 2^n - 1, i.e. for even n; for
    odd n every nonzero element is a cube.
    """
    bits = field.coerce(z)
    if bits == 0:
        return "zero"
    if field.n % 2:
        return "cube"
    return "cube" if field.pow(bits, field.mult_order // 3) == 1 else "noncube"


def primitive_elements(field: Field) -> list[FieldElement]:
    """All elements of multiplicative order 2^n - 1, sorted by bit pattern."""
    m = field.mult_order
    if m == 1:
        return [field.element(1)]
    exp, _ = field._tables()
    bits = sorted(int(exp[j]) for j in range(m) if math.gcd(j, m) == 1)
    return [FieldElement(field, b) for b in bits]


# ---------------------------------------------------------------------------
# Subfield embeddings and the pair <-> extension correspondence


@lru_cache(maxsize=None)
def _subfield_root(parent_n: int, parent_modulus: int, comp_n: int,
                   comp_modulus: int) -> int:
    """Least root in the parent field of the component field's modulus."""
    parent = Field(parent_n, parent_modulus)
    zs = parent.all_elements_vec()
    acc = np.zeros_like(zs)
    for i in range(comp_n + 1):
        if (comp_modulus >> i) & 1:
            acc = acc ^ parent.pow_vec(zs, i)
    roots = np.flatnonzero(acc == 0)
    assert roots.size == comp_n, "irreducible modulus must have deg-many roots"
    return int(roots[0])


def subfield_embedding(parent: Field, component: Field) -> np.ndarray:
    """Table of the canonical embedding GF(2^m) -> GF(2^n), m | n.

    Sends the component's polynomial generator to the least parent root of the
    component modulus; entry x of the returned array is the parent image of x.
    """
    if parent.n % component.n:
        raise PreconditionError(
            f"subfield degree must divide parent degree: {component.n} | {parent.n} fails")
    root = _subfield_root(parent.n, parent.modulus, component.n, component.modulus)
    table = np.zeros(component.order, dtype=np.uint32)
    xs = np.arange(component.order, dtype=np.uint32)
    power = np.full(component.order, 1, dtype=np.uint32)
    for i in range(component.n):
        sel = ((xs >> i) & 1).astype(bool)
        table[sel] ^= power[sel]
        power = parent.mul_vec(power, np.full(component.order, root, dtype=np.uint32))
    return table


class SubfieldMap:
    """Identification of GF(2^m) x GF(2^m) with GF(2^(2m)).

    A pair (x, y) maps to embed(x)*beta0 + embed(y)*beta1 where embed is the
    canonical subfield embedding and (beta0, beta1) is a basis of the parent
    over the embedded subfield.  The default basis is beta0 = 1 and beta1 = the
    least parent element outside the embedded subfield.
    """

    def __init__(self, parent: Field, component: Field,
                 beta: tuple[int, int] | None = None):
        if parent.n != 2 * component.n:
            raise PreconditionError(
                f"parent degree must be twice the component degree: "
                f"{parent.n} != 2*{component.n}")
        self.parent = parent
        self.component = component
        self._sub = subfield_embedding(parent, component)
        sub_set = np.zeros(parent.order, dtype=bool)
        sub_set[self._sub] = True
        if beta is None:
            beta0 = 1
            beta1 = int(np.flatnonzero(~sub_set)[0])
        else:
            beta0, beta1 = (parent.coerce(b) for b in beta)
        self.beta = (beta0, beta1)
        m = component.n
        xs = np.repeat(self._sub, component.order)       # embed(x), x major
        ys = np.tile(self._sub, component.order)         # embed(y), y minor
        pair = (parent.mul_vec(xs, np.full(xs.shape, beta0, np.uint32))
                ^ parent.mul_vec(ys, np.full(ys.shape, beta1, np.uint32)))
        self._embed = pair  # index (x << m) | y
        counts = np.bincount(pair, minlength=parent.order)
        if counts.max() != 1:
            raise PreconditionError(
                "basis does not span: (beta0, beta1) dependent over the subfield")
        split = np.empty(parent.order, dtype=np.uint32)
        split[pair] = np.arange(parent.order, dtype=np.uint32)
        self._split = split  # parent bits -> (x << m) | y
        self._m = m

    def embed(self, x: int | FieldElement, y: int | FieldElement) -> int:
        """Parent element corresponding to the component pair (x, y)."""
        xb = self.component.coerce(x)
        yb = self.component.coerce(y)
        return int(self._embed[(xb << self._m) | yb])

    def split(self, z: int | FieldElement) -> tuple[int, int]:
        """Component pair (x, y) corresponding to the parent element z."""
        packed = int(self._split[self.parent.coerce(z)])
        return packed >> self._m, packed & (self.component.order - 1)

    def embed_vec(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return self._embed[(np.asarray(xs, np.uint32).astype(np.int64) << self._m)
                           | np.asarray(ys, np.uint32)]

    def split_vec(self, zs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        packed = self._split[np.asarray(zs, np.uint32)]
        return packed >> self._m, packed & np.uint32(self.component.order - 1)

    def embed_subfield(self, x: int | FieldElement) -> int:
        """Image of a single component element under the canonical embedding."""
        return int(self._sub[self.component.coerce(x)])


def subfield_map(parent: Field, component: Field,
                 beta: tuple[int, int] | None = None) -> SubfieldMap:
    return SubfieldMap(parent, component, beta)
