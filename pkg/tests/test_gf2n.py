"""Field arithmetic: axioms, traces, cube classes, subfield maps."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apnlab.errors import PreconditionError
from apnlab.gf2n import (
    DEFAULT_MODULI,
    cube_class,
    field_from_header,
    field_new,
    poly_is_irreducible,
    primitive_elements,
    subfield_embedding,
    subfield_map,
    trace,
)

from conftest import get_field


# ---------------------------------------------------------------------------
# independent oracles (kept deliberately naive)
# ---------------------------------------------------------------------------

def _poly_mul_mod(a: int, b: int, mod: int) -> int:
    """Carry-less school multiplication followed by long division by mod."""
    prod = 0
    shift = 0
    while b:
        if b & 1:
            prod ^= a << shift
        b >>= 1
        shift += 1
    deg = mod.bit_length() - 1
    while prod.bit_length() - 1 >= deg:
        prod ^= mod << (prod.bit_length() - 1 - deg)
    return prod


def _poly_irreducible_oracle(p: int) -> bool:
    """Trial division by every lower-degree polynomial."""
    deg = p.bit_length() - 1
    if deg <= 0:
        return False
    for d in range(2, 1 << deg):
        if d.bit_length() - 1 == 0:
            continue
        # long-divide p by d and check the remainder
        rem = p
        dd = d.bit_length() - 1
        while rem.bit_length() - 1 >= dd and rem:
            rem ^= d << (rem.bit_length() - 1 - dd)
        if rem == 0:
            return False
    return True


def _euler_phi(n: int) -> int:
    result = n
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


# ---------------------------------------------------------------------------
# moduli and construction
# ---------------------------------------------------------------------------

def test_default_moduli_are_irreducible():
    for n, mod in DEFAULT_MODULI.items():
        assert mod.bit_length() - 1 == n
        if n <= 14:
            assert _poly_irreducible_oracle(mod), f"n={n} modulus {mod:#x}"
        assert poly_is_irreducible(mod)


def test_poly_is_irreducible_matches_oracle_through_degree_6():
    for p in range(4, 1 << 7):
        assert poly_is_irreducible(p) == _poly_irreducible_oracle(p), f"{p:#x}"


def test_reducible_modulus_rejected():
    with pytest.raises(PreconditionError):
        field_new(4, modulus=0b10101)  # (x^2+x+1)^2


def test_header_round_trip():
    for n in (3, 6, 8, 9):
        f = get_field(n)
        g = field_from_header(f.header())
        assert (g.n, g.modulus, g.primitive) == (f.n, f.modulus, f.primitive)


# ---------------------------------------------------------------------------
# field axioms
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 4])
def test_axioms_exhaustive(n):
    f = get_field(n)
    q = 1 << n
    for a in range(q):
        for b in range(q):
            assert f.mul(a, b) == f.mul(b, a)
            assert f.mul(a, b) == _poly_mul_mod(a, b, f.modulus)
            for c in range(q):
                assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)
    for a in range(1, q):
        assert f.mul(a, f.inv(a)) == 1
        assert f.pow(a, q - 1) == 1


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
@settings(max_examples=200, deadline=None)
def test_axioms_sampled_gf256(a, b, c):
    f = get_field(8)
    assert f.mul(a, b) == f.mul(b, a) == _poly_mul_mod(a, b, f.modulus)
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)
    if a:
        assert f.mul(a, f.inv(a)) == 1


@given(st.integers(1, (1 << 11) - 1), st.integers(-5, 200))
@settings(max_examples=100, deadline=None)
def test_pow_matches_repeated_multiplication(a, e):
    f = get_field(11)
    expect = 1
    for _ in range(e % f.mult_order if e >= 0 else (e % f.mult_order)):
        expect = f.mul(expect, a)
    assert f.pow(a, e) == expect


def test_pow_zero_conventions():
    f = get_field(5)
    assert f.pow(0, 0) == 1  # empty product
    assert f.pow(0, 3) == 0
    with pytest.raises(ZeroDivisionError):
        f.pow(0, -1)
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


# ---------------------------------------------------------------------------
# vectorized kernels agree with the scalar ones
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [3, 6, 9])
def test_vector_ops_match_scalar(n):
    f = get_field(n)
    rng = np.random.default_rng(7)
    a = rng.integers(0, f.order, 300, dtype=np.uint32)
    b = rng.integers(0, f.order, 300, dtype=np.uint32)
    assert all(int(x) == f.mul(int(p), int(q))
               for x, p, q in zip(f.mul_vec(a, b), a, b))
    assert all(int(x) == f.sqr(int(p)) for x, p in zip(f.sqr_vec(a), a))
    assert all(int(x) == f.pow(int(p), 11) for x, p in zip(f.pow_vec(a, 11), a))
    nz = a[a != 0]
    assert all(int(x) == f.inv(int(p)) for x, p in zip(f.inv_vec(nz), nz))
    assert all(int(x) == f.pow(int(p), 2) for x, p in zip(f.frob_vec(a, 1), a))
    assert all(int(x) == f.trace_to(1, int(p))
               for x, p in zip(f.trace_vec(1, a), a))
    c = int(b[0])
    assert all(int(x) == f.mul(c, int(p))
               for x, p in zip(f.mul_scalar_vec(c, a), a))


def test_all_elements_vec_is_identity_ramp():
    f = get_field(7)
    assert np.array_equal(f.all_elements_vec(), np.arange(128, dtype=np.uint32))


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,m", [(4, 1), (6, 2), (6, 3), (8, 4), (9, 3)])
def test_trace_properties(n, m):
    f = get_field(n)
    qm = 1 << m
    for a in range(f.order):
        t = f.trace_to(m, a)
        # the image lies in the subfield fixed by x -> x^(2^m)
        assert f.pow(t, qm) == t
        # invariance under the subfield Frobenius of the argument
        assert f.trace_to(m, f.pow(a, qm)) == t
    # additivity on a sample
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b = map(int, rng.integers(0, f.order, 2))
        assert f.trace_to(m, a ^ b) == f.trace_to(m, a) ^ f.trace_to(m, b)


def test_absolute_trace_is_balanced():
    f = get_field(8)
    ones = sum(f.trace_to(1, a) for a in range(256))
    assert ones == 128


def test_trace_helper_wraps_field_method():
    f = get_field(6)
    for a in (0, 1, 5, 63):
        assert trace(f, 2, a).bits == f.trace_to(2, a)


def test_trace_to_rejects_non_divisor():
    f = get_field(6)
    with pytest.raises(PreconditionError):
        f.trace_to(4, 1)


# ---------------------------------------------------------------------------
# multiplicative structure
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 8])
def test_primitive_element_count(n):
    f = get_field(n)
    prims = primitive_elements(f)
    assert len(prims) == _euler_phi(f.mult_order)
    for p in prims[:8]:
        seen = set()
        x = 1
        for _ in range(f.mult_order):
            seen.add(x)
            x = f.mul(x, p.bits)
        assert len(seen) == f.mult_order


def test_primitive_power_is_discrete_exp():
    f = get_field(6)
    x = 1
    for k in range(f.mult_order):
        assert f.primitive_power(k) == x
        x = f.mul(x, f.primitive)
    assert f.primitive_power(f.mult_order) == 1  # exponents wrap


@pytest.mark.parametrize("n", [4, 6, 8])
def test_cube_class_matches_brute(n):
    f = get_field(n)
    cubes = {f.pow(a, 3) for a in range(1, f.order)}
    for z in range(f.order):
        cls = cube_class(f, z)
        if z == 0:
            assert cls == "zero"
        elif n % 2 == 1:
            # cubing permutes odd-degree fields: everything is a cube
            assert cls == "cube"
        else:
            assert cls == ("cube" if z in cubes else "noncube")


# ---------------------------------------------------------------------------
# subfield maps
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,m", [(4, 2), (6, 3), (8, 4)])
def test_subfield_map_is_field_homomorphism(n, m):
    parent, comp = get_field(n), get_field(m)
    sm = subfield_map(parent, comp)
    qm = 1 << m
    emb = [sm.embed_subfield(a) for a in range(qm)]
    assert emb[0] == 0 and emb[1] == 1
    assert len(set(emb)) == qm
    for a in range(qm):
        for b in range(qm):
            assert emb[a ^ b] == emb[a] ^ emb[b]
            assert emb[comp.mul(a, b)] == parent.mul(emb[a], emb[b])
    # the image is exactly the fixed field of x -> x^(2^m)
    fixed = {x for x in range(parent.order) if parent.pow(x, qm) == x}
    assert set(emb) == fixed


@pytest.mark.parametrize("n,m", [(4, 2), (6, 3), (8, 4)])
def test_split_embed_inverse_pair(n, m):
    parent, comp = get_field(n), get_field(m)
    sm = subfield_map(parent, comp)
    for x in range(parent.order):
        hi, lo = sm.split(x)
        assert sm.embed(hi, lo) == x
    k = min(comp.order, 8)
    pairs = [(a, b) for a in range(k) for b in range(k)]
    hi = np.array([p[0] for p in pairs], dtype=np.uint32)
    lo = np.array([p[1] for p in pairs], dtype=np.uint32)
    vec = sm.embed_vec(hi, lo)
    assert [int(v) for v in vec] == [sm.embed(a, b) for a, b in pairs]
    sh, sl = sm.split_vec(vec)
    assert np.array_equal(sh, hi) and np.array_equal(sl, lo)


def test_subfield_embedding_table_matches_map():
    parent, comp = get_field(6), get_field(3)
    table = subfield_embedding(parent, comp)
    sm = subfield_map(parent, comp)
    assert [int(t) for t in table] == [sm.embed_subfield(a) for a in range(8)]


def test_subfield_map_requires_half_degree_component():
    with pytest.raises(PreconditionError):
        subfield_map(get_field(6), get_field(4))
    with pytest.raises(PreconditionError):
        subfield_map(get_field(6), get_field(2))


# ---------------------------------------------------------------------------
# element wrapper and coercion conventions
# ---------------------------------------------------------------------------

def test_coerce_int_means_raw_bits():
    f = get_field(5)
    assert f.coerce(11) == 11
    el = f.element(11)
    assert f.coerce(el) == 11
    other = get_field(6)
    with pytest.raises(PreconditionError):
        f.coerce(other.element(1))
    with pytest.raises(PreconditionError):
        f.coerce(1 << 5)


def test_element_wrapper_inverse_and_trace():
    f = get_field(5)
    el = f.element(9)
    assert el.inv().bits == f.inv(9)
    assert el.trace() == f.trace_to(1, 9)


def test_cross_field_default_moduli_and_orders():
    # math.gcd sanity for the sizes the package leans on
    assert math.gcd(3, 5) == 1
    for n in (6, 9, 12):
        f = get_field(n)
        assert f.order == 1 << n
        assert f.mult_order == (1 << n) - 1
