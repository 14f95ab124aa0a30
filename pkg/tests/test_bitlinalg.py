"""Bit-packed GF(2) matrices and the incremental elimination engine."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apnlab.bitlinalg import (
    BitMatrix,
    GF2Basis,
    build,
    build_stream,
    dump,
    mem_budget_bytes,
    parse_dump,
    rank,
    xor_permute_columns,
)
from apnlab.errors import MemoryBudgetError, PreconditionError


def naive_rank(dense: np.ndarray) -> int:
    """Textbook GF(2) Gaussian elimination on a dense 0/1 array."""
    a = np.array(dense, dtype=np.uint8) & 1
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        pivots = np.nonzero(a[r:, c])[0]
        if pivots.size == 0:
            continue
        p = r + int(pivots[0])
        a[[r, p]] = a[[p, r]]
        hit = np.nonzero(a[:, c])[0]
        hit = hit[hit != r]
        a[hit] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def random_dense(rng: np.random.Generator, rows: int, cols: int,
                 density: float) -> np.ndarray:
    return (rng.random((rows, cols)) < density).astype(np.uint8)


# ---------------------------------------------------------------------------
# construction and round trips
# ---------------------------------------------------------------------------

def test_dense_round_trip():
    rng = np.random.default_rng(0)
    d = random_dense(rng, 13, 70, 0.4)
    m = BitMatrix.from_dense01(d)
    assert (m.rows, m.cols) == (13, 70)
    assert np.array_equal(m.to_dense01(), d)
    for i in range(13):
        for j in (0, 63, 64, 69):
            assert m.get(i, j) == int(d[i, j])


def test_int_rows_round_trip():
    vals = [0b1011, 0, 0b0110, (1 << 40) | 7]
    m = BitMatrix.from_int_rows(vals, cols=41)
    assert m.to_int_rows() == vals


def test_set_get():
    m = BitMatrix(3, 130)
    m.set(2, 129, 1)
    m.set(0, 0, 1)
    assert m.get(2, 129) == 1 and m.get(0, 0) == 1 and m.get(1, 64) == 0
    m.set(2, 129, 0)
    assert m.get(2, 129) == 0


def test_row_weights_and_transpose():
    rng = np.random.default_rng(1)
    d = random_dense(rng, 9, 33, 0.5)
    m = BitMatrix.from_dense01(d)
    assert np.array_equal(m.row_weights(), d.sum(axis=1))
    t = m.transpose()
    assert np.array_equal(t.to_dense01(), d.T)


def test_dump_parse_round_trip():
    rng = np.random.default_rng(2)
    d = random_dense(rng, 7, 100, 0.3)
    m = BitMatrix.from_dense01(d)
    again = parse_dump(dump(m))
    assert (again.rows, again.cols) == (7, 100)
    assert np.array_equal(again.to_dense01(), d)


def test_build_from_positions():
    m = build(4, 70, lambda i: [i, 65 + i % 4])
    d = m.to_dense01()
    for i in range(4):
        expect = np.zeros(70, dtype=np.uint8)
        expect[i] = 1
        expect[65 + i % 4] ^= 1
        assert np.array_equal(d[i], expect)
    with pytest.raises(PreconditionError):
        build(1, 8, lambda i: [8])  # out of range


def test_build_respects_budget():
    with pytest.raises(MemoryBudgetError):
        build(1 << 10, 1 << 10, lambda i: [], budget=64)
    assert mem_budget_bytes() > 0


def test_build_stream_matches_in_core(tmp_path):
    rng = np.random.default_rng(3)
    rows, cols = 50, 200
    d = random_dense(rng, rows, cols, 0.2)
    pos = [np.nonzero(d[i])[0] for i in range(rows)]
    m = build(rows, cols, lambda i: pos[i])
    disk = build_stream(str(tmp_path / "m.bits"), rows, cols, lambda i: pos[i])
    assert rank(disk) == rank(m) == naive_rank(d)
    chunks = np.concatenate(list(disk.iter_chunks(chunk_rows=7)), axis=0)
    assert np.array_equal(chunks, m.data)


# ---------------------------------------------------------------------------
# rank
# ---------------------------------------------------------------------------

def test_rank_known_values():
    eye = np.eye(20, dtype=np.uint8)
    assert rank(eye) == 20
    assert rank(np.zeros((5, 9), dtype=np.uint8)) == 0
    ones = np.ones((6, 6), dtype=np.uint8)
    assert rank(ones) == 1


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_rank_matches_naive_random(backend):
    rng = np.random.default_rng(4)
    for _ in range(60):
        rows = int(rng.integers(1, 120))
        cols = int(rng.integers(1, 150))
        density = float(rng.uniform(0.02, 0.9))
        d = random_dense(rng, rows, cols, density)
        assert rank(BitMatrix.from_dense01(d), backend=backend) == naive_rank(d)


def test_rank_transpose_invariant():
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = random_dense(rng, int(rng.integers(1, 80)),
                         int(rng.integers(1, 80)), 0.35)
        m = BitMatrix.from_dense01(d)
        assert rank(m) == rank(m.transpose())


@given(st.integers(0, 2**32 - 1), st.integers(1, 64), st.integers(1, 64))
@settings(max_examples=60, deadline=None)
def test_rank_row_operations_invariant(seed, rows, cols):
    rng = np.random.default_rng(seed)
    d = random_dense(rng, rows, cols, 0.4)
    base = naive_rank(d)
    assert rank(BitMatrix.from_dense01(d)) == base
    # xor a random row into another: rank unchanged
    if rows >= 2:
        i, j = rng.choice(rows, 2, replace=False)
        d2 = d.copy()
        d2[i] ^= d2[j]
        assert rank(BitMatrix.from_dense01(d2)) == base


def test_rank_duplicated_rows():
    rng = np.random.default_rng(6)
    d = random_dense(rng, 30, 50, 0.4)
    doubled = np.vstack([d, d])
    assert rank(BitMatrix.from_dense01(doubled)) == naive_rank(d)


def test_rank_wide_matrix_multiword():
    rng = np.random.default_rng(7)
    d = random_dense(rng, 60, 1000, 0.02)
    assert rank(BitMatrix.from_dense01(d)) == naive_rank(d)


# ---------------------------------------------------------------------------
# incremental basis
# ---------------------------------------------------------------------------

def test_basis_incremental_absorb():
    rng = np.random.default_rng(8)
    d = random_dense(rng, 90, 130, 0.3)
    m = BitMatrix.from_dense01(d)
    basis = GF2Basis(130)
    total = 0
    for start in range(0, 90, 13):
        total += basis.absorb(m.data[start:start + 13])
    assert total == basis.rank == naive_rank(d)
    piv = basis.pivot_cols()
    assert len(piv) == basis.rank
    assert len(set(piv)) == len(piv)


def test_basis_rejects_width_mismatch():
    basis = GF2Basis(64)
    with pytest.raises(PreconditionError):
        basis.absorb(np.zeros((1, 3), dtype=np.uint64))


def test_basis_backends_agree():
    rng = np.random.default_rng(9)
    d = random_dense(rng, 64, 520, 0.1)
    m = BitMatrix.from_dense01(d)
    got = {b: GF2Basis(520, backend=b) for b in ("numpy", "numba")}
    for b in got.values():
        b.absorb(m.data)
    ranks = {name: b.rank for name, b in got.items()}
    assert len(set(ranks.values())) == 1


# ---------------------------------------------------------------------------
# column translation
# ---------------------------------------------------------------------------

def test_xor_permute_columns_is_involution():
    rng = np.random.default_rng(10)
    cols = 256
    d = random_dense(rng, 10, cols, 0.4)
    m = BitMatrix.from_dense01(d)
    for mask in (1, 5, 63, 64, 129, 255):
        once = xor_permute_columns(m.data, mask, cols)
        twice = xor_permute_columns(once, mask, cols)
        assert np.array_equal(twice, m.data)
        # column j of the permuted matrix is column j ^ mask of the original
        moved = BitMatrix(10, cols, once).to_dense01()
        assert np.array_equal(moved, d[:, np.arange(cols) ^ mask])


def test_xor_permute_rejects_bad_shapes():
    data = np.zeros((2, 2), dtype=np.uint64)
    with pytest.raises(PreconditionError):
        xor_permute_columns(data, 1, 100)  # not a power of two
    with pytest.raises(PreconditionError):
        xor_permute_columns(data, 128, 128)  # mask out of range
