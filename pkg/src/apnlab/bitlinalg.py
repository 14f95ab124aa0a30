"""Bit-packed GF(2) linear algebra.

Matrices are stored as numpy uint64 arrays, 64 columns per word, column j in
word ``j >> 6`` at bit ``j & 63`` (LSB first).  Rank is computed by absorbing
rows into an incremental echelon basis; finished pivot blocks are internally
pivot-reduced so a 256-entry XOR table per block clears a whole block of pivot
columns from a work chunk with one gather (four-Russians style).  When numba
is importable a fused variant of the same scheme (16-pivot blocks, two tables
per pass) is used; both backends produce identical ranks and are cross-checked
in the test suite.
"""

from __future__ import annotations

import io
import os
from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import MemoryBudgetError, PreconditionError

__all__ = [
    "BitMatrix",
    "DiskBitMatrix",
    "GF2Basis",
    "build",
    "build_stream",
    "dump",
    "mem_budget_bytes",
    "parse_dump",
    "rank",
    "xor_permute_columns",
]

_CHUNK_ROWS = 2048

# Butterfly masks: bit positions whose t-th index bit is 0.
_BFLY = (
    np.uint64(0x5555555555555555),
    np.uint64(0x3333333333333333),
    np.uint64(0x0F0F0F0F0F0F0F0F),
    np.uint64(0x00FF00FF00FF00FF),
    np.uint64(0x0000FFFF0000FFFF),
    np.uint64(0x00000000FFFFFFFF),
)


def mem_budget_bytes() -> int:
    """Memory budget in bytes, from APNLAB_MEM_BUDGET_GIB (default 12 GiB)."""
    gib = float(os.environ.get("APNLAB_MEM_BUDGET_GIB", "12"))
    return int(gib * (1 << 30))


def _words_for(cols: int) -> int:
    return (cols + 63) >> 6


class BitMatrix:
    """A rows x cols matrix over GF(2), bit-packed into uint64 words."""

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None):
        if rows < 0 or cols <= 0:
            raise PreconditionError("matrix dimensions must be positive")
        self.rows = rows
        self.cols = cols
        self.words = _words_for(cols)
        if data is None:
            data = np.zeros((rows, self.words), dtype=np.uint64)
        if data.shape != (rows, self.words) or data.dtype != np.uint64:
            raise PreconditionError("backing array shape/dtype mismatch")
        self.data = data

    def get(self, i: int, j: int) -> int:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise PreconditionError("bit index out of range")
        return int(self.data[i, j >> 6] >> np.uint64(j & 63)) & 1

    def set(self, i: int, j: int, value: int = 1) -> None:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise PreconditionError("bit index out of range")
        m = np.uint64(1) << np.uint64(j & 63)
        if value:
            self.data[i, j >> 6] |= m
        else:
            self.data[i, j >> 6] &= ~m

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self.data).sum(axis=1)

    def to_dense01(self) -> np.ndarray:
        """Unpack to a (rows, cols) uint8 array of 0/1 values."""
        bits = np.unpackbits(self.data.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.cols]

    @classmethod
    def from_dense01(cls, array: np.ndarray) -> "BitMatrix":
        array = np.asarray(array, dtype=np.uint8)
        if array.ndim != 2:
            raise PreconditionError("dense input must be 2-D")
        rows, cols = array.shape
        words = _words_for(cols)
        padded = np.zeros((rows, words * 64), dtype=np.uint8)
        padded[:, :cols] = array & 1
        data = np.packbits(padded, axis=1, bitorder="little").view(np.uint64)
        return cls(rows, cols, np.ascontiguousarray(data))

    @classmethod
    def from_int_rows(cls, int_rows: Iterable[int], cols: int) -> "BitMatrix":
        int_rows = list(int_rows)
        m = cls(len(int_rows), cols)
        for i, v in enumerate(int_rows):
            if v < 0 or v >> cols:
                raise PreconditionError("row value exceeds column count")
            for w in range(m.words):
                m.data[i, w] = (v >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
        return m

    def to_int_rows(self) -> list[int]:
        out = []
        for i in range(self.rows):
            v = 0
            for w in range(self.words):
                v |= int(self.data[i, w]) << (64 * w)
            out.append(v)
        return out

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense01(self.to_dense01().T)

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data.copy())

    def iter_chunks(self, chunk_rows: int = _CHUNK_ROWS) -> Iterator[np.ndarray]:
        for i in range(0, self.rows, chunk_rows):
            yield self.data[i: i + chunk_rows]

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, BitMatrix) and self.rows == other.rows
                and self.cols == other.cols and bool(np.array_equal(self.data, other.data)))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


class DiskBitMatrix:
    """Row store backed by a flat file of packed uint64 rows (out-of-core)."""

    def __init__(self, path: str, rows: int, cols: int):
        self.path = path
        self.rows = rows
        self.cols = cols
        self.words = _words_for(cols)

    def iter_chunks(self, chunk_rows: int = _CHUNK_ROWS) -> Iterator[np.ndarray]:
        row_bytes = self.words * 8
        with open(self.path, "rb") as fh:
            done = 0
            while done < self.rows:
                take = min(chunk_rows, self.rows - done)
                buf = fh.read(take * row_bytes)
                if len(buf) != take * row_bytes:
                    raise PreconditionError("row store truncated")
                yield np.frombuffer(buf, dtype=np.uint64).reshape(take, self.words)
                done += take


def build(rows: int, cols: int,
          generator: Callable[[int], Iterable[int] | np.ndarray],
          budget: int | None = None) -> BitMatrix:
    """Materialize a matrix row by row from a set-position generator.

    ``generator(i)`` returns the positions of the 1-bits of row i.  The packed
    size is checked against the memory budget before allocation.
    """
    words = _words_for(cols)
    need = rows * words * 8
    limit = mem_budget_bytes() if budget is None else budget
    if need > limit:
        raise MemoryBudgetError(
            f"matrix needs {need} bytes packed, budget is {limit}")
    m = BitMatrix(rows, cols)
    for i in range(rows):
        pos = np.asarray(generator(i), dtype=np.int64)
        if pos.size:
            if pos.min() < 0 or pos.max() >= cols:
                raise PreconditionError(f"bit position out of range in row {i}")
            np.bitwise_or.at(m.data[i], pos >> 6,
                             np.uint64(1) << (pos & 63).astype(np.uint64))
    return m


def build_stream(path: str, rows: int, cols: int,
                 generator: Callable[[int], Iterable[int] | np.ndarray]) -> DiskBitMatrix:
    """Stream a matrix to a flat file; only one row is held in memory."""
    words = _words_for(cols)
    row = np.zeros(words, dtype=np.uint64)
    with open(path, "wb") as fh:
        for i in range(rows):
            row[:] = 0
            pos = np.asarray(generator(i), dtype=np.int64)
            if pos.size:
                if pos.min() < 0 or pos.max() >= cols:
                    raise PreconditionError(f"bit position out of range in row {i}")
                np.bitwise_or.at(row, pos >> 6,
                                 np.uint64(1) << (pos & 63).astype(np.uint64))
            fh.write(row.tobytes())
    return DiskBitMatrix(path, rows, cols)


def xor_permute_columns(data: np.ndarray, mask: int, cols: int) -> np.ndarray:
    """Return a copy with column j holding the old column j XOR mask.

    The column count must be a power of two covering the mask (the operation
    is translation by a group element of (F_2^k, +)).
    """
    if cols & (cols - 1):
        raise PreconditionError("xor-permute needs a power-of-two column count")
    if not 0 <= mask < cols:
        raise PreconditionError("mask out of range")
    out = data
    hi = mask >> 6
    if hi:
        words = data.shape[1]
        out = out[:, np.arange(words) ^ hi]
    lo = mask & 63
    if lo:
        out = out.copy() if out is data else out
        for t in range(6):
            if (lo >> t) & 1:
                s = np.uint64(1 << t)
                m = _BFLY[t]
                out = ((out >> s) & m) | ((out & m) << s)
    elif out is data:
        out = out.copy()
    return np.ascontiguousarray(out)


# ---------------------------------------------------------------------------
# Incremental echelon basis


def _have_numba() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except Exception:
        return False
    return _kernels.AVAILABLE


class GF2Basis:
    """Growing echelon basis of a GF(2) row space.

    Invariants: every stored row was fully reduced against the rows stored
    before it; each finished block of rows is additionally pivot-reduced
    internally so its rows carry unit vectors on the block's own pivot
    columns.  ``absorb`` reduces incoming rows in chunks and appends the
    survivors; the final ``rank`` equals the rank of everything absorbed.
    """

    def __init__(self, cols: int, backend: str = "auto",
                 budget: int | None = None):
        if cols <= 0:
            raise PreconditionError("column count must be positive")
        if backend not in ("auto", "numpy", "numba"):
            raise PreconditionError(f"unknown backend {backend!r}")
        if backend == "auto":
            backend = "numba" if _have_numba() else "numpy"
        if backend == "numba" and not _have_numba():
            raise PreconditionError("numba backend requested but unavailable")
        self.backend = backend
        self.cols = cols
        self.words = _words_for(cols)
        self._budget = mem_budget_bytes() if budget is None else budget
        cap = 256
        self._rows = np.zeros((cap, self.words), dtype=np.uint64)
        self._piv_col = np.zeros(cap, dtype=np.int64)
        self._piv_word = np.zeros(cap, dtype=np.int64)
        self._piv_mask = np.zeros(cap, dtype=np.uint64)
        self.count = 0
        if backend == "numba":
            from . import _kernels
            self._kernels = _kernels
            self._t1 = np.zeros((256, self.words), dtype=np.uint64)
            self._t2 = np.zeros((256, self.words), dtype=np.uint64)
            self.block_size = 16
        else:
            self._table = np.zeros((256, self.words), dtype=np.uint64)
            self.block_size = 8

    @property
    def rank(self) -> int:
        return self.count

    def pivot_cols(self) -> list[int]:
        return sorted(int(c) for c in self._piv_col[: self.count])

    def rows_view(self) -> np.ndarray:
        """Read-only view of the stored basis rows (do not mutate)."""
        return self._rows[: self.count]

    def _ensure_capacity(self, extra: int) -> None:
        need = self.count + extra
        cap = self._rows.shape[0]
        if need <= cap:
            return
        while cap < need:
            cap *= 2
        nbytes = cap * self.words * 8
        if nbytes > self._budget:
            raise MemoryBudgetError(
                f"basis would need {nbytes} bytes, budget is {self._budget}")
        grown = np.zeros((cap, self.words), dtype=np.uint64)
        grown[: self.count] = self._rows[: self.count]
        self._rows = grown
        self._piv_col = np.resize(self._piv_col, cap)
        self._piv_word = np.resize(self._piv_word, cap)
        self._piv_mask = np.resize(self._piv_mask, cap)

    def absorb(self, rows: np.ndarray) -> int:
        """Absorb packed rows (k, words); return the number of new pivots."""
        rows = np.asarray(rows, dtype=np.uint64)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        if rows.shape[1] != self.words:
            raise PreconditionError("row width mismatch")
        before = self.count
        for start in range(0, rows.shape[0], _CHUNK_ROWS):
            chunk = np.array(rows[start: start + _CHUNK_ROWS], dtype=np.uint64)
            self._ensure_capacity(chunk.shape[0])
            if self.backend == "numba":
                self.count = int(self._kernels.absorb_chunk(
                    chunk, self._rows, self._piv_col, self._piv_word,
                    self._piv_mask, self.count, self._t1, self._t2))
            else:
                self._absorb_chunk_numpy(chunk)
        return self.count - before

    # -- numpy backend -------------------------------------------------------

    def _build_table8(self, base: int, nrows: int) -> np.ndarray:
        t = self._table
        t[0] = 0
        for idx in range(1, 1 << nrows):
            low = idx & (-idx)
            t[idx] = t[idx ^ low] ^ self._rows[base + low.bit_length() - 1]
        return t

    def _table_reduce(self, chunk: np.ndarray, base: int) -> None:
        """Clear 8 pivot columns (block at row ``base``) from all chunk rows."""
        t = self._build_table8(base, 8)
        idx = np.zeros(chunk.shape[0], dtype=np.int64)
        for k in range(8):
            w = self._piv_word[base + k]
            m = self._piv_mask[base + k]
            idx |= ((chunk[:, w] & m) != 0).astype(np.int64) << k
        chunk ^= t[idx]

    def _row_reduce_tail(self, row: np.ndarray, lo: int, hi: int) -> None:
        for t in range(lo, hi):
            if row[self._piv_word[t]] & self._piv_mask[t]:
                row ^= self._rows[t]

    def _find_lead(self, row: np.ndarray) -> int:
        nz = np.flatnonzero(row)
        if nz.size == 0:
            return -1
        w = int(nz[0])
        v = int(row[w])
        return (w << 6) + ((v & -v).bit_length() - 1)

    def _append(self, row: np.ndarray, lead: int) -> None:
        c = self.count
        self._rows[c] = row
        self._piv_col[c] = lead
        self._piv_word[c] = lead >> 6
        self._piv_mask[c] = np.uint64(1) << np.uint64(lead & 63)
        self.count = c + 1
        if self.count % 8 == 0:
            base = self.count - 8
            for j in range(1, 8):
                w = self._piv_word[base + j]
                m = self._piv_mask[base + j]
                for k in range(j):
                    if self._rows[base + k, w] & m:
                        self._rows[base + k] ^= self._rows[base + j]

    def _absorb_chunk_numpy(self, chunk: np.ndarray) -> None:
        nblocks = self.count // 8
        for blk in range(nblocks):
            self._table_reduce(chunk, blk * 8)
        applied = nblocks
        nrows = chunk.shape[0]
        for i in range(nrows):
            while applied < self.count // 8:
                self._table_reduce(chunk[i:], applied * 8)
                applied += 1
            row = chunk[i]
            self._row_reduce_tail(row, applied * 8, self.count)
            lead = self._find_lead(row)
            if lead >= 0:
                self._append(row, lead)


def rank(matrix: BitMatrix | DiskBitMatrix | np.ndarray,
         backend: str = "auto") -> int:
    """Rank over GF(2).  Accepts packed matrices, disk row stores, or a dense
    0/1 array."""
    if isinstance(matrix, np.ndarray):
        matrix = BitMatrix.from_dense01(matrix)
    basis = GF2Basis(matrix.cols, backend=backend)
    for chunk in matrix.iter_chunks():
        basis.absorb(chunk)
    return basis.rank


# ---------------------------------------------------------------------------
# Text dumps


def dump(matrix: BitMatrix) -> str:
    """Serialize as ``"rows cols"`` then one hex string per row (LSB = column 0)."""
    width = (matrix.cols + 3) // 4
    out = io.StringIO()
    out.write(f"{matrix.rows} {matrix.cols}\n")
    for v in matrix.to_int_rows():
        out.write(f"{v:0{width}x}\n")
    return out.getvalue()


def parse_dump(text: str) -> BitMatrix:
    lines = text.strip().splitlines()
    if not lines:
        raise PreconditionError("empty matrix dump")
    try:
        rows, cols = (int(p) for p in lines[0].split())
    except ValueError as exc:
        raise PreconditionError(f"malformed dump header {lines[0]!r}") from exc
    if len(lines) != rows + 1:
        raise PreconditionError("dump row count mismatch")
    vals = []
    for ln in lines[1:]:
        v = int(ln, 16)
        if v >> cols:
            raise PreconditionError("dump row exceeds column count")
        vals.append(v)
    return BitMatrix.from_int_rows(vals, cols)
