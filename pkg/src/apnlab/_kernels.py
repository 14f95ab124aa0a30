"""Optional numba-compiled kernels for the GF(2) elimination engine.

Importable only when numba is present; ``bitlinalg`` falls back to its pure
numpy backend otherwise.  The kernels implement the same incremental echelon
scheme as the numpy path but with 16-pivot blocks reduced through two fused
256-entry XOR tables per pass, which roughly halves memory traffic and skips
rows that have already reduced to zero.
"""

from __future__ import annotations

import numpy as np

AVAILABLE = False
try:
    from numba import njit

    AVAILABLE = True
except Exception:  # pragma: no cover - exercised only without numba
    njit = None


if AVAILABLE:

    @njit(cache=True, boundscheck=False)
    def _build_tables16(basis, base, t1, t2):
        width = basis.shape[1]
        for w in range(width):
            t1[0, w] = 0
            t2[0, w] = 0
        for idx in range(1, 256):
            low = idx & (-idx)
            j = 0
            while (low >> j) & 1 == 0:
                j += 1
            prev = idx ^ low
            r1 = base + j
            r2 = base + 8 + j
            for w in range(width):
                t1[idx, w] = t1[prev, w] ^ basis[r1, w]
                t2[idx, w] = t2[prev, w] ^ basis[r2, w]

    @njit(cache=True, boundscheck=False)
    def _reduce_rows16(chunk, lo, piv_word, piv_mask, base, t1, t2):
        width = chunk.shape[1]
        for r in range(lo, chunk.shape[0]):
            i1 = 0
            i2 = 0
            for k in range(8):
                if chunk[r, piv_word[base + k]] & piv_mask[base + k]:
                    i1 |= 1 << k
                if chunk[r, piv_word[base + 8 + k]] & piv_mask[base + 8 + k]:
                    i2 |= 1 << k
            if i1 or i2:
                for w in range(width):
                    chunk[r, w] ^= t1[i1, w] ^ t2[i2, w]

    @njit(cache=True, boundscheck=False)
    def absorb_chunk(chunk, basis, piv_col, piv_word, piv_mask, count, t1, t2):
        width = chunk.shape[1]
        nrows = chunk.shape[0]
        applied = 0
        while (applied + 1) * 16 <= count:
            _build_tables16(basis, applied * 16, t1, t2)
            _reduce_rows16(chunk, 0, piv_word, piv_mask, applied * 16, t1, t2)
            applied += 1
        for i in range(nrows):
            while (applied + 1) * 16 <= count:
                _build_tables16(basis, applied * 16, t1, t2)
                _reduce_rows16(chunk, i, piv_word, piv_mask, applied * 16, t1, t2)
                applied += 1
            for t in range(applied * 16, count):
                if chunk[i, piv_word[t]] & piv_mask[t]:
                    for w in range(width):
                        chunk[i, w] ^= basis[t, w]
            lead = -1
            for w in range(width):
                v = chunk[i, w]
                if v != 0:
                    j = 0
                    while (v >> np.uint64(j)) & np.uint64(1) == np.uint64(0):
                        j += 1
                    lead = (w << 6) + j
                    break
            if lead >= 0:
                basis[count, :] = chunk[i, :]
                piv_col[count] = lead
                piv_word[count] = lead >> 6
                piv_mask[count] = np.uint64(1) << np.uint64(lead & 63)
                count += 1
                if count % 16 == 0:
                    base = count - 16
                    for j in range(1, 16):
                        wj = piv_word[base + j]
                        mj = piv_mask[base + j]
                        for k in range(j):
                            if basis[base + k, wj] & mj:
                                for w in range(width):
                                    basis[base + k, w] ^= basis[base + j, w]
        return count
