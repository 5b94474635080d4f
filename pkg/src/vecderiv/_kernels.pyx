# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled index-canonicalization kernel.

Streams over positions with a fixed-size digit buffer instead of
materializing the (n, r) digit table the NumPy fallback needs.
"""

import numpy as np

COMPILED = True

DEF MAX_ORDER = 64


def canonical_position_map(int d, int r):
    """Map each 0-based position in {0,...,d**r-1} to its orbit representative."""
    if r > MAX_ORDER:
        raise ValueError(f"order {r} exceeds compiled kernel limit {MAX_ORDER}")
    cdef long long n = 1
    cdef int j
    for j in range(r):
        n *= d
    out_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    if r == 0:
        out[0] = 0
        return out_arr

    cdef long long digits[MAX_ORDER]
    cdef long long pos, tmp, canon, key
    cdef int k
    with nogil:
        for pos in range(n):
            tmp = pos
            for j in range(r - 1, -1, -1):
                digits[j] = tmp % d
                tmp //= d
            # insertion sort; r is small
            for j in range(1, r):
                key = digits[j]
                k = j - 1
                while k >= 0 and digits[k] > key:
                    digits[k + 1] = digits[k]
                    k -= 1
                digits[k + 1] = key
            canon = 0
            for j in range(r):
                canon = canon * d + digits[j]
            out[pos] = canon
    return out_arr
