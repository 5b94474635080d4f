"""The symmetrizer S_{d,r}, the index/position bijection and unique-entry layouts.

A vector of length d**r indexed by r-tuples over {1,...,d} is symmetrized by
averaging over all permutations of the tuple factors.  Averaging the r!
permutations of each tuple is the defining computation; because every
permutation of a tuple lands in the same orbit, the result equals the mean of
the vector over each orbit, broadcast back.  The orbit route costs
O(d**r * r log r) instead of O(d**r * r!) and is the default; the literal
permutation sum is kept as :func:`symmetrize_permsum` and the two are checked
against each other in the self-check suites.
"""

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement, permutations

import numpy as np
import scipy.sparse as sp

from .errors import NonSymmetricInput, RangeError, ShapeError
from .linalg import check_entries

if os.environ.get("VECDERIV_NO_EXT"):
    from . import _kernels_py as _kernels
else:
    try:
        from . import _kernels
    except ImportError:
        from . import _kernels_py as _kernels

#: True when the compiled kernel is in use.
COMPILED_KERNELS = _kernels.COMPILED


def position_of(indices, d):
    """1-based position of the index tuple (i1,...,ir) inside a d**r vector.

    p = 1 + sum_j (i_j - 1) d**(r-j): the location of the only nonzero entry
    of e_{i1} ⊗ ... ⊗ e_{ir}.
    """
    pos = 0
    for i in indices:
        if not 1 <= i <= d:
            raise RangeError(f"index {i} outside 1..{d}")
        pos = pos * d + (i - 1)
    return pos + 1


def indices_of(pos, d, r):
    """Inverse of :func:`position_of`: the r-tuple stored at 1-based position pos.

    A change of base of pos-1 to base d, with digits shifted into {1,...,d}.
    """
    if not 1 <= pos <= d**r:
        raise RangeError(f"position {pos} outside 1..{d}**{r}")
    rem = pos - 1
    out = []
    for _ in range(r):
        out.append(rem % d + 1)
        rem //= d
    return tuple(reversed(out))


@lru_cache(maxsize=64)
def _orbit_info(d, r):
    """Cached (canonical map, orbit counts) for dimension d and order r.

    canon[p] is the 0-based position of the sorted tuple of position p;
    counts[c] is the orbit size at each canonical position (0 elsewhere).
    Treat both arrays as read-only.
    """
    check_entries(d**r, "index space")
    canon = _kernels.canonical_position_map(d, r)
    counts = np.bincount(canon, minlength=canon.size)
    return canon, counts


def symmetrize(v, d, r):
    """Apply S_{d,r} to a vector of length d**r (orbit-mean fast path)."""
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != d**r:
        raise ShapeError(f"vector length {v.size} != {d}**{r}")
    if r <= 1:
        return v.copy()
    canon, counts = _orbit_info(d, r)
    sums = np.bincount(canon, weights=v, minlength=v.size)
    return sums[canon] / counts[canon]


def symmetrize_permsum(v, d, r):
    """Apply S_{d,r} by the defining sum over all r! factor permutations.

    Cost grows with r!; kept as the literal form of the definition and as a
    cross-check for :func:`symmetrize`.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != d**r:
        raise ShapeError(f"vector length {v.size} != {d}**{r}")
    if r <= 1:
        return v.copy()
    t = v.reshape((d,) * r)
    acc = np.zeros_like(t)
    for perm in permutations(range(r)):
        acc += np.transpose(t, axes=perm)
    return acc.reshape(-1) / math.factorial(r)


def symmetrize_blocks(data, p, d, r):
    """Apply I_p ⊗ S_{d,r}: symmetrize each of the p stacked d**r blocks."""
    data = np.asarray(data, dtype=float).reshape(-1)
    if data.size != p * d**r:
        raise ShapeError(f"data length {data.size} != {p}*{d}**{r}")
    if r <= 1 or p == 0:
        return data.copy()
    blocks = data.reshape(p, d**r)
    canon, counts = _orbit_info(d, r)
    out = np.empty_like(blocks)
    for k in range(p):
        sums = np.bincount(canon, weights=blocks[k], minlength=blocks.shape[1])
        out[k] = sums[canon] / counts[canon]
    return out.reshape(-1)


def materialize_symmetrizer(d, r, sparse=True):
    """Build S_{d,r} explicitly (d**r x d**r, value 1/|orbit| on each orbit block)."""
    n = check_entries(d**r, "symmetrizer dimension")
    canon, counts = _orbit_info(d, r)
    nnz = int(np.sum(counts[counts > 0] ** 2))
    check_entries(nnz, "symmetrizer nonzeros")
    order = np.argsort(canon, kind="stable")
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz)
    start = out = 0
    while start < n:
        size = counts[canon[order[start]]]
        group = order[start : start + size]
        block = size * size
        rows[out : out + block] = np.repeat(group, size)
        cols[out : out + block] = np.tile(group, size)
        vals[out : out + block] = 1.0 / size
        start += size
        out += block
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return mat if sparse else mat.toarray()


@dataclass(frozen=True)
class SymmetrizerHandle:
    """S_{d,r} as a matrix-free operator or a materialized sparse matrix."""

    d: int
    r: int
    matrix: sp.spmatrix | None = None

    @property
    def matrix_free(self):
        return self.matrix is None

    def apply(self, v):
        if self.matrix is None:
            return symmetrize(v, self.d, self.r)
        v = np.asarray(v, dtype=float).reshape(-1)
        if v.size != self.d**self.r:
            raise ShapeError(f"vector length {v.size} != {self.d}**{self.r}")
        return self.matrix @ v


def symmetrizer_handle(d, r, materialize=False):
    """Create a SymmetrizerHandle, optionally with the explicit sparse matrix."""
    matrix = materialize_symmetrizer(d, r) if materialize else None
    return SymmetrizerHandle(d=d, r=r, matrix=matrix)


def apply_symmetrizer(handle, v):
    """Apply a SymmetrizerHandle to a vector of length d**r."""
    return handle.apply(v)


@dataclass(frozen=True)
class UniqueLayout:
    """Compression layout for the C(d+r-1, r) distinct entries of a symmetric vector.

    canonical_list holds the non-decreasing index tuples in lexicographic
    order; multiplicities[k] is the orbit size r!/(r_1! ... r_k!) of tuple k,
    summing to d**r.
    """

    d: int
    r: int
    count: int
    canonical_list: tuple = field(repr=False)
    multiplicities: np.ndarray = field(repr=False)
    positions: np.ndarray = field(repr=False)  # 0-based canonical positions
    _rank: np.ndarray = field(repr=False)  # canonical position -> 0-based rank


@lru_cache(maxsize=32)
def unique_layout(d, r):
    canon, counts = _orbit_info(d, r)
    positions = np.flatnonzero(canon == np.arange(canon.size))
    canonical_list = tuple(combinations_with_replacement(range(1, d + 1), r))
    count = math.comb(d + r - 1, r)
    if len(canonical_list) != count or positions.size != count:
        raise AssertionError("canonical enumeration out of sync with orbit map")
    rank = np.zeros(canon.size, dtype=np.int64)
    rank[positions] = np.arange(count)
    return UniqueLayout(
        d=d,
        r=r,
        count=count,
        canonical_list=canonical_list,
        multiplicities=counts[positions].copy(),
        positions=positions,
        _rank=rank,
    )


def compress_unique(v, layout, tol=1e-9):
    """Extract the distinct entries of a symmetric vector, canonical order.

    Rejects input whose deviation from its symmetrization exceeds tol
    relative to the vector max-norm.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    d, r = layout.d, layout.r
    if v.size != d**r:
        raise ShapeError(f"vector length {v.size} != {d}**{r}")
    scale = max(np.max(np.abs(v)), 1e-300)
    dev = np.max(np.abs(v - symmetrize(v, d, r)))
    if dev > tol * scale:
        raise NonSymmetricInput(
            f"input deviates from its symmetrization by {dev:.3e} (scale {scale:.3e})"
        )
    return v[layout.positions].copy()


def expand_unique(u, layout):
    """Rebuild the full d**r vector from its distinct entries."""
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.size != layout.count:
        raise ShapeError(f"unique vector length {u.size} != {layout.count}")
    canon, _ = _orbit_info(layout.d, layout.r)
    return u[layout._rank[canon]]


def orbit_size(indices):
    """Number of distinct permutations of an index tuple: r!/(prod of run factorials)."""
    size = math.factorial(len(indices))
    for i in set(indices):
        size //= math.factorial(indices.count(i))
    return size
