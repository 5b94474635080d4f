"""Dense Kronecker-structured linear algebra.

Kronecker products and powers, the vec / inverse-vec pair and commutation
matrices.  Matrices are plain 2-d numpy arrays; vectors are 1-d arrays.
All vec/inv_vec layout is column-major (Fortran order), so ``vec`` of an
F-contiguous array is a zero-copy view.
"""

import numpy as np

from .errors import ShapeError, SizeOverflow

# Reject results with more entries than this (protects against d**r blowup).
MAX_ENTRIES = 1 << 26


def check_entries(n, what="result"):
    """Raise SizeOverflow when an object would hold more than MAX_ENTRIES numbers."""
    if n > MAX_ENTRIES:
        raise SizeOverflow(f"{what} would hold {n} entries (limit {MAX_ENTRIES})")
    return n


def as_matrix(a):
    """Coerce to a 2-d float array; 1-d input becomes a column vector."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return a.reshape(1, 1)
    if a.ndim == 1:
        return a.reshape(-1, 1)
    if a.ndim != 2:
        raise ShapeError(f"expected at most 2 dimensions, got {a.ndim}")
    return a


def kron(a, b):
    """Kronecker product of two matrices (vectors are treated as columns)."""
    a = as_matrix(a)
    b = as_matrix(b)
    check_entries(a.shape[0] * b.shape[0] * a.shape[1] * b.shape[1], "kron product")
    return np.kron(a, b)


def kron_power(a, r):
    """r-th Kronecker power, with a**(⊗0) = [[1]] and a**(⊗1) = a."""
    if r < 0:
        raise ShapeError("Kronecker power order must be non-negative")
    a = as_matrix(a)
    check_entries((a.shape[0] ** r) * (a.shape[1] ** r), "kron power")
    if r == 0:
        return np.ones((1, 1))
    out = a
    for _ in range(r - 1):
        out = np.kron(out, a)
    return out


def vec_kron_power(x, r):
    """r-th Kronecker power of a vector, returned 1-d (length len(x)**r)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    check_entries(len(x) ** r, "kron power")
    if r == 0:
        return np.ones(1)
    out = x
    for _ in range(r - 1):
        out = np.kron(out, x)
    return out


def vec(a):
    """Stack the columns of a matrix into one vector."""
    return as_matrix(a).reshape(-1, order="F")


def inv_vec(x, m, n):
    """Inverse of vec: rebuild the m-by-n matrix whose columns were stacked.

    Implemented as a column-major reshape; the closed-form matrix expression
    {(vecᵀ Iₙ) ⊗ I_m}(Iₙ ⊗ x) is kept in :func:`inv_vec_closed_form` as an
    independent check, not as the computation path.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != m * n:
        raise ShapeError(f"cannot reshape length {x.size} into {m}x{n}")
    return x.reshape((m, n), order="F")


def inv_vec_closed_form(x, m, n):
    """Inverse vec via the explicit matrix formula {(vecᵀIₙ)⊗I_m}(Iₙ⊗x).

    O((mn)^2) — exists as a correctness oracle for :func:`inv_vec`.
    """
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    if x.size != m * n:
        raise ShapeError(f"cannot reshape length {x.size} into {m}x{n}")
    eye_n = np.eye(n)
    left = np.kron(vec(eye_n).reshape(1, -1), np.eye(m))
    return left @ np.kron(eye_n, x)


def commutation_matrix(m, n):
    """Permutation matrix K_{m,n} with K_{m,n} vec(A) = vec(Aᵀ) for A m-by-n."""
    size = m * n
    check_entries(size * size, "commutation matrix")
    k = np.zeros((size, size))
    cols = np.arange(size)
    i, j = cols % m, cols // m
    k[i * n + j, cols] = 1.0
    return k


def kron_matvec_power(a, v, r):
    """Apply the r-th Kronecker power of a square matrix to a vector.

    Computes (a ⊗ ... ⊗ a) v by r successive mode products, avoiding the
    d**r-by-d**r materialization.
    """
    a = as_matrix(a)
    d = a.shape[0]
    if a.shape[1] != d:
        raise ShapeError("kron_matvec_power needs a square matrix")
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != d**r:
        raise ShapeError(f"vector length {v.size} != {d}**{r}")
    if r == 0:
        return v.copy()
    t = v.reshape((d,) * r)
    for axis in range(r):
        t = np.moveaxis(np.tensordot(a, t, axes=(1, axis)), 0, axis)
    return t.reshape(-1)
