"""NumPy implementation of the index-canonicalization kernel.

Used when the compiled extension is unavailable (or disabled through the
VECDERIV_NO_EXT environment variable).  Same contract as ``_kernels``.
"""

import numpy as np

COMPILED = False


def canonical_position_map(d, r):
    """Map each 0-based position in {0,...,d**r-1} to its orbit representative.

    Position p encodes an index tuple in base d; the representative is the
    position of the sorted (non-decreasing) tuple.  Builds an (n, r) digit
    table, so memory is 8*n*r bytes.
    """
    n = d**r
    if r == 0:
        return np.zeros(1, dtype=np.int64)
    weights = d ** np.arange(r - 1, -1, -1, dtype=np.int64)
    digits = (np.arange(n, dtype=np.int64)[:, None] // weights) % d
    digits.sort(axis=1)
    return digits @ weights
