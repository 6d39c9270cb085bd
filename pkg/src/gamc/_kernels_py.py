"""Pure-numpy fallback for the compiled aggregation kernels.

np.add.at applies additions in index order, which for CSR-sorted rows is the
same per-row order as the compiled loop, so the two backends agree bitwise.
"""

import numpy as np


def neighbor_sum(offsets, cols, h):
    """Row i of the result is the sum of h rows over the CSR neighbors of i."""
    n = offsets.shape[0] - 1
    out = np.zeros((n, h.shape[1]), dtype=np.float64)
    if cols.shape[0]:
        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
        np.add.at(out, rows, h[cols])
    return out
