"""numba implementations of the propagation kernels."""

import numba
import numpy as np
import scipy.linalg


@numba.njit(cache=True)
def _block_matvec(blk_row, blk_col, blk_cidx, blk_ab, coefs, x2, y2, p):
    nb = blk_row.shape[0]
    nr = x2.shape[1]
    for b in range(nb):
        c = coefs[blk_cidx[b]]
        if c == 0j:
            continue
        r = blk_row[b]
        cc = blk_col[b]
        ab = blk_ab[b]
        for i in range(nr):
            j0 = i - p if i - p > 0 else 0
            j1 = i + p + 1 if i + p + 1 < nr else nr
            acc = 0j
            for j in range(j0, j1):
                acc += ab[p + i - j, j] * x2[cc, j]
            y2[r, i] += c * acc


@numba.njit(cache=True)
def _chol_solve(cb, x2, p):
    # cb: upper Cholesky band (p+1, nr), A = R^T R; solves in place per channel
    nch, nr = x2.shape
    for ch in range(nch):
        for i in range(nr):
            acc = x2[ch, i]
            j0 = i - p if i - p > 0 else 0
            for j in range(j0, i):
                acc -= cb[p + j - i, i] * x2[ch, j]
            x2[ch, i] = acc / cb[p, i]
        for i in range(nr - 1, -1, -1):
            acc = x2[ch, i]
            j1 = i + p + 1 if i + p + 1 < nr else nr
            for j in range(i + 1, j1):
                acc -= cb[p + i - j, j] * x2[ch, j]
            x2[ch, i] = acc / cb[p, i]


class HamiltonianApplier:
    """y = sum_b coefs[cidx_b] * Band(ab_b) x over channel blocks."""

    def __init__(self, nch, nr, p, blk_row, blk_col, blk_cidx, blk_ab, ncoef):
        self.nch, self.nr, self.p, self.ncoef = nch, nr, p, ncoef
        self._row = np.ascontiguousarray(blk_row, dtype=np.int64)
        self._col = np.ascontiguousarray(blk_col, dtype=np.int64)
        self._cidx = np.ascontiguousarray(blk_cidx, dtype=np.int64)
        self._ab = np.ascontiguousarray(blk_ab, dtype=np.complex128)

    def apply(self, coefs, x2, out=None):
        if out is None:
            out = np.zeros_like(x2)
        else:
            out[:] = 0.0
        _block_matvec(self._row, self._col, self._cidx, self._ab,
                      np.ascontiguousarray(coefs, dtype=np.complex128), x2, out, self.p)
        return out


class OverlapSolver:
    """In-place solve of S y = x per channel, S the banded overlap."""

    def __init__(self, s_band, p):
        # s_band in full (2p+1, nr) layout; factor the upper part
        upper = np.ascontiguousarray(np.asarray(s_band, dtype=float)[: p + 1])
        self._cb = scipy.linalg.cholesky_banded(upper, lower=False)
        self.p = p

    def solve_inplace(self, x2):
        _chol_solve(self._cb, x2, self.p)
        return x2
