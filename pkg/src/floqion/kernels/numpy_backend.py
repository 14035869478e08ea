"""numpy/scipy implementations of the propagation kernels.

The block structure is pre-assembled into one sparse CSR matrix per
coefficient slot, so a Hamiltonian application is a handful of BLAS-grade
sparse matvecs; the overlap solve batches all channels into a single
banded Cholesky solve.
"""

import numpy as np
import scipy.linalg
import scipy.sparse


class HamiltonianApplier:
    def __init__(self, nch, nr, p, blk_row, blk_col, blk_cidx, blk_ab, ncoef):
        self.nch, self.nr, self.p, self.ncoef = nch, nr, p, ncoef
        n = nch * nr
        mats = []
        for q in range(ncoef):
            rows, cols, vals = [], [], []
            for b in range(len(blk_row)):
                if blk_cidx[b] != q:
                    continue
                ab = blk_ab[b]
                r0, c0 = blk_row[b] * nr, blk_col[b] * nr
                for d in range(-p, p + 1):
                    j = np.arange(max(0, -d), min(nr, nr - d))
                    i = j + d
                    v = ab[p + d, j]
                    nz = v != 0.0
                    rows.append(r0 + i[nz])
                    cols.append(c0 + j[nz])
                    vals.append(v[nz])
            if rows:
                m = scipy.sparse.coo_matrix(
                    (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                    shape=(n, n), dtype=np.complex128,
                ).tocsr()
            else:
                m = scipy.sparse.csr_matrix((n, n), dtype=np.complex128)
            mats.append(m)
        self._mats = mats

    def apply(self, coefs, x2, out=None):
        x = x2.reshape(-1)
        y = np.zeros_like(x)
        for q, m in enumerate(self._mats):
            c = coefs[q]
            if c != 0.0 and m.nnz:
                y += c * (m @ x)
        y = y.reshape(x2.shape)
        if out is not None:
            out[:] = y
            return out
        return y


class OverlapSolver:
    def __init__(self, s_band, p):
        upper = np.ascontiguousarray(np.asarray(s_band, dtype=float)[: p + 1])
        self._cb = scipy.linalg.cholesky_banded(upper, lower=False)
        self.p = p

    def solve_inplace(self, x2):
        sol = scipy.linalg.cho_solve_banded((self._cb, False), x2.T, check_finite=False)
        x2[:] = sol.T
        return x2
