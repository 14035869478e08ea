"""Block-banded operator containers shared by the Floquet assembly and the
time propagator.

A BlockSet is a list of banded radial blocks between angular channels, each
tagged with a coefficient slot: slot 0 is static (coefficient 1), higher
slots are scaled by time-dependent field coefficients at application time.
"""

import numpy as np
import scipy.sparse

from . import kernels


def band_to_coo(ab, p, row0=0, col0=0, scale=1.0):
    """COO triplets of a banded block placed at (row0, col0)."""
    nr = ab.shape[1]
    rows, cols, vals = [], [], []
    for d in range(-p, p + 1):
        j = np.arange(max(0, -d), min(nr, nr - d))
        i = j + d
        v = scale * ab[p + d, j]
        nz = v != 0.0
        rows.append(row0 + i[nz])
        cols.append(col0 + j[nz])
        vals.append(v[nz])
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def band_matvec_channels(ab, p, x2):
    """Apply one banded matrix to every channel row of x2 (nch, nr)."""
    nr = x2.shape[1]
    y = np.zeros_like(x2)
    for d in range(-p, p + 1):
        j = np.arange(max(0, -d), min(nr, nr - d))
        y[:, j + d] += ab[p + d, j] * x2[:, j]
    return y


class BlockSet:
    """Banded channel-coupling blocks with coefficient slots."""

    def __init__(self, channels, nr, p, ncoef):
        self.channels = list(channels)
        self.index = {ch: i for i, ch in enumerate(self.channels)}
        self.nch = len(self.channels)
        self.nr = nr
        self.p = p
        self.ncoef = ncoef
        self._rows, self._cols, self._cidx, self._abs = [], [], [], []

    def add(self, row_ch, col_ch, cidx, ab):
        self._rows.append(self.index[row_ch])
        self._cols.append(self.index[col_ch])
        self._cidx.append(cidx)
        self._abs.append(np.asarray(ab, dtype=np.complex128))

    def applier(self):
        return kernels.HamiltonianApplier(
            self.nch, self.nr, self.p,
            np.asarray(self._rows), np.asarray(self._cols), np.asarray(self._cidx),
            np.stack(self._abs), self.ncoef,
        )

    def to_sparse(self, coefs):
        """Assemble sum_b coefs[cidx_b] * block_b as one sparse CSC matrix."""
        n = self.nch * self.nr
        rr, cc, vv = [], [], []
        for b in range(len(self._rows)):
            c = coefs[self._cidx[b]]
            if c == 0.0:
                continue
            r, co, v = band_to_coo(self._abs[b], self.p,
                                   self._rows[b] * self.nr, self._cols[b] * self.nr, c)
            rr.append(r), cc.append(co), vv.append(v)
        if not rr:
            return scipy.sparse.csc_matrix((n, n), dtype=np.complex128)
        return scipy.sparse.coo_matrix(
            (np.concatenate(vv), (np.concatenate(rr), np.concatenate(cc))),
            shape=(n, n),
        ).tocsc()
