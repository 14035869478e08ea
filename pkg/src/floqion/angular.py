"""Angular-momentum algebra for partial-wave channels.

Matrix elements of the renormalized spherical harmonics C^L_M
(C^L_M = sqrt(4pi/(2L+1)) Y_LM), Wigner 3j symbols via the Racah sum, and
the channel lists used by the linear (m=0) and circular (co-rotating)
couplings.  Solid harmonics: z = r C^1_0, x = r (C^1_-1 - C^1_1)/sqrt(2),
y = i r (C^1_-1 + C^1_1)/sqrt(2).
"""

from functools import lru_cache
from math import lgamma, sqrt

import numpy as np


@lru_cache(maxsize=None)
def _lnfac(n):
    return lgamma(n + 1)


@lru_cache(maxsize=100000)
def wigner_3j(j1, j2, j3, m1, m2, m3):
    """Wigner 3j symbol for integer arguments (Racah formula)."""
    if m1 + m2 + m3 != 0:
        return 0.0
    if j3 < abs(j1 - j2) or j3 > j1 + j2:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    # triangle coefficient
    lndelta = 0.5 * (
        _lnfac(j1 + j2 - j3) + _lnfac(j1 - j2 + j3) + _lnfac(-j1 + j2 + j3)
        - _lnfac(j1 + j2 + j3 + 1)
    )
    lnpre = 0.5 * (
        _lnfac(j1 + m1) + _lnfac(j1 - m1) + _lnfac(j2 + m2) + _lnfac(j2 - m2)
        + _lnfac(j3 + m3) + _lnfac(j3 - m3)
    )
    tmin = max(0, j2 - j3 - m1, j1 - j3 + m2)
    tmax = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = 0.0
    for t in range(tmin, tmax + 1):
        lnterm = (
            _lnfac(t) + _lnfac(j3 - j2 + m1 + t) + _lnfac(j3 - j1 - m2 + t)
            + _lnfac(j1 + j2 - j3 - t) + _lnfac(j1 - m1 - t) + _lnfac(j2 + m2 - t)
        )
        total += (-1.0) ** t * np.exp(lndelta + lnpre - lnterm)
    return (-1.0) ** (j1 - j2 - m3) * total


@lru_cache(maxsize=100000)
def c_tensor(L, M, l2, m2, l1, m1):
    """<l2 m2 | C^L_M | l1 m1>."""
    if m2 != m1 + M:
        return 0.0
    pre = (-1.0) ** m2 * sqrt((2 * l1 + 1) * (2 * l2 + 1))
    return (
        pre
        * wigner_3j(l2, L, l1, 0, 0, 0)
        * wigner_3j(l2, L, l1, -m2, M, m1)
    )


def cz(l, m):
    """<l+1, m | C^1_0 | l, m> (closed form)."""
    return sqrt(((l + 1) ** 2 - m**2) / ((2 * l + 1) * (2 * l + 3)))


def dipole_angular(q, l_bra, m_bra, l_ket, m_ket):
    """<l_bra m_bra | C^1_q | l_ket m_ket>, zero unless |dl| = 1 and dm = q."""
    if abs(l_bra - l_ket) != 1 or m_bra != m_ket + q:
        return 0.0
    return c_tensor(1, q, l_bra, m_bra, l_ket, m_ket)


def linear_channels(lmax):
    """(l, m=0) channels coupled by z from an s ground state."""
    return [(l, 0) for l in range(lmax + 1)]


def circular_channels(lmax):
    """(l, m) channels reachable from (0,0) with dm = +-1, dl = +-1 steps.

    l - m stays even, so there are l+1 channels per l.
    """
    return [(l, m) for l in range(lmax + 1) for m in range(-l, l + 1) if (l - m) % 2 == 0]


def channel_index(channels):
    return {ch: i for i, ch in enumerate(channels)}
