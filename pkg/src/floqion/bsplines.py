"""B-spline evaluation on clamped knot sequences.

Order-k splines (polynomial degree k-1), clamped ends with multiplicity k.
Evaluation uses the de Boor triangular recursion, vectorized over points;
derivatives come from the order-(k-1) values.  Two splines overlap only if
their indices differ by less than k, so all one-dimensional operator
matrices are banded with bandwidth 2k-1.
"""

import numpy as np


def make_breakpoints(rmax, n_breakpoints, rule="linear"):
    """Strictly increasing breakpoints on [0, rmax].

    rule: "linear", or "power:<gamma>" which clusters points near the origin
    as rmax*(i/N)**gamma (gamma > 1).
    """
    if rmax <= 0:
        raise ValueError(f"rmax must be positive, got {rmax}")
    s = np.linspace(0.0, 1.0, n_breakpoints)
    if rule == "linear":
        return rmax * s
    if rule.startswith("power:"):
        gamma = float(rule.split(":", 1)[1])
        if gamma <= 0:
            raise ValueError(f"power spacing exponent must be positive, got {gamma}")
        return rmax * s**gamma
    raise ValueError(f"unknown spacing rule {rule!r}")


def clamped_knots(breakpoints, k):
    """Knot vector with multiplicity k at both ends."""
    bp = np.asarray(breakpoints, dtype=float)
    if np.any(np.diff(bp) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    return np.concatenate([np.full(k - 1, bp[0]), bp, np.full(k - 1, bp[-1])])


def n_splines(breakpoints, k):
    return len(breakpoints) + k - 2


def find_spans(knots, k, x):
    """Knot-span index s with t[s] <= x < t[s+1], clamped to valid spans."""
    nt = len(knots)
    s = np.searchsorted(knots, x, side="right") - 1
    return np.clip(s, k - 1, nt - k - 1)


def eval_splines(knots, k, x, spans=None):
    """Values and derivatives of the k splines that are nonzero at each x.

    Returns (first_index, vals, ders) with vals[..., a] the value of spline
    first_index + a, a = 0..k-1.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if spans is None:
        spans = find_spans(knots, k, x)
    npts = x.shape[0]
    left = np.empty((npts, k))
    right = np.empty((npts, k))
    vals = np.zeros((npts, k))
    vals[:, 0] = 1.0
    prev = None  # order-(k-1) values, for derivatives
    for j in range(1, k):
        left[:, j] = x - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - x
        if j == k - 1:
            prev = vals[:, :j].copy()
        saved = np.zeros(npts)
        for r in range(j):
            denom = right[:, r + 1] + left[:, j - r]
            temp = np.where(denom != 0.0, vals[:, r] / np.where(denom == 0.0, 1.0, denom), 0.0)
            vals[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        vals[:, j] = saved
    if k == 1:
        return spans - k + 1, vals, np.zeros_like(vals)

    ders = np.zeros((npts, k))
    first = spans - k + 1
    for a in range(k):
        i = first + a
        term = np.zeros(npts)
        if a >= 1:
            dt = knots[i + k - 1] - knots[i]
            term += np.where(dt != 0.0, prev[:, a - 1] / np.where(dt == 0.0, 1.0, dt), 0.0)
        if a <= k - 2:
            dt = knots[i + k] - knots[i + 1]
            term -= np.where(dt != 0.0, prev[:, a] / np.where(dt == 0.0, 1.0, dt), 0.0)
        ders[:, a] = (k - 1) * term
    return first, vals, ders


def gauss_points(breakpoints, order):
    """Gauss-Legendre nodes/weights per breakpoint interval.

    Returns (xq, wq) with shape (n_intervals, order).
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    bp = np.asarray(breakpoints, dtype=float)
    lo, hi = bp[:-1], bp[1:]
    mid = 0.5 * (lo + hi)[:, None]
    half = 0.5 * (hi - lo)[:, None]
    return mid + half * nodes[None, :], half * weights[None, :]
