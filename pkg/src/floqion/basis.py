"""Radial B-spline basis per angular channel, with exterior complex scaling.

The reduced radial functions u(r) = r R(r) are expanded in order-k
B-splines on [0, rmax] with the first and last spline removed (u amplitude
pinned to zero at both ends).  With ECS active, the radial coordinate
follows the contour q(x) = x below the turning radius R0 and
q(x) = R0 + (x - R0) e^{i theta} beyond it; a knot sits exactly at R0 so
every quadrature panel lies on one straight piece of the contour and the
banded structure survives.  Matrix elements are Gauss-Legendre integrals
per knot interval, which makes assembly deterministic (bit-identical on
repeat) and exact for products of two splines.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import angular, bsplines


@dataclass(frozen=True)
class ECS:
    """Exterior-scaling contour: turning radius r0, rotation angle theta."""

    r0: float
    theta: float


@dataclass(frozen=True)
class OperatorMatrix:
    """One banded operator block between two angular channels."""

    ab: np.ndarray          # band storage, ab[p + i - j, j]
    halfband: int
    bra: tuple              # (l, m) of rows
    ket: tuple              # (l, m) of columns
    gauge: str = "none"     # length | velocity | none
    component: str = ""

    @property
    def bandwidth(self):
        return 2 * self.halfband + 1


class RadialBasis:
    def __init__(self, breakpoints, k, ecs=None, quad_order=None):
        if k < 4:
            raise ValueError(f"B-spline order must be >= 4, got {k}")
        breakpoints = np.asarray(breakpoints, dtype=float)
        if breakpoints[0] != 0.0:
            raise ValueError("breakpoints must start at r = 0")
        rmax = float(breakpoints[-1])
        if ecs is not None:
            if not 0.0 < ecs.r0 < rmax:
                raise ValueError(f"ECS turning radius {ecs.r0} outside (0, rmax={rmax})")
            if not 0.0 < ecs.theta < np.pi / 2:
                raise ValueError(f"ECS angle {ecs.theta} outside (0, pi/2)")
            # sharp-knot contour: snap the nearest interior breakpoint onto r0
            idx = int(np.argmin(np.abs(breakpoints[1:-1] - ecs.r0))) + 1
            breakpoints = breakpoints.copy()
            breakpoints[idx] = ecs.r0
            if np.any(np.diff(breakpoints) <= 0):
                raise ValueError("ECS turning radius collides with the breakpoint grid")
        self.breakpoints = breakpoints
        self.k = k
        self.p = k - 1
        self.rmax = rmax
        self.ecs = ecs
        self.quad_order = quad_order if quad_order is not None else k + 8
        self.knots = bsplines.clamped_knots(breakpoints, k)
        self.n_total = bsplines.n_splines(breakpoints, k)
        self.nuse = self.n_total - 2

        xq, wq = bsplines.gauss_points(breakpoints, self.quad_order)
        self._xq, self._wq = xq, wq
        flat = xq.ravel()
        first, vals, ders = bsplines.eval_splines(self.knots, k, flat)
        nint, nq = xq.shape
        self._bval = vals.reshape(nint, nq, k)
        self._bder = ders.reshape(nint, nq, k)
        # eval_splines assigns each panel point to its own interval
        assert np.all(first.reshape(nint, nq) == np.arange(nint)[:, None])

        if ecs is None:
            self._qq = xq
            self._dq = np.ones_like(xq)
        else:
            mid = 0.5 * (breakpoints[:-1] + breakpoints[1:])
            rot = (mid > ecs.r0)[:, None]
            phase = np.exp(1j * ecs.theta)
            self._qq = np.where(rot, ecs.r0 + (xq - ecs.r0) * phase, xq + 0j)
            self._dq = np.where(rot, phase, 1.0 + 0j)
        self._op_cache = {}

    # -- construction helpers -------------------------------------------------

    def real(self):
        """The same knot grid without complex scaling."""
        if self.ecs is None:
            return self
        return self._real_twin

    @cached_property
    def _real_twin(self):
        return RadialBasis(self.breakpoints, self.k, ecs=None, quad_order=self.quad_order)

    @property
    def dtype(self):
        return np.complex128 if self.ecs is not None else np.float64

    # -- banded assembly ------------------------------------------------------

    def _accumulate(self, panel_vals):
        """Scatter per-interval (k x k) contributions into band storage."""
        k, p, n = self.k, self.p, self.n_total
        ab = np.zeros((2 * p + 1, n), dtype=panel_vals.dtype)
        nint = panel_vals.shape[0]
        cols = np.arange(nint)
        for a in range(k):
            for b in range(k):
                np.add.at(ab[p + a - b], cols + b, panel_vals[:, a, b])
        # remove first/last spline: zero their rows, drop their columns
        for j in range(p + 1):
            ab[p - j, j] = 0.0
        for j in range(n - 1 - p, n):
            ab[p + (n - 1) - j, j] = 0.0
        return np.ascontiguousarray(ab[:, 1 : n - 1])

    def _weighted(self, f_of_q, with_measure=True):
        w = self._wq * (self._dq if with_measure else 1.0)
        if f_of_q is not None:
            w = w * f_of_q(self._qq)
        return w

    def mult_op(self, f_of_q=None):
        """Band matrix of a multiplicative operator f(q) (f=None: overlap)."""
        w = self._weighted(f_of_q)
        vals = np.einsum("iq,iqa,iqb->iab", w, self._bval, self._bval)
        return self._accumulate(vals)

    def overlap(self):
        return self._cached("overlap", lambda: self.mult_op(None))

    def kinetic(self):
        """-(1/2) d^2/dq^2 in symmetric (integrated-by-parts) form."""
        def build():
            w = 0.5 * self._wq / self._dq
            vals = np.einsum("iq,iqa,iqb->iab", w, self._bder, self._bder)
            return self._accumulate(vals)
        return self._cached("kinetic", build)

    def deriv_op(self):
        """Band matrix of d/dq: integral B_i dB_j/dx dx (contour independent)."""
        def build():
            vals = np.einsum("iq,iqa,iqb->iab", self._wq, self._bval, self._bder)
            return self._accumulate(vals)
        return self._cached("deriv", build)

    def inv_r(self):
        return self._cached("inv_r", lambda: self.mult_op(lambda q: 1.0 / q))

    def inv_r2(self):
        return self._cached("inv_r2", lambda: self.mult_op(lambda q: 1.0 / q**2))

    def radial_r(self):
        return self._cached("radial_r", lambda: self.mult_op(lambda q: q))

    def potential_op(self, model):
        return self._cached(("pot", model.name), lambda: self.mult_op(model.potential))

    def cap_op(self, eta, r_cap):
        """-i eta (r - r_cap)^2 beyond r_cap (real contour only)."""
        if self.ecs is not None:
            raise ValueError("CAP is meant for the unscaled contour; use basis.real()")
        if r_cap >= self.rmax:
            raise ValueError(f"CAP onset {r_cap} must lie inside the box (rmax={self.rmax})")
        def f(q):
            d = np.clip(q - r_cap, 0.0, None)
            return -1j * eta * d**2
        return self.mult_op(f)

    def channel_hamiltonian(self, model, l):
        """Banded H_l = kinetic + l(l+1)/2q^2 + V(q)."""
        key = ("ham", model.name, l)
        def build():
            h = self.kinetic() + self.potential_op(model)
            if l > 0:
                h = h + 0.5 * l * (l + 1) * self.inv_r2()
            return h
        return self._cached(key, build)

    def _cached(self, key, build):
        if key not in self._op_cache:
            self._op_cache[key] = build()
        return self._op_cache[key]

    # -- dense/eval helpers ---------------------------------------------------

    def band_to_dense(self, ab):
        p, n = self.p, self.nuse
        m = np.zeros((n, n), dtype=ab.dtype)
        for d in range(-p, p + 1):
            diag = np.diagonal(m, d)
            i = np.arange(max(0, -d), min(n, n - d))
            m[i, i + d] = ab[p - d, i + d]
        return m

    def band_matvec(self, ab, x):
        p, n = self.p, self.nuse
        y = np.zeros(n, dtype=np.result_type(ab, x))
        for d in range(-p, p + 1):
            i = np.arange(max(0, -d), min(n, n - d))
            y[i] += ab[p - d, i + d] * x[i + d]
        return y

    def point_weights(self, r):
        """Dense row vectors (w_val, w_der) so that u(r) = w_val @ coeffs."""
        first, vals, ders = bsplines.eval_splines(self.knots, self.k, np.atleast_1d(r))
        w_val = np.zeros(self.nuse)
        w_der = np.zeros(self.nuse)
        for a in range(self.k):
            g = first[0] + a
            if 1 <= g <= self.n_total - 2:
                w_val[g - 1] = vals[0, a]
                w_der[g - 1] = ders[0, a]
        return w_val, w_der

    def evaluate(self, coeffs, r, der=False):
        """u(r) (or u'(r)) from usable-spline coefficients."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        first, vals, ders = bsplines.eval_splines(self.knots, self.k, r)
        tab = ders if der else vals
        out = np.zeros(r.shape, dtype=np.result_type(coeffs, tab))
        for a in range(self.k):
            g = first + a
            ok = (g >= 1) & (g <= self.n_total - 2)
            out[ok] += tab[ok, a] * np.asarray(coeffs)[g[ok] - 1]
        return out if out.shape != (1,) else out[0]


def build_basis(rmax, k, n_breakpoints, spacing_rule="linear", ecs=None, quad_order=None):
    """Construct a RadialBasis on [0, rmax]."""
    if n_breakpoints < k + 2:
        raise ValueError(f"need at least k+2 = {k + 2} breakpoints, got {n_breakpoints}")
    bp = bsplines.make_breakpoints(rmax, n_breakpoints, spacing_rule)
    return RadialBasis(bp, k, ecs=ecs, quad_order=quad_order)


def default_ecs(rmax, r0_fraction=0.75, theta=0.4):
    return ECS(r0=r0_fraction * rmax, theta=theta)


def assemble_channel_hamiltonian(basis, atom, l):
    """Spec surface: banded (H_l, S) pair as OperatorMatrix."""
    if l < 0:
        raise ValueError("l must be >= 0")
    ab = basis.channel_hamiltonian(atom, l)
    return OperatorMatrix(ab=ab, halfband=basis.p, bra=(l, 0), ket=(l, 0))


def assemble_overlap(basis, l=0, m=0):
    return OperatorMatrix(ab=basis.overlap(), halfband=basis.p, bra=(l, m), ket=(l, m))


def _x_coefficient(l_bra, m_bra, l_ket, m_ket):
    """<bra| x/r |ket> angular factor: (C^1_-1 - C^1_1)/sqrt(2)."""
    c = 0.0
    if m_bra == m_ket - 1:
        c += angular.c_tensor(1, -1, l_bra, m_bra, l_ket, m_ket)
    if m_bra == m_ket + 1:
        c -= angular.c_tensor(1, +1, l_bra, m_bra, l_ket, m_ket)
    return c / np.sqrt(2.0)


def assemble_dipole_block(basis, l, lp, m, mp, gauge="length", component="z"):
    """Banded dipole block <l', m'| O |l, m>.

    component "z": O = z (length) or d/dz (velocity); component "x" likewise
    along x.  Velocity blocks are matrix elements of the gradient; multiply
    by -i for the momentum operator.
    """
    if abs(l - lp) != 1:
        raise ValueError(f"dipole selection rule |l-l'| = 1 violated: {l} -> {lp}")
    if component == "z":
        if m != mp:
            raise ValueError(f"z dipole requires m' = m, got {m} -> {mp}")
        coeff = angular.c_tensor(1, 0, lp, mp, l, m)
    elif component == "x":
        if abs(mp - m) != 1:
            raise ValueError(f"x dipole requires m' = m +- 1, got {m} -> {mp}")
        coeff = _x_coefficient(lp, mp, l, m)
    else:
        raise ValueError(f"unknown dipole component {component!r}")

    if gauge == "length":
        ab = coeff * basis.radial_r()
    elif gauge == "velocity":
        # gradient formula on reduced radial waves u = r R:
        #   <l+1 | d/dq - (l+1)/q | l>,  <l-1 | d/dq + l/q | l>
        if lp == l + 1:
            ab = coeff * (basis.deriv_op() - (l + 1) * basis.inv_r())
        else:
            ab = coeff * (basis.deriv_op() + l * basis.inv_r())
    else:
        raise ValueError(f"unknown gauge {gauge!r}")
    return OperatorMatrix(ab=ab, halfband=basis.p, bra=(lp, mp), ket=(l, m),
                          gauge=gauge, component=component)
