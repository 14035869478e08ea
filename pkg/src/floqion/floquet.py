"""Floquet/co-rotating Hamiltonians and dressed-state ionization rates.

Linear polarization uses the harmonic-block matrix
H = H0 x 1 + w 1 x D + (E0/2) z x F (length gauge; the velocity gauge
couples with amplitude A0/2 = E0/2w through the momentum form, with the
spatially uniform A^2/2 term removed by a global phase, which shifts Re
lambda by A0^2/4 and leaves the widths untouched).  Circular polarization
uses the static co-rotating frame H = H0 - w Lz + (E0/sqrt 2) x.  With ECS
(or a CAP) the spectrum is complex, lambda = E - i Gamma/2, and the widths
of the two resonances emerging from the 1s/2p-w crossing are the
dressed-state ionization rates.

Eigenvalues near a target are found by shift-invert Arnoldi: one sparse LU
of (H - sigma S), ARPACK on the standard operator (H - sigma S)^{-1} S.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from . import angular, atoms, basis as basis_mod, pulses, units
from .operators import band_to_coo


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class Quasienergy:
    lam: complex
    vector: np.ndarray
    residual: float
    character: str = "other"

    @property
    def energy(self):
        return self.lam.real

    @property
    def gamma(self):
        return -2.0 * self.lam.imag


@dataclass
class FloquetProblem:
    h: scipy.sparse.csc_matrix
    s: scipy.sparse.csc_matrix
    channels: list            # (l, m, k) per block column group
    sizes: np.ndarray         # radial dimension per channel
    offsets: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.h.shape[0]


def _channel_problem(channel_blocks, sizes):
    """Assemble sparse (H, S) from {(i, j): dense-or-(ab,p) blocks}."""
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    rows, cols, vals = [], [], []
    for (i, j), block in channel_blocks:
        if isinstance(block, tuple):
            ab, p, scale = block
            r, c, v = band_to_coo(ab, p, offsets[i], offsets[j], scale)
        else:
            bi, bj = np.nonzero(block)
            r, c, v = bi + offsets[i], bj + offsets[j], block[bi, bj]
        rows.append(r), cols.append(c), vals.append(v)
    n = offsets[-1]
    h = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsc()
    return h, offsets


def _overlap_sparse(s_blocks, sizes):
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    rows, cols, vals = [], [], []
    for i, block in enumerate(s_blocks):
        if isinstance(block, tuple):
            ab, p = block
            r, c, v = band_to_coo(ab, p, offsets[i], offsets[i])
        else:
            bi, bj = np.nonzero(block)
            r, c, v = bi + offsets[i], bj + offsets[i], block[bi, bj]
        rows.append(r), cols.append(c), vals.append(v)
    n = offsets[-1]
    return scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsc()


def _harmonic_range(n_blocks):
    if isinstance(n_blocks, tuple):
        kmin, kmax = n_blocks
    else:
        if n_blocks < 2:
            raise ValueError("need at least 2 harmonic blocks")
        half = (n_blocks - 1) // 2
        kmin, kmax = -half, n_blocks - 1 - half
    return kmin, kmax


def _cap_band(rb, cap):
    if cap is None:
        return None
    eta, r_cap = cap
    return rb.cap_op(eta, r_cap)


def assemble_floquet_linear(model, rb, omega, e0, n_blocks=5, lmax=4, gauge="length",
                            dipole_scale=1.0, cap=None):
    """Floquet problem for linear polarization along z (m = 0 channels)."""
    if e0 < 0:
        raise ValueError("field amplitude must be >= 0")
    if lmax < 1:
        raise ValueError("lmax must be >= 1")
    if gauge not in ("length", "velocity"):
        raise ValueError(f"unknown gauge {gauge!r}")
    kmin, kmax = _harmonic_range(n_blocks)
    channels = [(l, 0, k) for k in range(kmin, kmax + 1) for l in range(lmax + 1)]
    idx = {ch: i for i, ch in enumerate(channels)}
    nr, p = rb.nuse, rb.p
    s_band = rb.overlap()
    cap_band = _cap_band(rb, cap)

    blocks = []
    for (l, m, k), i in idx.items():
        hk = rb.channel_hamiltonian(model, l) + k * omega * s_band
        if cap_band is not None:
            hk = hk + cap_band
        blocks.append(((i, i), (hk, p, 1.0)))

    if gauge == "length":
        amp = 0.5 * e0
        coup = {l: basis_mod.assemble_dipole_block(rb, l, l + 1, 0, 0, "length", "z").ab
                for l in range(lmax)}
        sign_up = sign_down = 1.0  # E0 cos(wt): equal weights on k -> k +- 1
    else:
        amp = 0.5 * e0 / omega
        coup = {l: basis_mod.assemble_dipole_block(rb, l, l + 1, 0, 0, "velocity", "z").ab
                for l in range(lmax)}
        # A0 sin(wt) with the gradient form: -d/dz on k -> k+1, +d/dz on k -> k-1
        sign_up, sign_down = -1.0, 1.0

    if e0 > 0:
        for l in range(lmax):
            scale = dipole_scale if l == 0 else 1.0
            up = coup[l]                       # <l+1| O |l>
            down = _band_transpose(up, p) * (1.0 if gauge == "length" else -1.0)
            for k in range(kmin, kmax + 1):
                for dk, sgn in ((+1, sign_up), (-1, sign_down)):
                    if not (kmin <= k + dk <= kmax):
                        continue
                    blocks.append(((idx[(l + 1, 0, k + dk)], idx[(l, 0, k)]),
                                   (up, p, sgn * scale * amp)))
                    blocks.append(((idx[(l, 0, k + dk)], idx[(l + 1, 0, k)]),
                                   (down, p, sgn * scale * amp)))

    sizes = np.full(len(channels), nr)
    h, offsets = _channel_problem(blocks, sizes)
    s = _overlap_sparse([(s_band, p)] * len(channels), sizes)
    meta = dict(kind="linear", model=model.name, omega=omega, e0=e0, gauge=gauge,
                lmax=lmax, krange=(kmin, kmax), dipole_scale=dipole_scale,
                absorber="ecs" if rb.ecs is not None else ("cap" if cap else None),
                rb=rb, cap=cap, polarization="linear-z")
    return FloquetProblem(h=h, s=s, channels=channels, sizes=sizes, offsets=offsets,
                          meta=meta)


def _band_transpose(ab, p):
    """Band storage of the transpose of a banded matrix."""
    nr = ab.shape[1]
    out = np.zeros_like(ab)
    for d in range(-p, p + 1):
        j = np.arange(max(0, -d), min(nr, nr - d))
        out[p - d, j + d] = ab[p + d, j]
    return out


def assemble_floquet_circular(model, rb, omega, e0, lmax=4, mmax=None,
                              dipole_scale=1.0, cap=None):
    """Co-rotating-frame problem H0 - w Lz + (E0/sqrt 2) x for circular light."""
    if e0 < 0:
        raise ValueError("field amplitude must be >= 0")
    if lmax < 2:
        raise ValueError("two-photon ionization needs lmax >= 2")
    if mmax is None:
        mmax = lmax
    if mmax < 2:
        raise ValueError("mmax must be >= 2 to reach the d-wave continuum")
    channels = [(l, m) for (l, m) in angular.circular_channels(lmax) if abs(m) <= mmax]
    idx = {ch: i for i, ch in enumerate(channels)}
    nr, p = rb.nuse, rb.p
    s_band = rb.overlap()
    cap_band = _cap_band(rb, cap)
    rmat = rb.radial_r()

    blocks = []
    for (l, m), i in idx.items():
        hk = rb.channel_hamiltonian(model, l) - m * omega * s_band
        if cap_band is not None:
            hk = hk + cap_band
        blocks.append(((i, i), (hk, p, 1.0)))

    amp = e0 / np.sqrt(2.0)
    if e0 > 0:
        for (l, m) in channels:
            for lp, mp in ((l + 1, m + 1), (l + 1, m - 1)):
                if (lp, mp) not in idx:
                    continue
                coeff = basis_mod._x_coefficient(lp, mp, l, m)
                scale = dipole_scale if min(l, lp) == 0 else 1.0
                blocks.append(((idx[(lp, mp)], idx[(l, m)]), (rmat, p, amp * coeff * scale)))
                blocks.append(((idx[(l, m)], idx[(lp, mp)]), (rmat, p, amp * coeff * scale)))

    sizes = np.full(len(channels), nr)
    h, offsets = _channel_problem(blocks, sizes)
    s = _overlap_sparse([(s_band, p)] * len(channels), sizes)
    meta = dict(kind="circular", model=model.name, omega=omega, e0=e0, gauge="length",
                lmax=lmax, mmax=mmax, dipole_scale=dipole_scale,
                absorber="ecs" if rb.ecs is not None else ("cap" if cap else None),
                rb=rb, cap=cap, polarization="circular")
    return FloquetProblem(h=h, s=s, channels=[(l, m, 0) for (l, m) in channels],
                          sizes=sizes, offsets=offsets, meta=meta)


def quasienergies_near(problem, target, count=4, v0=None, tol=0):
    """`count` quasienergies nearest `target` with eigenvectors.

    Shift-invert through a sparse LU of (H - sigma S); the problem is posed
    as a standard one for (H - sigma S)^{-1} S, which sidesteps ARPACK's
    need for a definite metric (S is complex symmetric under ECS).
    """
    if problem.meta.get("absorber") is None and problem.meta.get("e0", 0) > 0:
        warnings.warn("no ECS/CAP absorber: quasienergies of a driven problem "
                      "will not carry ionization widths")
    h, s = problem.h, problem.s
    n = h.shape[0]
    lu = scipy.sparse.linalg.splu((h - target * s).tocsc())
    op = scipy.sparse.linalg.LinearOperator(
        (n, n), matvec=lambda v: lu.solve(s @ v), dtype=np.complex128)
    if v0 is None:
        v0 = np.ones(n) / np.sqrt(n)
    try:
        theta, vecs = scipy.sparse.linalg.eigs(op, k=count, which="LM", v0=v0, tol=tol)
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        raise EigensolverError(
            f"shift-invert Arnoldi did not converge at sigma={target}: "
            f"{len(exc.eigenvalues)} of {count} eigenvalues converged"
        ) from exc
    lams = target + 1.0 / theta
    out = []
    for lam, v in zip(lams, vecs.T):
        res = float(np.linalg.norm(h @ v - lam * (s @ v)) / np.linalg.norm(v))
        out.append(Quasienergy(lam=complex(lam), vector=v, residual=res))
    out.sort(key=lambda q: abs(q.lam - target))
    return out


def zero_field_reference(model, rb):
    """E(1s) of the model in this basis (real contour)."""
    return atoms.bound_states(model, rb.real(), 0, 1).by_label("1s").energy


@dataclass
class RateCurve:
    intensities: np.ndarray
    lam_plus: np.ndarray
    lam_minus: np.ndarray
    meta: dict
    flags: list

    @property
    def gamma_plus(self):
        return -2.0 * self.lam_plus.imag

    @property
    def gamma_minus(self):
        return -2.0 * self.lam_minus.imag

    @property
    def e_plus(self):
        return self.lam_plus.real

    @property
    def e_minus(self):
        return self.lam_minus.real


def _assemble(model, rb, polarization, omega, e0, gauge, lmax, n_blocks, mmax,
              dipole_scale, cap):
    if polarization.startswith("linear"):
        return assemble_floquet_linear(model, rb, omega, e0, n_blocks=n_blocks,
                                       lmax=lmax, gauge=gauge,
                                       dipole_scale=dipole_scale, cap=cap)
    return assemble_floquet_circular(model, rb, omega, e0, lmax=lmax, mmax=mmax,
                                     dipole_scale=dipole_scale, cap=cap)


def _overlap_measure(a, b):
    return abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))


def essential_character(problem, model):
    """Weight of the essential 1s/2p subspace in an eigenvector.

    Guards the seeding against spectator lines that sit at the crossing
    (notably the degenerate 2s - w line of hydrogen).
    """
    rb = problem.meta["rb"].real()
    c1s = atoms.bound_states(model, rb, 0, 1).by_label("1s").coeffs
    if problem.meta["kind"] == "linear-spectral":
        c2p = np.zeros(problem.meta["n_kept"])
        c2p[problem.meta["i2p_kept"]] = 1.0
    else:
        c2p = atoms.bound_states(model, rb, 1, 1).by_label("2p").coeffs
    if problem.meta["kind"].startswith("linear"):
        ch1s, ch2p = (0, 0, 0), (1, 0, -1)
    else:
        ch1s, ch2p = (0, 0, 0), (1, 1, 0)
    i1s = problem.channels.index(ch1s)
    i2p = problem.channels.index(ch2p)
    off, sz = problem.offsets, problem.sizes

    def weight(vec):
        v = vec / np.linalg.norm(vec)
        w1 = abs(np.dot(c1s / np.linalg.norm(c1s), v[off[i1s]: off[i1s] + sz[i1s]]))
        w2 = abs(np.dot(c2p / np.linalg.norm(c2p), v[off[i2p]: off[i2p] + sz[i2p]]))
        return w1**2 + w2**2

    return weight


def _interior_mask(problem):
    """Mask selecting coefficients of splines supported inside the ECS radius.

    The exterior contour tails of the eigenvectors are strongly gauge- and
    intensity-dependent; restricting the tracking overlap to the interior
    keeps it anchored on the physical resonance.
    """
    rb = problem.meta["rb"]
    if rb.ecs is None:
        return None
    # usable spline g (1-based) has support [bp[g-k], bp[g]] clipped to the box
    bp, k = rb.breakpoints, rb.k
    nuse = rb.nuse
    ends = np.array([bp[min(g, len(bp) - 1)] for g in range(1, nuse + 1)])
    inner = ends <= rb.ecs.r0 + 1e-12
    mask = np.zeros(problem.dim, dtype=bool)
    for i, sz in enumerate(problem.sizes):
        if sz == nuse:
            mask[problem.offsets[i]: problem.offsets[i] + sz] = inner
        else:
            mask[problem.offsets[i]: problem.offsets[i] + sz] = True
    return mask


def rate_curve(model, polarization, omega, intensity_grid, gauge="length", rb=None,
               lmax=4, n_blocks=7, mmax=None, dipole_scale=1.0, cap=None,
               count=10, refine=True, max_refine_depth=6):
    """Track the two dressed-state resonances over an intensity grid.

    `+` is the branch continued adiabatically from the higher-Re-lambda
    eigenvalue at the lowest intensity.  Tracking is by maximal eigenvector
    overlap (interior region only under ECS) between adjacent intensities,
    with a separate shift-invert target per branch once the branches split;
    lost tracks are refined with intensity midpoints and flagged if
    refinement fails.
    """
    if isinstance(model, str):
        model = atoms.get_model(model)
    if rb is None:
        raise ValueError("pass a RadialBasis (with ECS, or a real one with cap=...)")
    intensities = np.asarray(sorted(intensity_grid), dtype=float)
    e_cross = zero_field_reference(model, rb)

    def assemble(e0):
        return _assemble(model, rb, polarization, omega, e0, gauge, lmax, n_blocks,
                         mmax, dipole_scale, cap)

    flags = []
    lam_p, lam_m = [], []
    mask = None

    def ov(a, b):
        if mask is None:
            return _overlap_measure(a, b)
        return _overlap_measure(a[mask], b[mask])

    def advance(prev_state, e0):
        """One tracked step; returns ((lam+, v+), (lam-, v-)), min overlap."""
        (lp, vp), (lm, vm) = prev_state
        prob = assemble(e0)
        candidates = list(quasienergies_near(prob, 0.5 * (lp + lm) - 1e-6j, count=count))
        # once the branches are well split, aim a target at each separately
        if abs(lp - lm) > 1e-4:
            for sigma in (lp - 1e-6j, lm - 1e-6j):
                candidates.extend(quasienergies_near(prob, sigma, count=max(4, count // 2)))
        best_p = max(candidates, key=lambda q: ov(vp, q.vector))
        best_m = max(candidates, key=lambda q: ov(vm, q.vector))
        if abs(best_p.lam - best_m.lam) < 1e-14:
            # same eigenvalue picked for both: resolve by total overlap
            others_m = sorted(candidates, key=lambda q: -ov(vm, q.vector))
            alt_m = next(q for q in others_m if abs(q.lam - best_p.lam) > 1e-14)
            others_p = sorted(candidates, key=lambda q: -ov(vp, q.vector))
            alt_p = next(q for q in others_p if abs(q.lam - best_m.lam) > 1e-14)
            if (ov(vp, best_p.vector) + ov(vm, alt_m.vector)
                    >= ov(vp, alt_p.vector) + ov(vm, best_m.vector)):
                best_m = alt_m
            else:
                best_p = alt_p
        quality = min(ov(vp, best_p.vector), ov(vm, best_m.vector))
        return ((best_p.lam, best_p.vector), (best_m.lam, best_m.vector)), quality

    # seed at the lowest intensity: among the eigenvalues near the crossing,
    # the two with dominant 1s/2p character (spectator lines can coincide
    # with the crossing, e.g. hydrogen's degenerate 2s - w line)
    e0_first = pulses.intensity_to_amplitude(intensities[0])
    prob0 = assemble(e0_first)
    mask = _interior_mask(prob0)
    char = essential_character(prob0, model)
    qs = quasienergies_near(prob0, e_cross - 1e-6j, count=max(count, 8))
    pair = sorted(qs, key=lambda q: -char(q.vector))[:2]
    pair = sorted(pair, key=lambda q: q.lam.real, reverse=True)
    state = ((pair[0].lam, pair[0].vector), (pair[1].lam, pair[1].vector))
    lam_p.append(state[0][0])
    lam_m.append(state[1][0])

    for i0, i1 in zip(intensities[:-1], intensities[1:]):
        cur_i, cur_state = i0, state
        target_i = i1
        depth = 0
        while True:
            new_state, quality = advance(cur_state, pulses.intensity_to_amplitude(target_i))
            if quality >= 0.5 or depth >= max_refine_depth or not refine:
                if quality < 0.5:
                    flags.append((target_i, f"track overlap {quality:.2f} < 0.5"))
                if target_i == i1:
                    state = new_state
                    break
                cur_i, cur_state = target_i, new_state
                target_i = i1
            else:
                target_i = np.sqrt(cur_i * target_i)  # log midpoint
                depth += 1
        lam_p.append(state[0][0])
        lam_m.append(state[1][0])

    meta = dict(model=model.name, polarization=polarization, omega=omega, gauge=gauge,
                lmax=lmax, n_blocks=n_blocks, mmax=mmax, dipole_scale=dipole_scale,
                absorber="ecs" if rb.ecs is not None else ("cap" if cap else None))
    return RateCurve(intensities=intensities, lam_plus=np.asarray(lam_p),
                     lam_minus=np.asarray(lam_m), meta=meta, flags=flags)


def interior_minimum(curve_values):
    """Index of an interior local minimum, or None."""
    g = np.asarray(curve_values)
    for i in range(1, len(g) - 1):
        if g[i] < g[i - 1] and g[i] < g[i + 1]:
            return i
    return None


# -- p-space truncation study -------------------------------------------------


def _spectral_p_channel(model, rb, cap):
    """Complex-scaled l=1 eigenbasis: (energies, vectors T with T^T S T = 1)."""
    h = rb.channel_hamiltonian(model, 1)
    if cap is not None:
        h = h + _cap_band(rb, cap)
    hd = rb.band_to_dense(h).astype(complex)
    sd = rb.band_to_dense(rb.overlap()).astype(complex)
    ev, vec = scipy.linalg.eig(hd, sd)
    order = np.argsort(ev.real)
    ev, vec = ev[order], vec[:, order]
    # bilinear normalization for the complex-symmetric problem
    for i in range(vec.shape[1]):
        nrm = np.sqrt(vec[:, i] @ sd @ vec[:, i])
        vec[:, i] = vec[:, i] / nrm
    return ev, vec, sd


def _classify_bound(ev):
    return (ev.real < -1e-5) & (np.abs(ev.imag) < 1e-6 + 0.02 * np.abs(ev.real))


SELECTORS = ("none", "remove-bound-except-2p", "remove-continuum")


def truncated_problem(model, rb, omega, e0, selector, e2p, gauge="length",
                      n_blocks=7, lmax=4, dipole_scale=1.0, cap=None):
    """Linear-polarization problem with the l=1 channel in its eigenbasis,
    with selected p states removed.

    selector "none" keeps the full spectral channel (sanity: identical rates
    to the banded representation); the two truncations reproduce the
    restricted-space study.  Selectors that would drop the essential 2p
    state are rejected.
    """
    if selector not in SELECTORS:
        raise ValueError(f"unknown selector {selector!r}; expected one of {SELECTORS}")
    ev, vec, _ = _spectral_p_channel(model, rb, cap)
    bound = _classify_bound(ev)
    i2p = int(np.argmin(np.abs(ev - e2p)))
    if not bound[i2p]:
        raise EigensolverError("2p state not identified as bound in the scaled spectrum")
    if selector == "none":
        keep = np.ones(len(ev), dtype=bool)
    elif selector == "remove-bound-except-2p":
        keep = ~bound
        keep[i2p] = True
    else:  # remove-continuum
        keep = bound
    if not keep[i2p]:
        raise ValueError(f"selector {selector!r} would remove the essential 2p state")

    ev_k = ev[keep]
    t = vec[:, keep]
    nkeep = int(np.sum(keep))

    kmin, kmax = _harmonic_range(n_blocks)
    channels = [(l, 0, k) for k in range(kmin, kmax + 1) for l in range(lmax + 1)]
    idx = {ch: i for i, ch in enumerate(channels)}
    nr, p = rb.nuse, rb.p
    s_band = rb.overlap()
    cap_band = _cap_band(rb, cap)
    sizes = np.array([nkeep if l == 1 else nr for (l, m, k) in channels])

    blocks = []
    s_blocks = []
    for (l, m, k), i in idx.items():
        if l == 1:
            hk = np.diag(ev_k + k * omega)
            blocks.append(((i, i), hk))
            s_blocks.append(np.eye(nkeep, dtype=complex))
        else:
            hk = rb.channel_hamiltonian(model, l) + k * omega * s_band
            if cap_band is not None:
                hk = hk + cap_band
            blocks.append(((i, i), (hk, p, 1.0)))
            s_blocks.append((s_band, p))

    if gauge == "length":
        amp = 0.5 * e0
        raw = {l: basis_mod.assemble_dipole_block(rb, l, l + 1, 0, 0, "length", "z").ab
               for l in range(lmax)}
        sign_up = sign_down = 1.0
        tsign = 1.0
    else:
        amp = 0.5 * e0 / omega
        raw = {l: basis_mod.assemble_dipole_block(rb, l, l + 1, 0, 0, "velocity", "z").ab
               for l in range(lmax)}
        sign_up, sign_down = -1.0, 1.0
        tsign = -1.0

    def dense_up(l):
        m = np.zeros((nr, nr), dtype=complex)
        ab = raw[l]
        for d in range(-p, p + 1):
            j = np.arange(max(0, -d), min(nr, nr - d))
            m[j + d, j] = ab[p + d, j]
        return m

    for l in range(lmax):
        scale = dipole_scale if l == 0 else 1.0
        up = dense_up(l)                     # <l+1| O |l>
        if l == 1:
            up = up @ t                      # ket side in spectral rep? no: l=1 is ket
        if l + 1 == 1:
            up = t.T @ up                    # bra side spectral
        down = tsign * up.T
        for k in range(kmin, kmax + 1):
            for dk, sgn in ((+1, sign_up), (-1, sign_down)):
                if not (kmin <= k + dk <= kmax):
                    continue
                blocks.append(((idx[(l + 1, 0, k + dk)], idx[(l, 0, k)]), sgn * scale * amp * up))
                blocks.append(((idx[(l, 0, k + dk)], idx[(l + 1, 0, k)]), sgn * scale * amp * down))

    h, offsets = _channel_problem(blocks, sizes)
    s = _overlap_sparse(s_blocks, sizes)
    meta = dict(kind="linear-spectral", model=model.name, omega=omega, e0=e0,
                gauge=gauge, lmax=lmax, krange=(kmin, kmax), selector=selector,
                dipole_scale=dipole_scale, rb=rb, cap=cap,
                absorber="ecs" if rb.ecs is not None else ("cap" if cap else None),
                polarization="linear-z", n_kept=nkeep,
                i2p_kept=int(np.nonzero(np.nonzero(keep)[0] == i2p)[0][0]))
    return FloquetProblem(h=h, s=s, channels=channels, sizes=sizes, offsets=offsets,
                          meta=meta)


def truncated_rate_curve(model, omega, intensity_grid, selector, gauge="length",
                         rb=None, lmax=4, n_blocks=7, dipole_scale=1.0, cap=None,
                         count=8):
    """Rate curve in the truncated p-space (tracking as in rate_curve)."""
    if isinstance(model, str):
        model = atoms.get_model(model)
    e_cross = zero_field_reference(model, rb)
    e2p = atoms.bound_states(model, rb.real(), 1, 1).by_label("2p").energy
    intensities = np.asarray(sorted(intensity_grid), dtype=float)
    lam_p, lam_m, flags = [], [], []
    prev = None
    for inten in intensities:
        e0 = pulses.intensity_to_amplitude(inten)
        prob = truncated_problem(model, rb, omega, e0, selector, e2p, gauge=gauge,
                                 n_blocks=n_blocks, lmax=lmax,
                                 dipole_scale=dipole_scale, cap=cap)
        sigma = e_cross - 1e-6j if prev is None else 0.5 * (prev[0][0] + prev[1][0]) - 1e-6j
        qs = quasienergies_near(prob, sigma, count=count)
        if prev is None:
            char = essential_character(prob, model)
            pair = sorted(qs, key=lambda q: -char(q.vector))[:2]
            pair = sorted(pair, key=lambda q: q.lam.real, reverse=True)
            cur = ((pair[0].lam, pair[0].vector), (pair[1].lam, pair[1].vector))
        else:
            bp = max(qs, key=lambda q: _overlap_measure(prev[0][1], q.vector))
            bm = max(qs, key=lambda q: _overlap_measure(prev[1][1], q.vector))
            if bp is bm:
                alt = sorted(qs, key=lambda q: -_overlap_measure(prev[1][1], q.vector))
                bm = next(q for q in alt if q is not bp)
            if _overlap_measure(prev[0][1], bp.vector) < 0.5:
                flags.append((inten, "track overlap < 0.5"))
            cur = ((bp.lam, bp.vector), (bm.lam, bm.vector))
        lam_p.append(cur[0][0])
        lam_m.append(cur[1][0])
        prev = cur
    meta = dict(model=model.name, polarization="linear-z", omega=omega, gauge=gauge,
                selector=selector, lmax=lmax, n_blocks=n_blocks,
                dipole_scale=dipole_scale)
    return RateCurve(intensities=intensities, lam_plus=np.asarray(lam_p),
                     lam_minus=np.asarray(lam_m), meta=meta, flags=flags)
