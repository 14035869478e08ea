"""Closed-form two-level layer: torque dynamics on the Bloch sphere,
phase-locked dressed states, and the non-Hermitian effective Hamiltonian
whose eigenvalue imaginary parts encode dressed-state decay.

Conventions: the ground state sits at the south pole s = (0, 0, -1); the
torque vector is (W cos phi, W sin phi, Delta) with W the Rabi frequency
and phi the field phase; the dressed states are
|+-_phi> = (|a> +- e^{i phi} |b>)/sqrt(2) with eigenvalues +-W/2.
"""

from dataclasses import dataclass

import numpy as np

PUMPED_STATE = np.array([1.0, -1.0j]) / np.sqrt(2.0)


@dataclass(frozen=True)
class TwoLevelParams:
    """RWA parameters: detuning, field phase, decay rates, coupling q."""

    detuning: float = 0.0
    phase: float = 0.0
    gamma_a: float = 0.0
    gamma_b: float = 0.0
    q: complex = 0.0

    def __post_init__(self):
        if self.gamma_a < 0 or self.gamma_b < 0:
            raise ValueError("decay rates must be non-negative")


@dataclass(frozen=True)
class RabiEnvelope:
    """Time-dependent Rabi frequency W(t) >= 0 with compact support."""

    func: object
    start: float
    end: float

    def __call__(self, t):
        return self.func(t)

    @classmethod
    def constant(cls, omega, start, end):
        return cls(func=lambda t: omega * np.ones_like(np.asarray(t, dtype=float)),
                   start=start, end=end)

    @classmethod
    def for_area(cls, area, start, end):
        """Constant envelope with the requested pulse area."""
        return cls.constant(area / (end - start), start, end)

    @classmethod
    def from_pulse(cls, pulse, dipole):
        """W(t) = dipole * |E envelope| of a laser pulse."""
        return cls(func=lambda t: dipole * pulse.field_envelope(t),
                   start=pulse.start, end=pulse.end)


def torque(params, rabi):
    return np.array([rabi * np.cos(params.phase), rabi * np.sin(params.phase),
                     params.detuning])


@dataclass
class BlochTrajectory:
    times: np.ndarray
    s: np.ndarray  # (n, 3)

    @property
    def final(self):
        return self.s[-1]

    def displacement(self):
        return float(np.max(np.linalg.norm(self.s - self.s[0], axis=1)))


def torque_propagate(params, envelope, s0, dt):
    """Integrate ds/dt = W(t) x s with norm-preserving midpoint rotations.

    Each step rotates s exactly about the midpoint torque vector, so the
    norm is conserved to roundoff and constant-torque evolution is exact.
    """
    n_steps = max(1, int(np.ceil((envelope.end - envelope.start) / dt)))
    dt = (envelope.end - envelope.start) / n_steps
    times = envelope.start + dt * np.arange(n_steps + 1)
    s = np.empty((n_steps + 1, 3))
    s[0] = np.asarray(s0, dtype=float)
    cur = s[0].copy()
    for i in range(n_steps):
        tm = times[i] + 0.5 * dt
        omega_vec = torque(params, float(envelope(tm)))
        angle = np.linalg.norm(omega_vec) * dt
        if angle > 0.0:
            axis = omega_vec / np.linalg.norm(omega_vec)
            # Rodrigues rotation of s about `axis` by `angle`; the sign
            # follows ds/dt = W x s
            c, si = np.cos(angle), np.sin(angle)
            cur = (c * cur + si * np.cross(axis, cur)
                   + (1.0 - c) * np.dot(axis, cur) * axis)
        s[i + 1] = cur
    return BlochTrajectory(times=times, s=s)


def dressed_state(phi):
    """The pair |+_phi>, |-_phi> = (|a> +- e^{i phi} |b>)/sqrt(2)."""
    plus = np.array([1.0, np.exp(1j * phi)]) / np.sqrt(2.0)
    minus = np.array([1.0, -np.exp(1j * phi)]) / np.sqrt(2.0)
    return plus, minus


def dressed_populations(state, phi):
    """(p+, p-) projections of a normalized two-component state."""
    state = np.asarray(state, dtype=complex)
    norm = np.vdot(state, state).real
    plus, minus = dressed_state(phi)
    p_plus = abs(np.vdot(plus, state)) ** 2 / norm
    p_minus = abs(np.vdot(minus, state)) ** 2 / norm
    return float(p_plus), float(p_minus)


def bloch_vector(state):
    """Pseudospin of a two-component state, ground state at (0, 0, -1)."""
    ca, cb = np.asarray(state, dtype=complex)
    norm = abs(ca) ** 2 + abs(cb) ** 2
    return np.array([
        2.0 * (np.conj(ca) * cb).real,
        -2.0 * (np.conj(ca) * cb).imag,
        (abs(cb) ** 2 - abs(ca) ** 2),
    ]) / norm


def effective_hamiltonian(params, rabi):
    """H_eff = [[-i Ga/2, (W/2)(1-iq)], [(W/2)(1-iq), Delta - i Gb/2]]."""
    coup = 0.5 * rabi * (1.0 - 1j * params.q)
    return np.array([
        [-0.5j * params.gamma_a, coup],
        [coup, params.detuning - 0.5j * params.gamma_b],
    ])


def effective_eigenvalues(params, rabi):
    """(lambda_+, lambda_-) of the effective Hamiltonian.

    + is the branch with the larger real part in the Hermitian limit
    (eigenvalue +W/2 on resonance); a scan utility with adiabatic tracking
    is provided by effective_eigenvalue_curve.
    """
    h = effective_hamiltonian(params, rabi)
    avg = 0.5 * (h[0, 0] + h[1, 1])
    s = np.sqrt((0.5 * (h[0, 0] - h[1, 1])) ** 2 + h[0, 1] * h[1, 0])
    if s.real < 0 or (s.real == 0 and s.imag < 0):
        s = -s
    return avg + s, avg - s


def effective_eigenvalue_curve(params, rabi_grid):
    """Adiabatically tracked (lambda_+, lambda_-) along an increasing W grid."""
    rabi_grid = np.asarray(rabi_grid, dtype=float)
    lp = np.empty(rabi_grid.shape, dtype=complex)
    lm = np.empty(rabi_grid.shape, dtype=complex)
    prev = None
    for i, w in enumerate(rabi_grid):
        a, b = effective_eigenvalues(params, w)
        if prev is not None:
            # keep each branch continuous
            if abs(a - prev[0]) + abs(b - prev[1]) > abs(b - prev[0]) + abs(a - prev[1]):
                a, b = b, a
        lp[i], lm[i] = a, b
        prev = (a, b)
    return lp, lm


def find_stabilizing_rabi(params, w_min, w_max, n_scan=400):
    """Smallest W in [w_min, w_max] where Im lambda_+ crosses zero.

    Returns None when the tracked + branch never stabilizes on the bracket.
    """
    grid = np.linspace(w_min, w_max, n_scan)
    lp, _ = effective_eigenvalue_curve(params, grid)
    im = lp.imag
    for i in range(len(grid) - 1):
        if im[i] == 0.0:
            return float(grid[i])
        if im[i] * im[i + 1] < 0.0:
            # bisect on the tracked branch
            lo, hi = grid[i], grid[i + 1]
            flo = im[i]
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                lpm, _ = effective_eigenvalue_curve(params, [grid[i], mid])
                fm = lpm[-1].imag
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            return float(0.5 * (lo + hi))
    return None
