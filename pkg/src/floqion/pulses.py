"""Laser pulses defined through the vector potential.

A pulse is A(t) = A0 sin(w (t-t0) - cep) cos^2(pi (t-t0)/tau) inside the
compact support |t-t0| < tau/2 and exactly zero outside.  The electric
field is the analytic derivative E = -dA/dt (no numerical differentiation,
which is noisy at the envelope edges).  Circular polarization carries the
two in-plane components with amplitude A0/sqrt(2) each and a pi/2 relative
phase, so the cycle-averaged intensity matches the linear case at equal A0.
"""

from dataclasses import dataclass, field

import numpy as np

from . import units

POLARIZATIONS = ("linear-z", "circular-xy-left", "circular-xy-right")


def intensity_to_amplitude(intensity_wcm2):
    """Peak field E0 (a.u.) from intensity in W/cm^2: E0 = sqrt(I/I_au)."""
    return units.intensity_to_field(intensity_wcm2)


def keldysh_parameter(ip_au, e0_au, omega_au):
    """gamma = sqrt(Ip / 2 Up) with Up = E0^2 / 4 w^2."""
    if ip_au <= 0:
        raise ValueError(f"ionization potential must be positive, got {ip_au}")
    if omega_au <= 0:
        raise ValueError(f"carrier frequency must be positive, got {omega_au}")
    up = e0_au**2 / (4.0 * omega_au**2)
    return float(np.sqrt(ip_au / (2.0 * up)))


def ponderomotive_energy(e0_au, omega_au):
    return e0_au**2 / (4.0 * omega_au**2)


def field_phase(omega_au, t0_au, cep_rad):
    """Field phase w*t0 + cep reduced to (-pi, pi]."""
    phi = np.mod(omega_au * t0_au + cep_rad, 2.0 * np.pi)
    if phi > np.pi:
        phi -= 2.0 * np.pi
    return float(phi)


@dataclass(frozen=True)
class Pulse:
    """One laser pulse in atomic units.

    amplitude: peak vector potential A0; omega: carrier; cep: carrier
    envelope phase (rad); t0: center; tau: foot-to-foot duration.
    """

    amplitude: float
    omega: float
    cep: float = 0.0
    t0: float = 0.0
    tau: float = 100.0
    polarization: str = "linear-z"

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError(f"pulse duration must be positive, got {self.tau}")
        if self.amplitude < 0:
            raise ValueError(f"pulse amplitude must be >= 0, got {self.amplitude}")
        if self.polarization not in POLARIZATIONS:
            raise ValueError(
                f"unknown polarization {self.polarization!r}; expected one of {POLARIZATIONS}"
            )

    @classmethod
    def from_intensity(cls, intensity_wcm2, omega, cep=0.0, t0=0.0, tau=100.0,
                       polarization="linear-z"):
        """Build a pulse with A0 = E0/w from an intensity in W/cm^2."""
        e0 = intensity_to_amplitude(intensity_wcm2)
        return cls(amplitude=e0 / omega, omega=omega, cep=cep, t0=t0, tau=tau,
                   polarization=polarization)

    @property
    def is_linear(self):
        return self.polarization == "linear-z"

    @property
    def helicity(self):
        """+1 for right (counterclockwise E in the xy-plane seen from +z), -1 for left."""
        if self.is_linear:
            return 0
        return +1 if self.polarization.endswith("right") else -1

    @property
    def e0(self):
        """Peak electric field magnitude along the polarization axis, w*A0."""
        return self.omega * self.amplitude

    @property
    def start(self):
        return self.t0 - self.tau / 2.0

    @property
    def end(self):
        return self.t0 + self.tau / 2.0

    @property
    def phase(self):
        """Field phase w*t0 + cep reduced to (-pi, pi]."""
        return field_phase(self.omega, self.t0, self.cep)

    def envelope(self, t):
        """cos^2 envelope with compact support [t0 - tau/2, t0 + tau/2]."""
        dt = np.asarray(t, dtype=float) - self.t0
        inside = np.abs(dt) < self.tau / 2.0
        env = np.where(inside, np.cos(np.pi * dt / self.tau) ** 2, 0.0)
        return env if env.ndim else float(env)

    def field_envelope(self, t):
        """Envelope of |E(t)| (leading order in 1/(w tau)): w*A0*env, or w*A0/sqrt(2) circular."""
        scale = self.e0 if self.is_linear else self.e0 / np.sqrt(2.0)
        return scale * self.envelope(t)


def vector_potential(pulse, t):
    """A(t); scalar (linear) or array [...,2] with (Ax, Ay) for circular."""
    dt = np.asarray(t, dtype=float) - pulse.t0
    inside = np.abs(dt) < pulse.tau / 2.0
    env = np.where(inside, np.cos(np.pi * dt / pulse.tau) ** 2, 0.0)
    ph = pulse.omega * dt - pulse.cep
    if pulse.is_linear:
        a = pulse.amplitude * np.sin(ph) * env
        return a if a.ndim else float(a)
    amp = pulse.amplitude / np.sqrt(2.0)
    ax = amp * np.sin(ph) * env
    ay = -pulse.helicity * amp * np.cos(ph) * env
    return np.stack([ax, ay], axis=-1)


def electric_field(pulse, t):
    """E(t) = -dA/dt, evaluated analytically; zero outside the support."""
    dt = np.asarray(t, dtype=float) - pulse.t0
    inside = np.abs(dt) < pulse.tau / 2.0
    env = np.where(inside, np.cos(np.pi * dt / pulse.tau) ** 2, 0.0)
    # d(env)/dt = -(pi/tau) sin(2 pi dt / tau) inside the support
    denv = np.where(inside, -(np.pi / pulse.tau) * np.sin(2.0 * np.pi * dt / pulse.tau), 0.0)
    ph = pulse.omega * dt - pulse.cep
    sin, cos = np.sin(ph), np.cos(ph)
    if pulse.is_linear:
        e = -pulse.amplitude * (pulse.omega * cos * env + sin * denv)
        return e if e.ndim else float(e)
    amp = pulse.amplitude / np.sqrt(2.0)
    ex = -amp * (pulse.omega * cos * env + sin * denv)
    ey = -pulse.helicity * amp * (pulse.omega * sin * env - cos * denv)
    return np.stack([ex, ey], axis=-1)


def pulse_area(pulse, dipole):
    """Pulse area theta = int |d * E_envelope| dt = d * E0_peak * tau / 2."""
    if dipole <= 0:
        raise ValueError(f"dipole must be positive, got {dipole}")
    scale = pulse.e0 if pulse.is_linear else pulse.e0 / np.sqrt(2.0)
    return dipole * scale * pulse.tau / 2.0


@dataclass(frozen=True)
class PulseSequence:
    """Pulses ordered by center time."""

    pulses: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pulses = tuple(self.pulses)
        object.__setattr__(self, "pulses", pulses)
        centers = [p.t0 for p in pulses]
        if any(b < a for a, b in zip(centers, centers[1:])):
            raise ValueError("pulses must be ordered by center time")

    def __iter__(self):
        return iter(self.pulses)

    def __len__(self):
        return len(self.pulses)

    @property
    def start(self):
        return min((p.start for p in self.pulses), default=0.0)

    @property
    def end(self):
        return max((p.end for p in self.pulses), default=0.0)

    @property
    def is_linear(self):
        return all(p.is_linear for p in self.pulses)

    def vector_potential(self, t):
        if not self.pulses:
            return 0.0 if np.ndim(t) == 0 else np.zeros(np.shape(t))
        return sum(vector_potential(p, t) for p in self.pulses)

    def electric_field(self, t):
        if not self.pulses:
            return 0.0 if np.ndim(t) == 0 else np.zeros(np.shape(t))
        return sum(electric_field(p, t) for p in self.pulses)
