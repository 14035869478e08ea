"""Single-active-electron model potentials and their bound states.

All potentials behave as -Z_nuc/r at the origin and -1/r asymptotically.
The helium models are effective one-electron potentials for the remaining
electron outside a frozen core; the ionization potential of a model is
-E(1s) of the model itself so one-photon thresholds stay internally
consistent.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

_SPECTROSCOPIC = "spdfghiklmnoq"


@dataclass(frozen=True)
class AtomModel:
    name: str
    znuc: float

    def potential(self, r):
        raise NotImplementedError


@dataclass(frozen=True)
class Hydrogen(AtomModel):
    name: str = "hydrogen"
    znuc: float = 1.0

    def potential(self, r):
        return -1.0 / r


@dataclass(frozen=True)
class HeliumV1(AtomModel):
    """-(1/r)(1 + exp(-r/r0) - r exp(-r/r1))."""

    name: str = "heliumV1"
    znuc: float = 2.0
    r0: float = 1.07147
    r1: float = 0.83072

    def potential(self, r):
        return -(1.0 / r) * (1.0 + np.exp(-r / self.r0) - r * np.exp(-r / self.r1))


@dataclass(frozen=True)
class HeliumV2(AtomModel):
    """-(1/r)(1 + (1 + beta r / 2) exp(-beta r)), beta = 27/8."""

    name: str = "heliumV2"
    znuc: float = 2.0
    beta: float = 27.0 / 8.0

    def potential(self, r):
        return -(1.0 / r) * (1.0 + (1.0 + self.beta * r / 2.0) * np.exp(-self.beta * r))


MODELS = {
    "hydrogen": Hydrogen(),
    "heliumV1": HeliumV1(),
    "heliumV2": HeliumV2(),
}


def get_model(name):
    try:
        return MODELS[name]
    except KeyError:
        raise ValueError(f"unknown atom model {name!r}; expected one of {sorted(MODELS)}") from None


def potential_value(model, r):
    """V(r) for r > 0 (elementwise)."""
    r = np.asarray(r)
    if np.any(np.real(r) <= 0):
        raise ValueError("potential is defined for r > 0 only")
    v = model.potential(r)
    return v if v.ndim else complex(v) if np.iscomplexobj(v) else float(v)


@dataclass(frozen=True)
class BoundState:
    """One field-free bound state in a radial channel."""

    l: int
    m: int
    energy: float
    coeffs: np.ndarray  # radial coefficients, unit norm under the overlap metric
    label: str          # e.g. "1s", "2p"
    n: int              # principal-like quantum number: radial nodes + l + 1


def _count_nodes(basis, coeffs):
    r = np.linspace(basis.breakpoints[1] * 0.5, basis.rmax * 0.98, 2000)
    u = basis.evaluate(coeffs, r)
    scale = np.max(np.abs(u))
    sig = np.where(np.abs(u) > 1e-6 * scale, np.sign(u), 0.0)
    sig = sig[sig != 0.0]
    return int(np.sum(sig[1:] * sig[:-1] < 0))


def bound_states(model, basis, l, count):
    """Lowest `count` negative-energy eigenstates of the l-channel Hamiltonian.

    Uses the real (unscaled) contour of the basis.  Returns fewer states with
    a warning flag on the list if the box supports fewer than requested.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rb = basis.real()
    h = rb.channel_hamiltonian(model, l)
    s = rb.overlap()
    energies, vectors = scipy.linalg.eigh(rb.band_to_dense(h), rb.band_to_dense(s))
    neg = np.nonzero(energies < 0)[0]
    states = []
    for idx in neg[:count]:
        c = vectors[:, idx]
        # sign convention: positive slope at the origin
        if rb.evaluate(c, rb.breakpoints[1] * 0.25) < 0:
            c = -c
        nodes = _count_nodes(rb, c)
        n = nodes + l + 1
        label = f"{n}{_SPECTROSCOPIC[l]}"
        states.append(BoundState(l=l, m=0, energy=float(energies[idx]), coeffs=c,
                                 label=label, n=n))
    states.sort(key=lambda st: st.energy)
    if len(states) < count:
        states = list(states)
        states_incomplete = True
    else:
        states_incomplete = False
    result = BoundStateList(states)
    result.incomplete = states_incomplete
    return result


class BoundStateList(list):
    """List of BoundState with an `incomplete` flag and label lookup."""

    incomplete = False

    def by_label(self, label):
        for st in self:
            if st.label == label:
                return st
        raise KeyError(f"no bound state labeled {label!r}")


_L_OF_LETTER = {c: i for i, c in enumerate(_SPECTROSCOPIC)}


def _parse_label(label):
    return int(label[:-1]), _L_OF_LETTER[label[-1]]


def ionization_potential(model, basis):
    """-E(1s) of the model in this basis."""
    return -bound_states(model, basis, 0, 1)[0].energy


def resonance_frequency(model, basis, from_label, to_label):
    """Field-free transition energy between two dipole-connected bound states."""
    n1, l1 = _parse_label(from_label)
    n2, l2 = _parse_label(to_label)
    if abs(l1 - l2) != 1:
        raise ValueError(
            f"{from_label} -> {to_label} is dipole forbidden (|dl| = {abs(l1 - l2)})"
        )
    st1 = bound_states(model, basis, l1, n1 - l1).by_label(from_label)
    st2 = bound_states(model, basis, l2, n2 - l2).by_label(to_label)
    return st2.energy - st1.energy
