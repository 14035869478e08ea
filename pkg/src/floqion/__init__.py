"""floqion: strong-field single-active-electron simulator.

B-spline radial bases with exterior complex scaling, Floquet quasienergy
solvers for dressed-state ionization rates, and time propagation of
phase-locked pump-probe pulse pairs with CAP absorption and surface-flux
photoelectron spectra.
"""

__version__ = "0.1.0"

from . import units
from .pulses import Pulse, PulseSequence

__all__ = ["units", "Pulse", "PulseSequence", "__version__"]
