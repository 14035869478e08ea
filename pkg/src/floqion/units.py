"""Hartree atomic units and the conversions used at I/O boundaries.

Everything inside the package is in atomic units; eV / fs / W/cm^2 appear
only in configuration files and CSV headers.
"""

import numpy as np

# 1 hartree in eV, 1 a.u. of time in fs, 1 a.u. of intensity in W/cm^2.
HARTREE_EV = 27.2114
AU_TIME_FS = 0.0241888
INTENSITY_AU_WCM2 = 3.50945e16

# nm * eV for photon wavelength conversions.
NM_EV = 1239.84198


def ev_to_au(e_ev):
    return np.asarray(e_ev) / HARTREE_EV if np.ndim(e_ev) else e_ev / HARTREE_EV


def au_to_ev(e_au):
    return np.asarray(e_au) * HARTREE_EV if np.ndim(e_au) else e_au * HARTREE_EV


def fs_to_au(t_fs):
    return t_fs / AU_TIME_FS


def au_to_fs(t_au):
    return t_au * AU_TIME_FS


def nm_to_au(lambda_nm):
    """Photon energy in a.u. for a vacuum wavelength in nm."""
    return ev_to_au(NM_EV / lambda_nm)


def intensity_to_field(intensity_wcm2):
    """Peak electric-field amplitude E0 (a.u.) for an intensity in W/cm^2."""
    if intensity_wcm2 < 0:
        raise ValueError(f"negative intensity: {intensity_wcm2}")
    return float(np.sqrt(intensity_wcm2 / INTENSITY_AU_WCM2))


def field_to_intensity(e0_au):
    """Inverse of :func:`intensity_to_field`."""
    return float(e0_au) ** 2 * INTENSITY_AU_WCM2
