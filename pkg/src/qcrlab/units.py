"""Physical constants and unit helpers.

All internal energies are in joules, angular frequencies in rad/s,
temperatures in kelvin.  Conversions from laboratory units (micro-eV,
GHz) happen at the boundary, typically in the CLI layer.
"""

from __future__ import annotations

import math

from scipy.constants import e as E_CHARGE
from scipy.constants import h as PLANCK
from scipy.constants import hbar as HBAR
from scipy.constants import k as K_B

#: resistance quantum h/e^2 (ohm)
R_K = PLANCK / E_CHARGE**2


def uev_to_joule(x: float) -> float:
    """Energy in micro-electronvolt -> joule."""
    return x * 1e-6 * E_CHARGE


def joule_to_uev(x: float) -> float:
    return x / (1e-6 * E_CHARGE)


def ghz_to_joule(f: float) -> float:
    """Photon energy of a frequency given in GHz (E = h f)."""
    return PLANCK * f * 1e9


def ghz_to_omega(f: float) -> float:
    """Frequency in GHz -> angular frequency in rad/s."""
    return 2.0 * math.pi * f * 1e9


def omega_to_ghz(w: float) -> float:
    return w / (2.0e9 * math.pi)
