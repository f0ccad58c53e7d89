"""Normal-metal--insulator--superconductor tunnelling building blocks.

Units and conventions
---------------------
* energies in joules, temperatures in kelvin, rates in 1/s;
* ``dos`` is the smeared BCS density of states normalised to the
  normal-state value, an even function of energy;
* ``forward_rate`` is the normalised rate F(E) of single-electron
  tunnelling events in which the electron *gains* energy ``E`` from the
  electromagnetic environment and the bias source.  It carries the 1/h
  normalisation but no junction-resistance or coupling prefactor, so
  every coupling formula in :mod:`qcrlab.spectrum` scales it explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .quadrature import adaptive_quad
from .units import K_B, PLANCK


@dataclass(frozen=True)
class JunctionParams:
    """Electrical parameters of one NIS tunnel junction.

    Parameters
    ----------
    delta:
        Superconducting gap (J).
    dynes:
        Dimensionless subgap smearing parameter of the density of
        states, typically 1e-6 .. 1e-4.
    r_t:
        Tunnelling resistance (ohm).
    temp_n:
        Electron temperature of the normal-metal electrode (K).
    """

    delta: float
    dynes: float
    r_t: float
    temp_n: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("gap energy must be positive")
        if not 0 <= self.dynes < 1:
            raise ValueError("smearing parameter must lie in [0, 1)")
        if not self.r_t > 0:
            raise ValueError("tunnelling resistance must be positive")
        if self.temp_n < 0:
            raise ValueError("electron temperature must be nonnegative")


@dataclass(frozen=True)
class DeviceConfig:
    """Junction-count and island parameters of the refrigerator element.

    ``junctions=2`` describes the symmetric series (SINIS) configuration
    in which the applied bias divides equally over the two junctions and
    both contribute to the rates.  ``charging_energy`` is the single
    electron charging cost of the normal island (J); ``alpha`` optionally
    records the capacitive division ratio of the device and serves as a
    default for modes that do not specify their own coupling fraction.
    """

    junctions: int = 2
    charging_energy: float = 0.0
    alpha: float | None = None

    def __post_init__(self):
        if self.junctions not in (1, 2):
            raise ValueError("only 1- and 2-junction devices are supported")
        if self.charging_energy < 0:
            raise ValueError("charging energy must be nonnegative")
        if self.alpha is not None and not 0 <= self.alpha <= 1:
            raise ValueError("capacitance fraction must lie in [0, 1]")


def dos(eps, p: JunctionParams):
    """Smeared superconducting density of states (normalised, even).

    Evaluates ``|Re[(eps + i*dynes*delta) / sqrt((eps + i*dynes*delta)^2
    - delta^2)]|``.  With ``dynes=0`` this is exactly zero inside the gap
    and diverges integrably at the gap edges.
    """
    eps = np.asarray(eps, dtype=float)
    z = eps + 1j * (p.dynes * p.delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        n = np.abs(np.real(z / np.sqrt(z * z - p.delta**2)))
    if n.ndim == 0:
        return float(n)
    return n


def fermi(e, t: float):
    """Fermi occupation 1/(exp(e/kT)+1); a step with f(0)=1/2 at t=0."""
    e = np.asarray(e, dtype=float)
    if t < 0:
        raise ValueError("temperature must be nonnegative")
    if t == 0:
        out = np.where(e < 0, 1.0, np.where(e > 0, 0.0, 0.5))
    else:
        out = expit(-e / (K_B * t))
    if out.ndim == 0:
        return float(out)
    return out


def _rate_at_zero_temperature(e_gain: float, p: JunctionParams,
                              epsrel: float) -> float:
    # occupation factors collapse to a window (0, E); empty for E <= 0
    if e_gain <= 0.0:
        return 0.0
    if p.dynes == 0.0:
        # the BCS integrand has the exact antiderivative sqrt(eps^2 - delta^2)
        if e_gain <= p.delta:
            return 0.0
        return math.sqrt(e_gain**2 - p.delta**2) / PLANCK
    pts = [p.delta] if p.delta < e_gain else []
    val, _ = adaptive_quad(lambda x: dos(x, p), 0.0, e_gain,
                           points=pts, epsrel=epsrel)
    return val / PLANCK


def forward_rate(e_gain: float, p: JunctionParams, *,
                 epsrel: float = 1e-11) -> float:
    """Normalised tunnelling rate F(E) for energy gain ``e_gain`` (1/s).

    F(E) = (1/h) * integral deps dos(eps) f(eps-E) [1 - f(eps)] with the
    occupations taken at the normal-metal electron temperature.  The
    superconductor side is assumed fully gapped in occupation (its
    quasiparticle distribution enters only through ``dos``).

    Satisfies detailed balance F(-E) = exp(-E/kT) F(E) and, for zero
    temperature and zero smearing, the closed form
    ``sqrt(E^2 - delta^2)/h`` above the gap and zero below it.
    """
    e_gain = float(e_gain)
    if p.temp_n == 0.0:
        return _rate_at_zero_temperature(e_gain, p, epsrel)

    kt = K_B * p.temp_n
    window = max(30.0 * kt, 10.0 * p.delta, 3.0 * abs(e_gain))
    beta = 1.0 / kt

    def integrand(x):
        return dos(x, p) * expit(-(x - e_gain) * beta) * expit(x * beta)

    # panel edges at the gap edges, the Fermi kinks, and thermal brackets
    # around each so the first Kronrod pass already samples the structure
    anchors = (-p.delta, 0.0, e_gain, p.delta)
    span = min(30.0 * kt, p.delta)
    pts = set()
    for s in anchors:
        pts.update((s - span, s, s + span))
    val, _ = adaptive_quad(integrand, -window, window,
                           points=[x for x in pts if -window < x < window],
                           epsrel=epsrel)
    return val / PLANCK
