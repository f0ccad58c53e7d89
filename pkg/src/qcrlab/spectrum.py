"""Bias- and drive-tunable coupling rates of a mode to tunnel junctions.

The photon-assisted tunnelling rates below describe a resonator mode
("primary") whose photons are absorbed or emitted by quasiparticle
tunnelling across one or two voltage-biased NIS junctions, optionally
assisted by a strongly populated second mode ("supporting").  Everything
reduces to sums of the junction forward rate F evaluated at shifted
energies:

    arg = tau * e*V_j + lp * hbar*w_p + ls * hbar*w_s - E_N

with tau = +-1 the tunnelling direction, lp = +-1 the number of primary
photons absorbed, ls the number of supporting photons absorbed, and
``V_j`` the bias dropped over one junction.  For a two-junction series
device the bias divides equally and both junctions contribute, giving an
overall factor of 2.

Directed rates: ``down`` collects photon-absorption terms (lp = +1,
mode relaxation), ``up`` collects emission terms (lp = -1, mode
excitation).  Since F is monotone, ``down >= up`` always holds here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, NamedTuple

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .errors import (GridError, NonpositiveTemperatureError, TruncationError,
                     UndefinedSteadyStateError)
from .junction import DeviceConfig, JunctionParams, forward_rate
from .units import E_CHARGE, HBAR, K_B, R_K


@dataclass(frozen=True)
class ModeParams:
    """One harmonic mode coupled to the junction environment.

    ``alpha`` is the capacitive coupling fraction entering the rate
    prefactor; ``rho`` is the dimensionless zero-point displacement
    entering the Fock matrix elements.  When ``rho`` is None it defaults
    to ``alpha * sqrt(pi * impedance / R_K)``.
    """

    omega: float
    impedance: float
    alpha: float
    rho: float | None = None

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("mode frequency must be positive")
        if not self.impedance > 0:
            raise ValueError("mode impedance must be positive")
        if not 0 <= self.alpha <= 1:
            raise ValueError("coupling fraction must lie in [0, 1]")
        if self.rho is not None and self.rho < 0:
            raise ValueError("displacement parameter must be nonnegative")

    @property
    def rho_eff(self) -> float:
        if self.rho is not None:
            return self.rho
        return self.alpha * math.sqrt(math.pi * self.impedance / R_K)


@dataclass(frozen=True)
class DriveState:
    """Photon statistics of the supporting mode.

    ``distribution`` selects Poisson ("coherent") or geometric
    ("thermal") occupation probabilities of mean ``mean_n``.  ``l_max``
    bounds the net photon number exchanged per tunnelling event and
    ``fock_cut`` truncates the initial-state sum.
    """

    mean_n: float
    distribution: Literal["coherent", "thermal"] = "coherent"
    l_max: int = 5
    fock_cut: int = 40

    def __post_init__(self):
        if self.mean_n < 0:
            raise ValueError("mean photon number must be nonnegative")
        if self.distribution not in ("coherent", "thermal"):
            raise ValueError("distribution must be 'coherent' or 'thermal'")
        if self.l_max < 0 or self.fock_cut < 0:
            raise ValueError("truncation orders must be nonnegative")


class RatePair(NamedTuple):
    """Directed transition rates of one mode (1/s)."""

    up: float
    down: float

    @property
    def net(self) -> float:
        return self.down - self.up


@dataclass
class SpectralDensity:
    """Coupling rate tabulated on a strictly increasing frequency grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise ValueError("grid and values must be matching 1-d arrays")
        if len(self.grid) < 2 or np.any(np.diff(self.grid) <= 0):
            raise GridError("frequency grid must be strictly increasing")
        if self.grid[0] <= 0:
            raise GridError("frequency grid must be positive")
        if np.any(self.values < 0):
            raise ValueError("coupling rates must be nonnegative")


class OptimalBias(NamedTuple):
    voltage: float
    t_eff: float


def occupation_prob(k: int, d: DriveState) -> float:
    """Probability of Fock state ``k`` under the drive statistics."""
    if k < 0:
        raise ValueError("Fock index must be nonnegative")
    n = d.mean_n
    if n == 0.0:
        return 1.0 if k == 0 else 0.0
    if d.distribution == "coherent":
        return math.exp(k * math.log(n) - n - gammaln(k + 1))
    return math.exp(k * math.log(n / (1.0 + n)) - math.log(1.0 + n))


def fock_matrix_sq(k: int, l: int, rho: float) -> float:
    """Squared displaced-oscillator overlap |<l| D(rho) |k>|^2.

    Evaluated in the log domain so that large indices neither overflow
    nor underflow prematurely.  Symmetric in (k, l); reduces to the
    identity at rho = 0; rows and columns sum to one.
    """
    if k < 0 or l < 0:
        raise ValueError("Fock indices must be nonnegative")
    if rho < 0:
        raise ValueError("displacement must be nonnegative")
    if rho == 0.0:
        return 1.0 if k == l else 0.0
    m, big = (k, l) if k <= l else (l, k)
    d = big - m
    x = rho * rho
    lag = eval_genlaguerre(m, d, x)
    if lag == 0.0:
        return 0.0
    log_val = (-x + 2.0 * d * math.log(rho)
               + gammaln(m + 1) - gammaln(big + 1)
               + 2.0 * math.log(abs(lag)))
    return math.exp(log_val)


def _occupations(d: DriveState) -> np.ndarray:
    ks = np.arange(d.fock_cut + 1)
    n = d.mean_n
    if n == 0.0:
        out = np.zeros(d.fock_cut + 1)
        out[0] = 1.0
        return out
    if d.distribution == "coherent":
        return np.exp(ks * math.log(n) - n - gammaln(ks + 1))
    return np.exp(ks * math.log(n / (1.0 + n)) - math.log(1.0 + n))


def _sideband_weights(d: DriveState, rho: float) -> dict[int, float]:
    """Drive-averaged weight of exchanging ``s`` supporting photons.

    w(s) = sum_k P_k |<k - s| D(rho) |k>|^2, the transition taking the
    supporting mode from Fock state k to k - s (s photons absorbed by
    the tunnelling electron).  Vacuum therefore carries no s > 0 weight.
    """
    pk = _occupations(d)
    mass = float(pk.sum())
    if mass < 1.0 - 1e-8:
        raise TruncationError(
            f"fock_cut={d.fock_cut} keeps only {mass:.10f} of the drive "
            "distribution; raise the truncation")
    ks = np.arange(d.fock_cut + 1)
    weights: dict[int, float] = {}
    x = rho * rho
    for s in range(-d.l_max, d.l_max + 1):
        ls = ks - s
        valid = ls >= 0
        if not np.any(valid):
            weights[s] = 0.0
            continue
        if rho == 0.0:
            weights[s] = mass if s == 0 else 0.0
            continue
        kk, ll = ks[valid], ls[valid]
        m = np.minimum(kk, ll)
        dd = abs(s)
        lag = eval_genlaguerre(m, dd, x)
        with np.errstate(divide="ignore"):
            log_m = (-x + 2.0 * dd * math.log(rho)
                     + gammaln(m + 1) - gammaln(m + dd + 1)
                     + 2.0 * np.log(np.abs(lag)))
        msq = np.where(lag == 0.0, 0.0, np.exp(log_m))
        weights[s] = float(np.sum(pk[valid] * msq))
    return weights


def _coupling_prefactor(mode: ModeParams, j: JunctionParams,
                        dev: DeviceConfig) -> float:
    # one identical term per junction of the series array
    return dev.junctions * math.pi * mode.alpha**2 * mode.impedance / j.r_t


def _directed_sums(v: float, hw_p: float, shifts: dict[int, float],
                   hw_s: float, j: JunctionParams, dev: DeviceConfig,
                   epsrel: float) -> tuple[float, float]:
    vj = v / dev.junctions
    en = dev.charging_energy
    up = 0.0
    down = 0.0
    for s, w in shifts.items():
        if w == 0.0:
            continue
        off = s * hw_s - en
        for tau in (1.0, -1.0):
            base = tau * E_CHARGE * vj + off
            down += w * forward_rate(base + hw_p, j, epsrel=epsrel)
            up += w * forward_rate(base - hw_p, j, epsrel=epsrel)
    return up, down


def transition_rates(v: float, mode: ModeParams, j: JunctionParams,
                     dev: DeviceConfig, *, epsrel: float = 1e-11) -> RatePair:
    """Directed photon rates of a mode coupled to dc-biased junctions."""
    pref = _coupling_prefactor(mode, j, dev)
    up, down = _directed_sums(v, HBAR * mode.omega, {0: 1.0}, 0.0, j, dev,
                              epsrel)
    return RatePair(pref * up, pref * down)


def gamma_dc(v: float, mode: ModeParams, j: JunctionParams, dev: DeviceConfig,
             *, kind: Literal["net", "absorption", "emission"] = "net",
             epsrel: float = 1e-11) -> float:
    """Coupling rate of the mode at dc bias ``v`` (device-level volts)."""
    r = transition_rates(v, mode, j, dev, epsrel=epsrel)
    if kind == "net":
        return r.net
    if kind == "absorption":
        return r.down
    if kind == "emission":
        return r.up
    raise ValueError(f"unknown rate kind {kind!r}")


def rf_transition_rates(v: float, mode_p: ModeParams, mode_s: ModeParams,
                        d: DriveState, j: JunctionParams, dev: DeviceConfig,
                        *, epsrel: float = 1e-11) -> RatePair:
    """Directed primary-mode rates with a driven supporting mode.

    The supporting mode is traced out over its photon statistics; each
    tunnelling event may exchange up to ``d.l_max`` supporting photons
    with matrix elements of displacement ``mode_s.rho_eff``.
    """
    weights = _sideband_weights(d, mode_s.rho_eff)
    pref = _coupling_prefactor(mode_p, j, dev)
    up, down = _directed_sums(v, HBAR * mode_p.omega, weights,
                              HBAR * mode_s.omega, j, dev, epsrel)
    return RatePair(pref * up, pref * down)


def gamma_rf(v: float, mode_p: ModeParams, mode_s: ModeParams, d: DriveState,
             j: JunctionParams, dev: DeviceConfig, *,
             kind: Literal["net", "absorption", "emission"] = "net",
             epsrel: float = 1e-11) -> float:
    """Drive-assisted coupling rate of the primary mode (1/s)."""
    r = rf_transition_rates(v, mode_p, mode_s, d, j, dev, epsrel=epsrel)
    if kind == "net":
        return r.net
    if kind == "absorption":
        return r.down
    if kind == "emission":
        return r.up
    raise ValueError(f"unknown rate kind {kind!r}")


def steady_p1(r: RatePair) -> float:
    """Steady excited-state probability up/(up + down) of a two-level cut."""
    if r.up < 0 or r.down < 0:
        raise ValueError("rates must be nonnegative")
    tot = r.up + r.down
    if tot == 0.0:
        raise UndefinedSteadyStateError("both rates vanish")
    return r.up / tot


def effective_temperature(r: RatePair, omega: float) -> float:
    """Temperature whose Boltzmann factor reproduces up/down at ``omega``."""
    if not omega > 0:
        raise ValueError("mode frequency must be positive")
    if not (r.down > r.up > 0):
        raise NonpositiveTemperatureError(
            "effective temperature requires down > up > 0")
    return HBAR * omega / (K_B * math.log(r.down / r.up))


def _golden_min(fun, lo: float, hi: float, xtol: float) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def optimal_bias(mode: ModeParams, j: JunctionParams, dev: DeviceConfig, *,
                 coarse: int = 161, epsrel: float = 1e-11) -> OptimalBias:
    """Bias minimising the effective mode temperature.

    Searches device-level voltages whose per-junction share spans
    [0, 2*delta/e]: a coarse scan brackets the global minimum and a
    golden-section refinement locates it.
    """
    span = dev.junctions * 2.0 * j.delta / E_CHARGE

    def t_of_v(v: float) -> float:
        r = transition_rates(v, mode, j, dev, epsrel=epsrel)
        try:
            return effective_temperature(r, mode.omega)
        except NonpositiveTemperatureError:
            return math.inf

    vs = np.linspace(0.0, span, coarse)
    ts = np.array([t_of_v(v) for v in vs])
    if not np.any(np.isfinite(ts)):
        raise NonpositiveTemperatureError(
            "effective temperature undefined over the whole scan")
    i = int(np.argmin(ts))
    lo = vs[max(i - 1, 0)]
    hi = vs[min(i + 1, coarse - 1)]
    v_best = _golden_min(t_of_v, lo, hi, xtol=1e-4 * span / coarse)
    t_best = t_of_v(v_best)
    if ts[i] < t_best:
        v_best, t_best = float(vs[i]), float(ts[i])
    return OptimalBias(float(v_best), float(t_best))


def on_off_ratio(mode: ModeParams, j: JunctionParams, dev: DeviceConfig, *,
                 points: int = 201, epsrel: float = 1e-11) -> float:
    """Net-coupling tunability: max subthreshold rate over the v = 0 rate.

    Scans device biases whose per-junction share runs up to the gap (the
    device threshold) and returns gamma(V_on)/gamma(0) with V_on the
    scanned argmax.  In the subgap-dominated regime this ratio scales as
    sqrt(delta / (hbar omega)) / dynes.
    """
    span = dev.junctions * j.delta / E_CHARGE
    r0 = transition_rates(0.0, mode, j, dev, epsrel=epsrel).net
    if r0 <= 0:
        raise UndefinedSteadyStateError(
            "zero-bias net rate vanishes; on/off ratio undefined")
    best = max(transition_rates(v, mode, j, dev, epsrel=epsrel).net
               for v in np.linspace(0.0, span, points))
    return best / r0


def tabulate_spectrum(v: float, grid: np.ndarray, mode_template: ModeParams,
                      j: JunctionParams, dev: DeviceConfig, *,
                      epsrel: float = 1e-11) -> SpectralDensity:
    """Net coupling rate versus frequency at fixed bias and coupling.

    Each grid frequency is evaluated with the template's impedance and
    coupling fraction held fixed; only the mode frequency varies.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise GridError("frequency grid must be strictly increasing")
    if grid[0] <= 0:
        raise GridError("frequency grid must be positive")
    vals = np.array([
        gamma_dc(v, replace(mode_template, omega=w), j, dev, epsrel=epsrel)
        for w in grid
    ])
    return SpectralDensity(grid, vals)
