"""High-bias junction photon source and amplification-chain calibration.

Above the gap the junction environment runs hot and the resonator emits
into its transmission line.  This module covers the emitted-power model,
Bose-occupation bookkeeping, the high-voltage input-power expansion, the
aV + b + c/V output-power fit yielding chain gain and noise temperature,
and the one-port reflection fit supplying the damping rates.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from .errors import FitError, GridError
from .junction import DeviceConfig, JunctionParams
from .spectrum import ModeParams, RatePair, transition_rates
from .tableio import read_table
from .units import E_CHARGE, HBAR, K_B


@dataclass(frozen=True)
class PhotonSourceParams:
    """Resonator-to-line coupling geometry for the emitted-power formula."""

    c_coupling: float   # coupling capacitance (F)
    omega0: float       # fundamental angular frequency (rad/s)
    z0: float           # transmission-line impedance (ohm)
    l_res: float        # resonator length (m)
    c_per_len: float    # capacitance per unit length (F/m)

    def __post_init__(self):
        for name in ("c_coupling", "omega0", "z0", "l_res", "c_per_len"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class CalibrationParams:
    """Rates and occupations entering the high-voltage power expansion."""

    gamma_tr: float     # resonator-line coupling rate (1/s)
    gamma_t_bar: float  # junction damping in the high-bias limit (1/s)
    gamma_x: float      # excess-loss rate (1/s)
    n_tr: float         # transmission-line photon number
    n_x: float          # excess-bath photon number
    omega_r: float      # resonator angular frequency (rad/s)
    delta: float        # gap energy (J)

    def __post_init__(self):
        for name in ("gamma_tr", "gamma_t_bar", "gamma_x", "n_tr", "n_x"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.omega_r <= 0:
            raise ValueError("omega_r must be positive")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")


@dataclass(frozen=True)
class CalibrationRecord:
    """Result of the output-power fit and derived chain figures."""

    a: float            # W/V
    b: float            # W
    c: float            # W*V
    gain: float
    t_noise: float      # K
    residual: float     # RMS W

    def __post_init__(self):
        if self.residual < 0:
            raise ValueError("residual must be nonnegative")

    def as_dict(self) -> dict:
        return asdict(self)


def output_power(p: PhotonSourceParams, n_res: float, n_tl: float) -> float:
    """Net power emitted into the line for given mode/line occupations."""
    pref = 2.0 * p.c_coupling ** 2 * HBAR * p.omega0 ** 3 * p.z0 \
        / (p.l_res * p.c_per_len)
    return pref * (n_res - n_tl)


def bose_occupation(t: float, omega: float) -> float:
    if t <= 0:
        raise ValueError("temperature must be positive")
    if omega <= 0:
        raise ValueError("frequency must be positive")
    return 1.0 / math.expm1(HBAR * omega / (K_B * t))


def temp_from_occupation(n: float, omega: float) -> float:
    if n <= 0:
        raise ValueError("occupation must be positive")
    if omega <= 0:
        raise ValueError("frequency must be positive")
    return HBAR * omega / (K_B * math.log1p(1.0 / n))


def p_tr_model(v: float, cp: CalibrationParams) -> float:
    """Input power to the line in the high-bias expansion (valid eV >> 2*gap)."""
    if v == 0:
        raise ZeroDivisionError("input-power model diverges at zero bias")
    if v < 0:
        raise ValueError("model domain is positive bias")
    gsum = cp.gamma_tr + cp.gamma_t_bar + cp.gamma_x
    if gsum == 0:
        return 0.0
    pref = cp.gamma_tr * cp.gamma_t_bar / gsum
    if pref == 0.0:
        return 0.0
    bracket = cp.gamma_x * (cp.n_x - cp.n_tr) / cp.gamma_t_bar \
        - cp.n_tr - 0.5
    body = 0.25 * E_CHARGE * v + HBAR * cp.omega_r * bracket \
        - 0.5 * (cp.delta ** 2 / (E_CHARGE * v)) * (1.0 + cp.gamma_t_bar / gsum)
    return pref * body


def fit_output_power(samples: Sequence[tuple[float, float]]
                     ) -> tuple[float, float, float, float]:
    """Least-squares (a, b, c, rms) for P_out = a*V + b + c/V."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be (V, P) pairs")
    v, p = arr[:, 0], arr[:, 1]
    if len(v) < 3 or len(np.unique(v)) < 3:
        raise FitError("need at least three distinct bias points")
    if np.any(v <= 0):
        raise ValueError("bias points must be positive")
    design = np.column_stack([v, np.ones_like(v), 1.0 / v])
    scale = np.linalg.norm(design, axis=0)
    coef, _, rank, _ = np.linalg.lstsq(design / scale, p, rcond=None)
    if rank < 3:
        raise FitError("degenerate basis: bias points are collinear "
                       "in (V, 1, 1/V)")
    coef = coef / scale
    resid = p - design @ coef
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return float(coef[0]), float(coef[1]), float(coef[2]), rms


def gain_from_fit(a: float, cp: CalibrationParams) -> float:
    """Chain gain from the linear fit coefficient and the known rates."""
    if cp.gamma_t_bar <= 0 or cp.gamma_tr <= 0:
        raise ValueError("gain requires positive junction and line rates")
    return (4.0 * a / E_CHARGE) \
        * (cp.gamma_t_bar + cp.gamma_tr + cp.gamma_x) \
        / (cp.gamma_t_bar * cp.gamma_tr)


def noise_temperature(p_out_zero: float, gain: float, bw: float) -> float:
    """Chain noise temperature from the zero-bias output power."""
    if gain <= 0:
        raise ValueError("gain must be positive")
    if bw <= 0:
        raise ValueError("bandwidth must be positive")
    return p_out_zero / (gain * K_B * bw)


def reflection_model(omega: np.ndarray, omega_r: float, gamma_tr: float,
                     gamma_int: float) -> np.ndarray:
    """One-port reflection off a resonator with internal and line loss."""
    dw = 1j * (np.asarray(omega, dtype=float) - omega_r)
    return (dw + 0.5 * (gamma_int - gamma_tr)) \
        / (dw + 0.5 * (gamma_int + gamma_tr))


def fit_reflection(trace: Sequence[tuple[float, complex]]
                   ) -> tuple[float, float, float]:
    """(omega_r, gamma_tr, gamma_int) from a complex reflection trace."""
    omega = np.array([float(t[0]) for t in trace])
    gamma = np.array([complex(t[1]) for t in trace])
    if len(omega) < 7:
        raise FitError("reflection trace too short to constrain three "
                       "parameters")
    order = np.argsort(omega)
    omega, gamma = omega[order], gamma[order]

    mag = np.abs(gamma)
    i0 = int(np.argmin(mag))
    wr0 = omega[i0]
    # depth fixes |g_int - g_tr|/(g_int + g_tr); the half-depth span fixes
    # the total linewidth.  Try both coupling branches and keep the best.
    half = 0.5 * (1.0 + mag[i0] ** 2)
    above = np.sqrt(np.clip(half, 0.0, 1.0))
    wide = omega[mag <= above]
    width0 = max(wide[-1] - wide[0],
                 4.0 * np.median(np.diff(omega)))
    depth = np.clip(mag[i0], 0.0, 1.0)

    best = None
    for sign in (+1.0, -1.0):
        gtr0 = 0.5 * width0 * (1.0 - sign * depth)
        gint0 = 0.5 * width0 * (1.0 + sign * depth)

        def resid(x):
            model = reflection_model(omega, x[0], x[1], x[2])
            d = model - gamma
            return np.concatenate([d.real, d.imag])

        sol = optimize.least_squares(
            resid, [wr0, max(gtr0, 1e-6 * width0), max(gint0, 1e-6 * width0)],
            bounds=([omega[0], 0.0, 0.0], [omega[-1], np.inf, np.inf]),
            x_scale=[max(width0, 1e-12), max(width0, 1e-12),
                     max(width0, 1e-12)],
            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if best is None or sol.cost < best.cost:
            best = sol
    if best is None or not best.success:
        raise FitError("reflection fit did not converge")
    wr, gtr, gint = (float(x) for x in best.x)
    linewidth = gtr + gint
    span = omega[-1] - omega[0]
    if linewidth <= 0 or span < 5.0 * linewidth:
        raise GridError("trace must span at least five linewidths")
    if linewidth < 2.0 * float(np.median(np.diff(omega))):
        raise GridError("linewidth unresolved by the frequency grid")
    return wr, gtr, gint


def two_bath_occupation(gamma_a: float, n_a: float,
                        gamma_b: float, n_b: float) -> float:
    """Steady occupation of a mode damped by two thermal channels."""
    if gamma_a < 0 or gamma_b < 0:
        raise ValueError("rates must be nonnegative")
    tot = gamma_a + gamma_b
    if tot == 0:
        raise ValueError("at least one channel must couple")
    return (gamma_a * n_a + gamma_b * n_b) / tot


def junction_occupation(rates: RatePair) -> float:
    """Effective photon number of the junction environment, up/(down-up)."""
    if rates.down <= rates.up:
        raise ValueError("environment occupation undefined without net "
                         "damping")
    return rates.up / (rates.down - rates.up)


@dataclass(frozen=True)
class SourcePoint:
    """Composed photon-source observables at one bias point."""

    bias: float
    gamma_t: float
    n_res: float
    power: float
    t_res: float


def source_sweep_point(v: float, src: PhotonSourceParams,
                       mode: ModeParams, j: JunctionParams,
                       dev: DeviceConfig, *, gamma_tr: float,
                       n_tr: float, epsrel: float = 1e-11) -> SourcePoint:
    """Emitted power and mode temperature with the junction rates composed in.

    The mode relaxes to the two-bath steady state between the line
    (gamma_tr, n_tr) and the junction environment at the given bias; the
    emitted power follows from the resulting occupation imbalance.
    """
    rates = transition_rates(v, mode, j, dev, epsrel=epsrel)
    gamma_t = rates.down - rates.up
    if gamma_t <= 0:
        raise ValueError("junction channel must damp the mode")
    n_t = junction_occupation(rates)
    n_res = two_bath_occupation(gamma_tr, n_tr, gamma_t, n_t)
    power = output_power(src, n_res, n_tr)
    t_res = temp_from_occupation(n_res, src.omega0) if n_res > 0 else 0.0
    return SourcePoint(bias=v, gamma_t=gamma_t, n_res=n_res, power=power,
                       t_res=t_res)


def calibration_pipeline(samples: Sequence[tuple[float, float]],
                         p_out_zero: float, cp: CalibrationParams,
                         bw: float) -> CalibrationRecord:
    """Fit the output-power sweep and derive chain gain and noise."""
    a, b, c, rms = fit_output_power(samples)
    g = gain_from_fit(a, cp)
    tn = noise_temperature(p_out_zero, g, bw)
    return CalibrationRecord(a=a, b=b, c=c, gain=g, t_noise=tn, residual=rms)


def load_power_samples(path: str) -> list[tuple[float, float]]:
    """Read (bias_V, power_W) pairs from a measurement-style CSV."""
    table = read_table(path)
    v = table.column("bias_V")
    p = table.column("power_W")
    return list(zip(v.tolist(), p.tolist()))


def load_reflection_trace(path: str) -> list[tuple[float, complex]]:
    """Read (freq_Hz, re_gamma, im_gamma) rows, returning angular frequency."""
    table = read_table(path)
    f = table.column("freq_Hz")
    re = table.column("re_gamma")
    im = table.column("im_gamma")
    return [(2.0 * math.pi * fi, complex(r, i))
            for fi, r, i in zip(f.tolist(), re.tolist(), im.tolist())]
