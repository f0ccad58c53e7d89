"""Config-driven sweep runner: JSON in, deterministic CSV/JSON out.

Every run takes ``--config <file.json>`` validated against the schema
shipped with the package, computes all sweep points (optionally across
a thread pool), and only then writes the output table plus a
``<out>.meta.json`` sidecar holding the fully-resolved parameters.

Exit codes: 0 success, 2 configuration error, 3 numeric error.
Set ``QCRLAB_LOG`` (DEBUG/INFO/WARNING/ERROR) to control logging.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from importlib import resources

import jsonschema
import numpy as np

from . import __version__, dynamics, ep, lamb, source_calib, spectrum
from . import thermal as thermal_mod
from .errors import ConfigError, GridError, QcrlabError
from .junction import DeviceConfig, JunctionParams
from .spectrum import DriveState, ModeParams
from .tableio import ensure_parent_dir, read_table, write_sidecar, write_table
from .units import E_CHARGE, K_B, ghz_to_omega, uev_to_joule

log = logging.getLogger("qcrlab")

_TWO_PI = 2.0 * math.pi

_DEVICE_DEFAULTS = {"junctions": 2, "charging_energy_uev": 0.0}

_DEFAULTS: dict[str, dict] = {
    "sweep-bias": {"epsrel": 1e-11, "device": _DEVICE_DEFAULTS},
    "rf-sweep": {
        "epsrel": 1e-11,
        "bias": 0.0,
        "device": _DEVICE_DEFAULTS,
        "drive": {"distribution": "coherent", "l_max": 5, "fock_cut": 40},
    },
    "lamb-shift": {
        "device": _DEVICE_DEFAULTS,
        "spectrum": {"points": 1201, "lo_factor": 0.02, "hi_factor": 50.0,
                     "epsrel": 1e-9},
    },
    "reset-sim": {
        "epsrel": 1e-11,
        "device": _DEVICE_DEFAULTS,
        "pulse": {"amplitude": None, "rise_fall_ns": 0.0, "t_start_ns": 0.0},
        "ladder": {"n_cut": 30, "init_kind": "coherent", "init_mean_n": 1.0},
        "extra": {"gamma_per_s": 0.0, "occupation": 0.0},
    },
    "ep-map": {"two_mode": {"kappa_ext_mhz": None}},
    "source": {
        "epsrel": 1e-11,
        "device": _DEVICE_DEFAULTS,
        "line": {"n_tr": 0.0},
    },
    "calibrate": {
        "calibration": {"gamma_x_per_s": 0.0, "n_tr": 0.0, "n_x": 0.0},
    },
    "thermal": {
        "thermal": {"p_const_w": 0.0, "ep_sigma_w_m3_k5": 0.0,
                    "volume_m3": 0.0, "a_coeff": None},
    },
    "diff-lamb": {},
}

_SYNTH_DEFAULTS = {"noise_sigma_w": 0.0, "points": 50,
                   "bias_min": 5.0, "bias_max": 20.0}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _schema() -> dict:
    text = resources.files("qcrlab").joinpath("schema.json").read_text()
    return json.loads(text)


def _validate(cfg: dict) -> None:
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(cfg), key=lambda e: e.json_path)
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        where = best.json_path if best.json_path != "$" else "config root"
        raise ConfigError(f"invalid config at {where}: {best.message}")


def load_and_validate(path: str) -> dict:
    """Parse, validate, and default-fill a run configuration."""
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    _validate(cfg)
    resolved = _merge(_DEFAULTS.get(cfg["command"], {}), cfg)
    if "synthesize" in resolved:
        resolved["synthesize"] = _merge(_SYNTH_DEFAULTS,
                                        resolved["synthesize"])
    _validate(resolved)
    return resolved


# ---------------------------------------------------------------- builders

def _build_junction(blk: dict) -> JunctionParams:
    return JunctionParams(delta=uev_to_joule(blk["delta_uev"]),
                          dynes=blk["dynes"], r_t=blk["r_t_ohm"],
                          temp_n=blk["temp_n_k"])


def _build_device(blk: dict) -> DeviceConfig:
    return DeviceConfig(junctions=blk["junctions"],
                        charging_energy=uev_to_joule(
                            blk["charging_energy_uev"]))


def _build_mode(blk: dict) -> ModeParams:
    return ModeParams(omega=ghz_to_omega(blk["freq_ghz"]),
                      impedance=blk["impedance_ohm"], alpha=blk["alpha"],
                      rho=blk.get("rho"))


def _build_drive(blk: dict) -> DriveState:
    return DriveState(mean_n=blk["mean_n"],
                      distribution=blk["distribution"],
                      l_max=blk["l_max"], fock_cut=blk["fock_cut"])


def _grid_axis(blk: dict) -> np.ndarray:
    start, stop, points = blk["start"], blk["stop"], blk["points"]
    if points > 1 and stop <= start:
        raise ConfigError("grid.stop must exceed grid.start")
    return np.linspace(start, stop, points)


def _bias_scale(j: JunctionParams) -> float:
    # device bias in volts per unit of eV/(2*delta)
    return 2.0 * j.delta / E_CHARGE


def _pmap(fn, xs, threads: int) -> list:
    if threads <= 1:
        return [fn(x) for x in xs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, xs))


def _guarded_p1(rates) -> float:
    try:
        return spectrum.steady_p1(rates)
    except QcrlabError:
        return math.nan


def _guarded_teff(rates, omega: float) -> float:
    try:
        return spectrum.effective_temperature(rates, omega)
    except QcrlabError:
        return math.nan


# ---------------------------------------------------------------- commands

def _cmd_sweep_bias(cfg: dict, threads: int, rng) -> tuple:
    j = _build_junction(cfg["junction"])
    dev = _build_device(cfg["device"])
    mode = _build_mode(cfg["mode"])
    scale = _bias_scale(j)
    eps = cfg["epsrel"]

    def point(x: float) -> list[float]:
        r = spectrum.transition_rates(x * scale, mode, j, dev, epsrel=eps)
        return [x, r.up, r.down, _guarded_p1(r),
                _guarded_teff(r, mode.omega)]

    rows = _pmap(point, _grid_axis(cfg["grid"]), threads)
    cols = ["bias (eV/2Delta)", "gamma_up (1/s)", "gamma_down (1/s)",
            "p1 (1)", "t_eff (K)"]
    return cols, rows, {"bias_scale_v": scale}


def _cmd_rf_sweep(cfg: dict, threads: int, rng) -> tuple:
    j = _build_junction(cfg["junction"])
    dev = _build_device(cfg["device"])
    mode = _build_mode(cfg["mode"])
    smode = _build_mode(cfg["support_mode"])
    drive = _build_drive(cfg["drive"])
    v = cfg["bias"] * _bias_scale(j)
    eps = cfg["epsrel"]

    def point(n: float) -> list[float]:
        r = spectrum.rf_transition_rates(v, mode, smode,
                                         replace(drive, mean_n=n), j, dev,
                                         epsrel=eps)
        return [n, r.up, r.down, _guarded_p1(r),
                _guarded_teff(r, mode.omega)]

    rows = _pmap(point, _grid_axis(cfg["grid"]), threads)
    cols = ["drive_mean_n (1)", "gamma_up (1/s)", "gamma_down (1/s)",
            "p1 (1)", "t_eff (K)"]
    return cols, rows, {"bias_v": v, "rho_support": smode.rho_eff}


def _cmd_lamb_shift(cfg: dict, threads: int, rng) -> tuple:
    j = _build_junction(cfg["junction"])
    dev = _build_device(cfg["device"])
    mode = _build_mode(cfg["mode"])
    scale = _bias_scale(j)
    sp = cfg["spectrum"]
    wgrid = lamb.default_grid(mode.omega, points=sp["points"],
                              lo_factor=sp["lo_factor"],
                              hi_factor=sp["hi_factor"])

    def point(x: float) -> list[float]:
        dens = spectrum.tabulate_spectrum(x * scale, wgrid, mode, j, dev,
                                          epsrel=sp["epsrel"])
        res = lamb.lamb_shift(dens, mode.omega)
        return [x, res.shift / _TWO_PI]

    rows = _pmap(point, _grid_axis(cfg["grid"]), threads)
    cols = ["bias (eV/2Delta)", "lamb_shift (Hz)"]
    return cols, rows, {"bias_scale_v": scale,
                        "spectrum_grid_rad_s": [float(wgrid[0]),
                                                float(wgrid[-1])]}


def _cmd_reset_sim(cfg: dict, threads: int, rng) -> tuple:
    j = _build_junction(cfg["junction"])
    dev = _build_device(cfg["device"])
    mode = _build_mode(cfg["mode"])
    pulse = cfg["pulse"]
    ladder = cfg["ladder"]
    extra = cfg["extra"]
    eps = cfg["epsrel"]
    scale = _bias_scale(j)

    env = dynamics.DcRateSource(mode, j, dev, epsrel=eps)
    meta: dict = {}
    if pulse["amplitude"] is None:
        best = spectrum.optimal_bias(mode, j, dev, epsrel=eps)
        v_on = best.voltage
        meta["optimal_t_eff_k"] = best.t_eff
    else:
        v_on = pulse["amplitude"] * scale
    meta["v_on_v"] = v_on

    sched = dynamics.PulseSchedule(v_on=v_on,
                                   width=1e-9 * pulse["width_ns"],
                                   rise_fall=1e-9 * pulse["rise_fall_ns"],
                                   t_start=1e-9 * pulse["t_start_ns"])
    ts_ns = _grid_axis(cfg["grid"])
    if ts_ns[0] < 0:
        raise ConfigError("time grid must start at or after zero")
    n_cut = ladder["n_cut"]
    kind = ladder["init_kind"]
    if kind == "ground":
        init = dynamics.LadderState.ground(n_cut)
    elif kind == "thermal":
        init = dynamics.LadderState.thermal(ladder["init_mean_n"], n_cut)
    else:
        init = dynamics.LadderState.coherent(ladder["init_mean_n"], n_cut)

    traj = dynamics.evolve(init, sched, env,
                           extra_gamma=extra["gamma_per_s"],
                           extra_occupation=extra["occupation"],
                           t_end=float(ts_ns[-1]) * 1e-9,
                           t_eval=1e-9 * ts_ns)
    rows = [[t * 1e9, float(m), float(p0)]
            for t, m, p0 in zip(traj.times, traj.mean_n, traj.ground_pop)]
    cols = ["time (ns)", "mean_n (1)", "p0 (1)"]
    r_on = env(v_on)
    r_off = env(sched.v_off)
    meta.update({
        "infidelity_final": 1.0 - float(traj.ground_pop[-1]),
        "rates_on_per_s": {"up": r_on.up, "down": r_on.down},
        "rates_off_per_s": {"up": r_off.up, "down": r_off.down},
    })
    return cols, rows, meta


def _cmd_ep_map(cfg: dict, threads: int, rng) -> tuple:
    tm = cfg["two_mode"]
    kappa1 = _TWO_PI * 1e6 * tm["kappa1_mhz"]
    p = ep.TwoModeParams(omega1=ghz_to_omega(tm["f1_ghz"]),
                         kappa1=kappa1,
                         omega2=ghz_to_omega(tm["f2_max_ghz"]),
                         kappa2=_TWO_PI * 1e6 * tm["kappa2_mhz"],
                         g=_TWO_PI * 1e6 * tm["g_mhz"])
    kext = kappa1 if tm["kappa_ext_mhz"] is None \
        else _TWO_PI * 1e6 * tm["kappa_ext_mhz"]
    fm = ep.FluxMap(phi_grid=tuple(_grid_axis(cfg["flux"])),
                    omega2_max=ghz_to_omega(tm["f2_max_ghz"]))
    probe_blk = cfg["probe"]
    if probe_blk["f_stop_ghz"] <= probe_blk["f_start_ghz"]:
        raise ConfigError("probe.f_stop_ghz must exceed probe.f_start_ghz")
    freqs_ghz = np.linspace(probe_blk["f_start_ghz"],
                            probe_blk["f_stop_ghz"], probe_blk["points"])
    amp = ep.transmission_map(fm, p, ghz_to_omega(freqs_ghz),
                              kappa_ext=kext)
    rows = []
    for i, phi in enumerate(fm.phi_grid):
        for k, f in enumerate(freqs_ghz):
            rows.append([phi, f, amp[i, k]])
    cols = ["phi (Phi_0)", "freq (GHz)", "s21_abs (1)"]
    meta: dict = {"kappa_ext_per_s": kext}
    try:
        locus = ep.ep_locus(p)
        meta["ep_locus"] = [{"delta_per_s": d, "kappa2_per_s": k,
                             "delta_mhz": d / (_TWO_PI * 1e6),
                             "kappa2_mhz": k / (_TWO_PI * 1e6)}
                            for d, k in locus]
    except QcrlabError as exc:
        log.warning("exceptional-point search failed: %s", exc)
        meta["ep_locus"] = []
    return cols, rows, meta


def _cmd_source(cfg: dict, threads: int, rng) -> tuple:
    j = _build_junction(cfg["junction"])
    dev = _build_device(cfg["device"])
    mode = _build_mode(cfg["mode"])
    blk = cfg["source"]
    line = cfg["line"]
    src = source_calib.PhotonSourceParams(
        c_coupling=1e-15 * blk["c_coupling_ff"],
        omega0=mode.omega,
        z0=blk["z0_ohm"],
        l_res=1e-3 * blk["l_res_mm"],
        c_per_len=1e-12 * blk["c_per_len_pf_m"])
    scale = _bias_scale(j)
    eps = cfg["epsrel"]

    def point(x: float) -> list[float]:
        sp = source_calib.source_sweep_point(
            x * scale, src, mode, j, dev,
            gamma_tr=line["gamma_tr_per_s"], n_tr=line["n_tr"], epsrel=eps)
        dbm = 10.0 * math.log10(sp.power / 1e-3) if sp.power > 0 \
            else math.nan
        return [x, sp.power, dbm, sp.t_res, sp.n_res, sp.gamma_t]

    rows = _pmap(point, _grid_axis(cfg["grid"]), threads)
    cols = ["bias (eV/2Delta)", "power (W)", "power (dBm)", "t_res (K)",
            "n_res (1)", "gamma_t (1/s)"]
    return cols, rows, {"bias_scale_v": scale}


def _cmd_thermal(cfg: dict, threads: int, rng) -> tuple:
    blk = cfg["thermal"]
    net = thermal_mod.ThermalNetwork(t0=blk["t0_k"],
                                     p_const=blk["p_const_w"],
                                     ep_sigma=blk["ep_sigma_w_m3_k5"],
                                     volume=blk["volume_m3"],
                                     a_coeff=blk["a_coeff"])

    def point(tb: float) -> list[float]:
        ta = thermal_mod.steady_state(net, tb)
        return [tb, ta, thermal_mod.g_quantum(ta)]

    rows = _pmap(point, _grid_axis(cfg["grid"]), threads)
    cols = ["t_b (K)", "t_a (K)", "g_quantum (W/K)"]
    return cols, rows, {"a_coefficient": thermal_mod.a_coefficient(net)}


def _cmd_diff_lamb(cfg: dict, threads: int, rng) -> tuple:
    ta = read_table(cfg["csv_a"])
    tb = read_table(cfg["csv_b"])
    if ta.data.shape != tb.data.shape \
            or not np.array_equal(ta.data[:, 0], tb.data[:, 0]):
        raise GridError("input tables do not share a sweep grid")
    diff = ta.data[:, -1] - tb.data[:, -1]
    rows = np.column_stack([ta.data[:, 0], diff])
    cols = [ta.columns[0], "diff " + ta.columns[-1]]
    return cols, rows, {"minuend": cfg["csv_a"], "subtrahend": cfg["csv_b"]}


def _run_calibrate(cfg: dict, out: str, threads: int, rng) -> dict:
    cal = cfg["calibration"]
    cp = source_calib.CalibrationParams(
        gamma_tr=cal["gamma_tr_per_s"],
        gamma_t_bar=cal["gamma_t_bar_per_s"],
        gamma_x=cal["gamma_x_per_s"],
        n_tr=cal["n_tr"], n_x=cal["n_x"],
        omega_r=ghz_to_omega(cal["f_r_ghz"]),
        delta=uev_to_joule(cal["delta_uev"]))
    bw = cfg["bandwidth_hz"]

    payload: dict = {}
    if "synthesize" in cfg:
        syn = cfg["synthesize"]
        if syn["bias_max"] <= syn["bias_min"]:
            raise ConfigError("synthesize.bias_max must exceed bias_min")
        scale = 2.0 * cp.delta / E_CHARGE
        volts = np.linspace(syn["bias_min"], syn["bias_max"],
                            syn["points"]) * scale
        noise_floor = syn["gain"] * K_B * syn["t_noise_k"] * bw
        p_out = np.array([syn["gain"] * source_calib.p_tr_model(v, cp)
                          for v in volts]) + noise_floor
        p_zero = noise_floor
        if syn["noise_sigma_w"] > 0:
            p_out = p_out + rng.normal(0.0, syn["noise_sigma_w"],
                                       size=len(volts))
            p_zero = p_zero + float(rng.normal(0.0, syn["noise_sigma_w"]))
        samples = list(zip(volts.tolist(), p_out.tolist()))
        payload["injected"] = {"gain": syn["gain"],
                               "t_noise_k": syn["t_noise_k"]}
    else:
        samples = source_calib.load_power_samples(cfg["power_csv"])
        p_zero = cfg["p_out_zero_w"]

    record = source_calib.calibration_pipeline(samples, p_zero, cp, bw)
    payload["record"] = record.as_dict()
    payload["n_samples"] = len(samples)

    if "reflection_csv" in cfg:
        trace = source_calib.load_reflection_trace(cfg["reflection_csv"])
        wr, gtr, gint = source_calib.fit_reflection(trace)
        payload["reflection_fit"] = {
            "f_r_ghz": wr / (_TWO_PI * 1e9),
            "gamma_tr_per_s": gtr,
            "gamma_int_per_s": gint,
        }

    ensure_parent_dir(out)
    with open(out, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"n_samples": len(samples)}


_COMMANDS = {
    "sweep-bias": _cmd_sweep_bias,
    "rf-sweep": _cmd_rf_sweep,
    "lamb-shift": _cmd_lamb_shift,
    "reset-sim": _cmd_reset_sim,
    "ep-map": _cmd_ep_map,
    "source": _cmd_source,
    "thermal": _cmd_thermal,
    "diff-lamb": _cmd_diff_lamb,
}


def _setup_logging() -> None:
    name = os.environ.get("QCRLAB_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def run(cfg: dict, out: str, threads: int, seed: int) -> None:
    """Execute a validated, default-filled configuration."""
    rng = np.random.default_rng(seed)
    command = cfg["command"]
    log.info("running %s -> %s", command, out)
    if command == "calibrate":
        extra = _run_calibrate(cfg, out, threads, rng)
    else:
        cols, rows, extra = _COMMANDS[command](cfg, threads, rng)
        ensure_parent_dir(out)
        write_table(out, cols, rows, comments=[f"qcrlab {command}"])
    sidecar = {
        "command": command,
        "config": cfg,
        "cli": {"threads": threads, "seed": seed},
        "version": __version__,
    }
    sidecar.update(extra)
    write_sidecar(out, sidecar)
    log.info("wrote %s", out)


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="qcrlab",
        description="Tunable-environment sweeps for junction-cooled "
                    "circuits: validated JSON config in, CSV + sidecar out.")
    parser.add_argument("command", nargs="?", default=None,
                        help="optional; must match the config's command")
    parser.add_argument("--config", required=True, help="JSON run config")
    parser.add_argument("--out", help="output path (overrides config)")
    parser.add_argument("--threads", type=int, default=1,
                        help="sweep-point worker threads")
    parser.add_argument("--seed", type=int, default=0,
                        help="RNG seed for noise synthesis")
    args = parser.parse_args(argv)

    try:
        cfg = load_and_validate(args.config)
        if args.command is not None and args.command != cfg["command"]:
            raise ConfigError(
                f"command-line command {args.command!r} does not match "
                f"config command {cfg['command']!r}")
        if args.out:
            cfg["out"] = args.out
        if "out" not in cfg:
            raise ConfigError("no output path: set 'out' in the config or "
                              "pass --out")
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
    except ConfigError as exc:
        log.error("%s", exc)
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        run(cfg, cfg["out"], args.threads, args.seed)
    except ConfigError as exc:
        log.error("%s", exc)
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        log.error("%s", exc)
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (QcrlabError, ZeroDivisionError, FloatingPointError,
            OverflowError) as exc:
        log.error("%s", exc)
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    return 0


def entrypoint() -> None:
    sys.exit(main())
