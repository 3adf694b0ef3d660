"""
Command-line front end.

    python -m bellwalk <command> [flags]

Settings are merged as flags > --config JSON file > defaults. Exit status:
0 ok, 2 bad usage or configuration, 3 norm drift or a failed check,
4 divergent samples, 1 anything else.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import config as cfg
from .asymptotics import QUANTITIES, fit_tail, reference_model, tail_basis
from .closed_form import amplitudes_closed
from .coin import CoinParams, SpinVector, evolve, norm, simulate
from .continuum import (
    WALK_MAP,
    ContinuumParams,
    PacketSpec,
    continuum_fields,
    packet_norm,
    spinor_report,
)
from .errors import BellwalkError, ConfigError, Divergence, InvalidArgument, NormDrift
from .io import read_series_csv, write_csv, write_json
from .measures import (
    ENGINES,
    MeasureSeries,
    QuadratureSpec,
    entangling_power_series,
    renyi_series,
    site_entanglement_grid,
    spin_position_entanglement,
)

COMMANDS = (
    "simulate",
    "check-closed-form",
    "entropy-series",
    "grid",
    "epower",
    "renyi",
    "continuum-check",
    "fit",
)
REPORT_COMMANDS = ("check-closed-form", "continuum-check", "fit")
SPIN_DEFAULTS = {
    "simulate": "initen",
    "entropy-series": "initen",
    "grid": "initen",
    "renyi": "renyi",
    "fit": "initen",
}
LN2 = float(np.log(2))

SETTINGS = (
    "coin", "spin", "spin_preset", "T", "alpha", "n_theta", "n_alpha", "window",
    "output", "format", "engine", "workers", "bits", "spins", "seed", "series",
    "basis", "quantity", "keep", "cross_check", "continuum",
)


# -------- Parsing --------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default settings (flags override it)")
    common.add_argument("--coin", help="preset p1/p2/p3 or x,y,z as fractions of a turn (1/6 accepted)")
    common.add_argument("--spin", help="four complex amplitudes, e.g. 1,i,0,0")
    common.add_argument("--spin-preset", dest="spin_preset", choices=sorted(cfg.SPIN_PRESETS))
    common.add_argument("--T", dest="T", type=int, help="number of steps")
    common.add_argument("--output", "-o", help="output path (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--engine", choices=ENGINES, help="closed-form amplitudes or step recursion")
    common.add_argument("--workers", type=int, help=f"worker threads (capped by {cfg.WORKERS_ENV})")
    common.add_argument("--bits", action="store_true", default=None, help="report entropies in bits")
    common.add_argument("--log-level", dest="log_level", default="INFO",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"))

    parser = argparse.ArgumentParser(prog="bellwalk", description="2d Bell-pair quantum walk experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common], help="final state amplitudes")

    check = sub.add_parser("check-closed-form", parents=[common], help="closed form vs recursion")
    check.add_argument("--spins", type=int, help="number of random initial spins")
    check.add_argument("--seed", type=int)

    sub.add_parser("entropy-series", parents=[common], help="spin-position entanglement E(t)")

    grid = sub.add_parser("grid", parents=[common], help="P and per-site entanglement at time T")
    grid.add_argument("--keep", choices=("A", "B"), help="qubit kept by the partial trace")

    epower = sub.add_parser("epower", parents=[common], help="entangling power series")
    epower.add_argument("--n-theta", dest="n_theta", type=int)
    epower.add_argument("--n-alpha", dest="n_alpha", type=int)

    renyi = sub.add_parser("renyi", parents=[common], help="SRD and RRE series")
    renyi.add_argument("--alpha", type=float)
    renyi.add_argument("--cross-check", dest="cross_check", action="store_true", default=None)

    cont = sub.add_parser("continuum-check", parents=[common], help="Dirac spinor and packet identities")
    cont.add_argument("--continuum", help="alpha_bar,xi_bar,theta_bar1,theta_bar2[,k1,k2]")

    fit = sub.add_parser("fit", parents=[common], help="fit a reference tail basis")
    fit.add_argument("--quantity", choices=QUANTITIES)
    fit.add_argument("--series", help="t,value CSV to fit instead of computing the series")
    fit.add_argument("--basis", choices=sorted(cfg.COIN_PRESETS), help="tail basis preset")
    fit.add_argument("--window", help="t0,t1")
    fit.add_argument("--alpha", type=float)
    fit.add_argument("--n-theta", dest="n_theta", type=int)
    fit.add_argument("--n-alpha", dest="n_alpha", type=int)
    return parser


def parse_coin(value):
    """CoinParams and the preset name it matches (or None)"""
    if isinstance(value, str) and value.strip() in cfg.COIN_PRESETS:
        name = value.strip()
        return CoinParams(*cfg.COIN_PRESETS[name]), name
    parts = value.split(",") if isinstance(value, str) else list(value)
    if len(parts) != 3:
        raise ConfigError(f"coin needs three values x,y,z, got {value!r}")
    try:
        fracs = tuple(Fraction(str(p).strip()) for p in parts)
    except (ValueError, ZeroDivisionError, OverflowError):
        raise ConfigError(f"cannot parse coin {value!r}") from None
    label = next((name for name, preset in cfg.COIN_PRESETS.items() if preset == fracs), None)
    return CoinParams(*fracs), label


def _complex_token(token):
    if isinstance(token, (list, tuple)) and len(token) == 2:
        return complex(float(token[0]), float(token[1]))
    if isinstance(token, (int, float, complex)):
        return complex(token)
    text = str(token).strip().replace(" ", "").lower()
    try:
        if "/" in text and "i" not in text and "j" not in text:
            return complex(float(Fraction(text)))
        return complex(text.replace("i", "j"))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse amplitude {token!r}") from None


def normalize_spin(amplitudes):
    """Renormalize a loaded spin; warn past SPIN_ACCEPT_TOL, refuse past SPIN_RENORM_TOL"""
    arr = np.asarray(amplitudes, dtype=complex)
    deviation = abs(np.linalg.norm(arr) - 1.0)
    if deviation > cfg.SPIN_RENORM_TOL:
        raise ConfigError(f"initial spin has norm {np.linalg.norm(arr):.12g}, expected 1")
    if deviation > cfg.SPIN_ACCEPT_TOL:
        logging.warning(f"Initial spin off by {deviation:.3e} in norm; renormalizing")
    return SpinVector.from_sequence(arr, normalize=True)


def parse_spin(value):
    if isinstance(value, str) and value.strip() in cfg.SPIN_PRESETS:
        return SpinVector(*cfg.SPIN_PRESETS[value.strip()])
    tokens = value.split(",") if isinstance(value, str) else list(value)
    if len(tokens) != 4:
        raise ConfigError(f"spin needs four amplitudes, got {len(tokens)}")
    return normalize_spin([_complex_token(tok) for tok in tokens])


def _numbers(value, what, counts):
    parts = value.split(",") if isinstance(value, str) else list(value)
    if len(parts) not in counts:
        raise ConfigError(f"{what} needs {' or '.join(map(str, counts))} values, got {value!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"cannot parse {what} {value!r}") from None


def parse_window(value):
    t0, t1 = _numbers(value, "window", (2,))
    if t0 > t1:
        raise ConfigError(f"window start {t0} is after its end {t1}")
    return t0, t1


def parse_continuum(value):
    nums = _numbers(value, "continuum", (4, 6))
    ks = [int(k) for k in nums[4:]] or [0, 0]
    return ContinuumParams(*nums[:4], *ks)


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    coin: CoinParams
    coin_label: Optional[str]
    spin: Optional[SpinVector]
    T: int
    alpha: float
    quad: QuadratureSpec
    window: Optional[tuple]
    output: Optional[str]
    fmt: str
    engine: str
    workers: int
    bits: bool
    spins: int
    seed: int
    series: Optional[str]
    basis: Optional[str]
    quantity: str
    keep: str
    cross_check: bool
    continuum: Optional[ContinuumParams]

    def meta(self):
        meta = {
            "command": self.command,
            "coin": list(self.coin.as_tuple()),
            "coinPreset": self.coin_label,
            "T": self.T,
            "engine": self.engine,
            "units": "bits" if self.bits else "nats",
        }
        if self.spin is not None:
            meta["spin"] = [[a.real, a.imag] for a in self.spin.array]
        if self.command in ("renyi", "fit"):
            meta["alpha"] = self.alpha
        if self.command in ("epower", "fit"):
            meta["nTheta"], meta["nAlpha"] = self.quad.n_theta, self.quad.n_alpha
        if self.window is not None:
            meta["window"] = list(self.window)
        return meta


def _read_config_file(path):
    try:
        with open(path, encoding="utf-8") as handle:
            document = json.load(handle)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    if not isinstance(document, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    unknown = set(document) - set(SETTINGS) - {"command"}
    if unknown:
        logging.warning(f"Ignoring unknown config keys: {sorted(unknown)}")
    return document


def load_config(args):
    """Merge flags over the config file over defaults"""
    command = args.command
    settings = {}
    if args.config:
        document = _read_config_file(args.config)
        if document.get("command") not in (None, command):
            logging.warning(f"Config file is for {document['command']!r}; running {command!r}")
        settings.update({k: v for k, v in document.items() if k in SETTINGS})
    settings.update({k: v for k, v in vars(args).items() if k in SETTINGS and v is not None})

    coin, label = parse_coin(settings.get("coin", "p1"))

    spin = None
    if "spin" in settings:
        spin = parse_spin(settings["spin"])
    elif "spin_preset" in settings:
        spin = parse_spin(settings["spin_preset"])
    elif command in SPIN_DEFAULTS:
        spin = parse_spin(SPIN_DEFAULTS[command])

    T = settings.get("T", cfg.DEFAULT_T.get(command, 0))
    if int(T) != T or T < 0:
        raise ConfigError(f"T must be a non-negative integer, got {T}")
    window = settings.get("window")
    basis = settings.get("basis")
    if basis is not None and basis not in cfg.COIN_PRESETS:
        raise ConfigError(f"unknown basis preset {basis!r}")

    return ExperimentConfig(
        command=command,
        coin=coin,
        coin_label=label,
        spin=spin,
        T=int(T),
        alpha=float(settings.get("alpha", cfg.DEFAULT_ALPHA)),
        quad=QuadratureSpec(
            settings.get("n_theta", cfg.DEFAULT_N_THETA),
            settings.get("n_alpha", cfg.DEFAULT_N_ALPHA),
        ),
        window=None if window is None else parse_window(window),
        output=settings.get("output"),
        fmt=settings.get("format", "json" if command in REPORT_COMMANDS else "csv"),
        engine=settings.get("engine", "closed"),
        workers=cfg.resolve_workers(settings.get("workers")),
        bits=bool(settings.get("bits", False)),
        spins=int(settings.get("spins", cfg.DEFAULT_ORACLE_SPINS)),
        seed=int(settings.get("seed", cfg.DEFAULT_SEED)),
        series=settings.get("series"),
        basis=basis,
        quantity=settings.get("quantity", "entanglement"),
        keep=settings.get("keep", "A"),
        cross_check=bool(settings.get("cross_check", False)),
        continuum=None if settings.get("continuum") is None else parse_continuum(settings["continuum"]),
    )


# -------- Output --------

def _emit_rows(config, header, rows, path=None):
    path = config.output if path is None else path
    if config.fmt == "json":
        write_json(path, config.meta(), [dict(zip(header, row)) for row in rows])
    else:
        write_csv(path, header, rows)


def _emit_report(config, report):
    if config.fmt == "json":
        write_json(config.output, config.meta(), report)
        return
    flat = [(key, value) for key, value in report.items() if not isinstance(value, (dict, list))]
    write_csv(config.output, ("field", "value"), flat)


def _series_rows(series):
    return [(t, v) for t, v in zip(series.t.tolist(), series.values.tolist())]


def _entropy_units(series, config):
    return series.scaled(1 / LN2) if config.bits else series


# -------- Commands --------

def run_simulate(config):
    state = None
    for state in evolve(config.spin, config.coin, config.T):
        drift = abs(norm(state) - 1.0)
        if drift > cfg.DRIFT_TOL:
            raise NormDrift(state.t, drift)
    t = state.t
    rows = []
    for m, (a0, a3), (a1, a2) in zip(state.sites.tolist(), state.plus_diag, state.anti_diag):
        rows += [
            (t, m, m, 0, a0.real, a0.imag),
            (t, m, m, 3, a3.real, a3.imag),
            (t, m, -m, 1, a1.real, a1.imag),
            (t, m, -m, 2, a2.real, a2.imag),
        ]
    rows.sort(key=lambda r: (r[1], r[2], r[3]))
    _emit_rows(config, ("t", "m", "n", "component", "re", "im"), rows)
    return 0


def _random_spins(count, seed):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(count, 4)) + 1j * rng.normal(size=(count, 4))
    return [SpinVector.from_sequence(v, normalize=True) for v in raw]


def run_check_closed_form(config):
    spins = [config.spin] if config.spin is not None else _random_spins(config.spins, config.seed)
    worst, worst_t = 0.0, 0
    for spin in spins:
        for state in evolve(spin, config.coin, config.T):
            closed = amplitudes_closed(spin, config.coin, state.t)
            diff = max(
                float(np.max(np.abs(closed.plus_diag - state.plus_diag))),
                float(np.max(np.abs(closed.anti_diag - state.anti_diag))),
            )
            if diff > worst:
                worst, worst_t = diff, state.t
    passed = worst < cfg.ORACLE_TOL
    logging.info(f"Closed form vs recursion: max |diff| = {worst:.3e} at t={worst_t}")
    _emit_report(config, {
        "maxAbsDiff": worst,
        "worstT": worst_t,
        "spins": len(spins),
        "tolerance": cfg.ORACLE_TOL,
        "pass": passed,
    })
    if not passed:
        logging.error(f"Closed form disagrees with the recursion by {worst:.3e} at t={worst_t}")
        return 3
    return 0


def run_entropy_series(config):
    series = spin_position_entanglement(
        config.spin, config.coin, config.T, engine=config.engine, workers=config.workers
    )
    _emit_rows(config, ("t", "value"), _series_rows(_entropy_units(series, config)))
    return 0


def run_grid(config):
    if config.engine == "closed":
        state = amplitudes_closed(config.spin, config.coin, config.T)
    else:
        state = simulate(config.spin, config.coin, config.T)
    grid = site_entanglement_grid(state, keep=config.keep)
    drift = abs(float(np.sum(grid.probability)) - 1.0)
    if drift > cfg.PROB_TOL:
        raise NormDrift(state.t, drift)
    entropy = grid.entropy / LN2 if config.bits else grid.entropy
    rows = list(zip(
        [state.t] * len(grid.m), grid.m.tolist(), grid.n.tolist(),
        grid.probability.tolist(), entropy.tolist(),
    ))
    _emit_rows(config, ("t", "m", "n", "P", "E_site"), rows)
    return 0


def run_epower(config):
    series = entangling_power_series(
        config.coin, range(config.T + 1), config.quad, workers=config.workers
    )
    _emit_rows(config, ("t", "value"), _series_rows(series))
    return 0


def _suffixed(path, tag):
    path = Path(path)
    return path.with_name(f"{path.stem}.{tag}{path.suffix}")


def run_renyi(config):
    srd_s, rre_s = renyi_series(
        config.coin, config.alpha, config.T, spin=config.spin, engine=config.engine,
        cross_check=config.cross_check, workers=config.workers,
    )
    srd_s, rre_s = _entropy_units(srd_s, config), _entropy_units(rre_s, config)
    header = ("t", "value")
    if config.fmt == "json":
        write_json(config.output, {**config.meta(), "diverged": list(srd_s.diverged)}, {
            "srd": [dict(zip(header, r)) for r in _series_rows(srd_s)],
            "rre": [dict(zip(header, r)) for r in _series_rows(rre_s)],
        })
    elif config.output is None:
        write_csv(None, header, _series_rows(srd_s))
        sys.stdout.write("\n")
        write_csv(None, header, _series_rows(rre_s))
    else:
        write_csv(_suffixed(config.output, "srd"), header, _series_rows(srd_s))
        write_csv(_suffixed(config.output, "rre"), header, _series_rows(rre_s))
    if srd_s.diverged:
        logging.error(f"Divergent Renyi samples at t = {list(srd_s.diverged)}")
        return 4
    return 0


def run_continuum_check(config):
    momenta = np.linspace(-10.0, 10.0, 300)
    identities = spinor_report(momenta, (0.1, 1.0, 5.0))
    packets = [
        {"sigma": sigma, "m": m, "norm": packet_norm(PacketSpec(sigma), m)}
        for sigma in (0.5, 1.0, 4.0)
        for m in (0.1, 1.0)
    ]
    map_ok = bool(np.allclose(WALK_MAP.conj().T @ WALK_MAP, np.eye(4)))
    passed = (
        max(identities.values()) < cfg.SPINOR_TOL
        and all(abs(p["norm"] - 1.0) < cfg.PACKET_TOL for p in packets)
        and map_ok
    )
    report = {
        "identities": identities,
        "maxIdentityResidual": max(identities.values()),
        "packets": packets,
        "maxPacketError": max(abs(p["norm"] - 1.0) for p in packets),
        "walkMapUnitary": map_ok,
        "pass": passed,
    }
    if config.continuum is not None:
        report["fields"] = continuum_fields(config.continuum).to_dict()
    _emit_report(config, report)
    if not passed:
        logging.error("Continuum identities failed")
        return 3
    return 0


def _fit_series(config):
    if config.series:
        times, values = read_series_csv(config.series)
        return MeasureSeries(config.quantity, times, values)
    if config.quantity == "entanglement":
        return spin_position_entanglement(
            config.spin, config.coin, config.T, engine=config.engine, workers=config.workers
        )
    if config.quantity == "epower":
        return entangling_power_series(
            config.coin, range(1, config.T + 1), config.quad, workers=config.workers
        )
    srd_s, rre_s = renyi_series(
        config.coin, config.alpha, config.T, spin=config.spin,
        engine=config.engine, workers=config.workers,
    )
    return srd_s if config.quantity == "srd" else rre_s


def run_fit(config):
    preset = config.basis or config.coin_label
    if preset is None:
        raise ConfigError("fit needs --basis when the coin is not one of the presets")
    basis = tail_basis(config.quantity, preset)
    series = _fit_series(config)
    report = fit_tail(series, basis, config.window)
    alpha = config.alpha if config.quantity in ("srd", "rre") else None
    reference = reference_model(config.quantity, preset, alpha)
    result = report.to_dict()
    result["quantity"] = config.quantity
    result["basisPreset"] = preset
    result["reference"] = None if reference is None else reference.to_dict()
    if reference is not None:
        result["constantDelta"] = report.model.constant - reference.constant
    _emit_report(config, result)
    return 0


RUNNERS = {
    "simulate": run_simulate,
    "check-closed-form": run_check_closed_form,
    "entropy-series": run_entropy_series,
    "grid": run_grid,
    "epower": run_epower,
    "renyi": run_renyi,
    "continuum-check": run_continuum_check,
    "fit": run_fit,
}


def run(config):
    return RUNNERS[config.command](config)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format='%(asctime)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    try:
        config = load_config(args)
        logging.info(f"Running {config.command} with coin {config.coin.as_tuple()}, T={config.T}")
        return run(config)
    except NormDrift as err:
        logging.error(f"Norm drift: {err}")
        return 3
    except InvalidArgument as err:
        logging.error(f"Invalid configuration: {err}")
        return 2
    except Divergence as err:
        logging.error(f"Divergence: {err}")
        return 4
    except (BellwalkError, OSError) as err:
        logging.error(f"{type(err).__name__}: {err}")
        return 1
