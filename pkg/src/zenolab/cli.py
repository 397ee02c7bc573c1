"""``zeno`` command line front end.

Subcommands: ``structure``, ``converge``, ``decay``, ``tau-star`` and
``limits``. A JSON config file (``--config``) may supply any flag by its
long name without dashes, e.g. ``{"bath-dim": 2}``; flags given on the
command line win. Exit codes: 0 ok, 1 internal failure, 2 usage, 3 missing
file, 4 invalid parameters, 5 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import decay, engine, pulses
from .errors import ClusterAmbiguity, NumericalFailure, PhaseCollision, ZenoError
from .models import bitflip_model, pauli_string, random_model
from .serialize import dumps, model_from_json, model_to_json, zeno_structure_to_json

log = logging.getLogger("zenolab")

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_MISSING, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3, 4, 5

COMMANDS = ("structure", "converge", "decay", "tau-star", "limits")
BUILTIN_MODELS = ("bitflip", "random")


class UsageError(Exception):
    pass


class ValidationError(Exception):
    pass


class MissingFile(Exception):
    pass


def _floats(text: str) -> list[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in str(text).split(",") if v.strip()]


# flag name -> (converter, default, help)
_MODEL = {
    "model": (str, "bitflip", "bitflip, random, or a ModelInstance JSON file"),
    "bath-dim": (int, 1, "bath dimension for the bitflip model"),
    "dim": (int, 4, "dimension for the random model"),
    "seed": (int, 0, "random seed"),
    "cluster-tol": (float, 1e-8, "eigenphase clustering tolerance"),
}
_BATH = {
    "bath": (str, "ohmic", "ohmic or tabulated"),
    "amp": (float, 1.0, "Ohmic amplitude A"),
    "omegac": (float, 1.0, "Ohmic cutoff frequency"),
    "temp": (float, 0.0, "bath temperature"),
    "n": (int, 2, "Ohmic cutoff exponent (integer >= 2)"),
    "table": (str, None, "JSON file with 'omega' and 'values' arrays for a tabulated bath"),
    "omega0": (float, 0.01, "qubit splitting"),
}
OPTIONS = {
    "structure": {**_MODEL, "out": (str, None, "output JSON path (stdout if omitted)")},
    "converge": {
        **_MODEL,
        "t": (float, 1.0, "total evolution time"),
        "n-list": (_ints, [4, 16, 64, 256], "comma-separated kick counts"),
        "csv": (str, None, "output CSV path (stdout if omitted)"),
    },
    "decay": {
        **_BATH,
        "tau-min": (float, 0.05, "smallest kick period"),
        "tau-max": (float, 20.0, "largest kick period"),
        "tau-points": (int, 16, "number of log-spaced periods"),
        "kicks": (int, 200, "number of kicks N (t = N tau)"),
        "rtol": (float, 1e-6, "quadrature relative tolerance"),
        "j-max": (int, 9, "highest odd sideband inside the default window"),
        "bracket": (_floats, None, "tau* search bracket lo,hi"),
        "csv": (str, None, "output CSV path"),
        "json": (str, None, "output JSON path"),
    },
    "tau-star": {
        **_BATH,
        "bracket": (_floats, [0.1, 1000.0], "search bracket lo,hi"),
        "out": (str, None, "output JSON path (stdout if omitted)"),
    },
    "limits": {
        "h": (str, "X", "Pauli string for the Hamiltonian H"),
        "h1": (str, "Z", "Pauli string for the coupling H1"),
        "tau1": (float, 1.0, "pulse area time"),
        "t": (float, 1.0, "horizon"),
        "k-list": (_floats, [10.0, 100.0, 1000.0], "comma-separated couplings K"),
        "tau2-list": (_floats, [0.1, 0.01, 0.001], "comma-separated idle times"),
        "cluster-tol": (float, 1e-8, "phase collision tolerance"),
        "csv": (str, None, "output CSV path"),
        "json": (str, None, "output JSON path"),
    },
}


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    threads: int = 1

    def __getitem__(self, key: str):
        return self.params[key]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zeno", description="Bang-bang decoupling and Zeno-subspace laboratory")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")
    for name, opts in OPTIONS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON file with flag values")
        for flag, (_, default, help_text) in opts.items():
            p.add_argument(f"--{flag}", default=None, help=f"{help_text} (default: {default})")
    return parser


def _threads() -> int:
    raw = os.environ.get("ZENO_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"ZENO_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValidationError("ZENO_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def parse_config(argv: list[str], config_file: str | None = None) -> RunConfig:
    """Resolve flags, config file values and defaults into a validated RunConfig."""
    ns = _build_parser().parse_args(argv)
    if ns.command is None:
        raise UsageError(f"a command is required: one of {', '.join(COMMANDS)}")
    opts = OPTIONS[ns.command]
    raw = {}
    config_file = ns.config or config_file
    if config_file:
        path = Path(config_file)
        if not path.is_file():
            raise MissingFile(f"config file not found: {config_file}")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise ValidationError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(opts))
        if unknown:
            raise ValidationError(f"unknown config keys for '{ns.command}': {', '.join(unknown)}")
        raw.update(loaded)
    for flag in opts:
        value = getattr(ns, flag.replace("-", "_"))
        if value is not None:
            raw[flag] = value

    params = {}
    for flag, (conv, default, _) in opts.items():
        if flag not in raw or raw[flag] is None:
            params[flag] = default
            continue
        value = raw[flag]
        try:
            if conv in (_ints, _floats) and isinstance(value, list):
                params[flag] = [conv(str(v))[0] for v in value]
            elif conv is int and isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            else:
                params[flag] = conv(value) if not isinstance(value, bool) else value
        except (TypeError, ValueError):
            raise ValidationError(f"--{flag}: cannot interpret {value!r}") from None
    config = RunConfig(ns.command, params, _threads())
    _validate(config)
    return config


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _validate(cfg: RunConfig) -> None:
    p = cfg.params
    if "model" in p:
        if p["model"] not in BUILTIN_MODELS and not Path(p["model"]).is_file():
            raise MissingFile(f"model file not found: {p['model']}")
        _require(p["bath-dim"] >= 1, "--bath-dim must be >= 1")
        _require(p["dim"] >= 2, "--dim must be >= 2")
        _require(p["cluster-tol"] > 0, "--cluster-tol must be > 0")
    if "bath" in p:
        _require(p["bath"] in ("ohmic", "tabulated"), "--bath must be ohmic or tabulated")
        if p["bath"] == "ohmic":
            _require(p["n"] >= 2, "--n must be an integer >= 2")
            _require(p["omegac"] > 0, "--omegac must be > 0")
            _require(p["temp"] >= 0, "--temp must be >= 0")
            _require(p["amp"] >= 0, "--amp must be >= 0")
        else:
            _require(p["table"] is not None, "--table is required for a tabulated bath")
            if not Path(p["table"]).is_file():
                raise MissingFile(f"table file not found: {p['table']}")
        _require(p["omega0"] > 0, "--omega0 must be > 0")
    if p.get("bracket") is not None:
        b = p["bracket"]
        _require(len(b) == 2 and 0 < b[0] < b[1], "--bracket must be lo,hi with 0 < lo < hi")
    if cfg.command == "converge":
        _require(len(p["n-list"]) > 0 and all(n >= 1 for n in p["n-list"]), "--n-list entries must be >= 1")
    if cfg.command == "decay":
        _require(0 < p["tau-min"] < p["tau-max"], "--tau-min must be positive and below --tau-max")
        _require(p["tau-points"] >= 1, "--tau-points must be >= 1")
        _require(p["kicks"] >= 1, "--kicks must be >= 1")
        _require(p["j-max"] >= 1 and p["j-max"] % 2 == 1, "--j-max must be a positive odd integer")
        _require(p["rtol"] > 0, "--rtol must be > 0")
    if cfg.command == "limits":
        _require(p["tau1"] > 0 and p["t"] > 0, "--tau1 and --t must be > 0")
        _require(len(p["k-list"]) > 0 and all(k > 0 for k in p["k-list"]), "--k-list entries must be > 0")
        _require(len(p["tau2-list"]) > 0 and all(s > 0 for s in p["tau2-list"]), "--tau2-list entries must be > 0")
        _require(p["cluster-tol"] > 0, "--cluster-tol must be > 0")


def _write(path: str | None, text: str) -> None:
    """Write atomically through a temp file in the target directory."""
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_model(p: dict):
    name = p["model"]
    if name == "bitflip":
        return bitflip_model(p["bath-dim"], p["seed"])
    if name == "random":
        return random_model(p["dim"], p["seed"])
    try:
        return model_from_json(json.loads(Path(name).read_text()))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValidationError(f"bad model file {name}: {exc}") from None


def _load_bath(p: dict) -> decay.SpectralDensity:
    if p["bath"] == "ohmic":
        return decay.Ohmic(p["amp"], p["omegac"], p["temp"], p["n"])
    try:
        d = json.loads(Path(p["table"]).read_text())
        return decay.Tabulated(tuple(d["omega"]), tuple(d["values"]), d.get("extrapolate", "zero"))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValidationError(f"bad table file {p['table']}: {exc}") from None


def _cmd_structure(cfg: RunConfig) -> None:
    p = cfg.params
    m = _load_model(p)
    zs = engine.zeno_structure(m.H, m.U1, p["cluster-tol"])
    payload = zeno_structure_to_json(zs)
    payload["model"] = model_to_json(m)
    _write(p["out"], dumps(payload))


def _cmd_converge(cfg: RunConfig) -> None:
    p = cfg.params
    m = _load_model(p)
    zs = engine.zeno_structure(m.H, m.U1, p["cluster-tol"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "dist_to_zeno_limit", "offblock_norm"])
    for n in p["n-list"]:
        dist = np.linalg.norm(engine.bb_evolve(m.H, m.U1, p["t"], n) - engine.zeno_limit_evolution(zs, p["t"], n))
        off = engine.offblock_norm(zs.decomposition, engine.ergodic_average(m.H, m.U1, n))
        w.writerow([n, format(float(dist), ".17e"), format(off, ".17e")])
    _write(p["csv"], buf.getvalue())


def _cmd_decay(cfg: RunConfig) -> None:
    p = cfg.params
    sd = _load_bath(p)
    taus = np.geomspace(p["tau-min"], p["tau-max"], p["tau-points"])
    quad = decay.QuadratureConfig(rtol=p["rtol"], j_max=p["j-max"])
    bracket = tuple(p["bracket"]) if p["bracket"] else None
    report = decay.decay_report(sd, p["omega0"], taus, p["kicks"], quad, bracket, threads=cfg.threads)
    if p["csv"] is None and p["json"] is None:
        _write(None, report.to_csv())
    if p["csv"] is not None:
        _write(p["csv"], report.to_csv())
    if p["json"] is not None:
        _write(p["json"], report.to_json())


def _cmd_tau_star(cfg: RunConfig) -> None:
    p = cfg.params
    sd = _load_bath(p)
    root = decay.transition_time(sd, p["omega0"], tuple(p["bracket"]))
    payload = {"tau_star": root, "bracket": list(p["bracket"]), "omega0": p["omega0"],
               "density": decay.spectral_density_to_dict(sd)}
    if isinstance(sd, decay.Ohmic):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            payload["estimate"] = decay.ohmic_tau_star_estimate(sd.amplitude, sd.cutoff, sd.temperature, sd.n, p["omega0"])
        for wmsg in caught:
            log.warning("%s", wmsg.message)
        payload["ratio_to_estimate"] = root / payload["estimate"]
    _write(p["out"], dumps(payload))


def _cmd_limits(cfg: RunConfig) -> None:
    p = cfg.params
    h, h1 = pauli_string(p["h"]), pauli_string(p["h1"])
    report = pulses.limit_order_compare(h, h1, p["tau1"], p["t"], p["k-list"], p["tau2-list"],
                                        p["cluster-tol"], threads=cfg.threads)
    if p["csv"] is None and p["json"] is None:
        _write(None, report.to_csv())
    if p["csv"] is not None:
        _write(p["csv"], report.to_csv())
    if p["json"] is not None:
        _write(p["json"], report.to_json())


_DISPATCH = {
    "structure": _cmd_structure,
    "converge": _cmd_converge,
    "decay": _cmd_decay,
    "tau-star": _cmd_tau_star,
    "limits": _cmd_limits,
}


def run(config: RunConfig) -> int:
    try:
        _DISPATCH[config.command](config)
    except ValidationError as exc:
        print(f"zeno: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalFailure, ClusterAmbiguity, PhaseCollision) as exc:
        print(f"zeno: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ZenoError, ValueError) as exc:
        print(f"zeno: invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        log.exception("internal failure")
        print(f"zeno: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    logging.basicConfig(level=logging.INFO if "-v" in argv or "--verbose" in argv else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(f"zeno: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MissingFile as exc:
        print(f"zeno: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except ValidationError as exc:
        print(f"zeno: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
