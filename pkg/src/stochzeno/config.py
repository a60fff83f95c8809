"""Experiment configuration: strict TOML parsing with mandatory units.

Example::

    m = 100
    n_runs = 1000
    seed = 20170101

    [hamiltonian]
    kind = "rabi"
    delta_h = "2.5 kHz"

    [initial_state]
    basis = 0

    [distribution]
    atoms = [{ mu = "2 us", weight = 0.8 }, { mu = "10 us", weight = 0.2 }]

    [sweep]
    start = "2 us"
    stop = "25 us"
    step = "0.5 us"

Unknown keys anywhere are errors. Frequencies need a unit among
``rad/s, Hz, kHz, MHz`` and durations among ``s, ms, us, ns``.

A JSON analyze report is also accepted as configuration; its ``config``
member holds the table it was produced from.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .exceptions import ConfigError, ValidationError
from .intervals import IntervalDistribution, check_seed
from .quantum import HermitianOperator, StateVector, basis_state, rabi_hamiltonian
from .statistics import LOOSE_ZENO, STRICT_ZENO
from .units import FREQUENCY_UNITS, parse_frequency, parse_time

TOP_KEYS = {"m", "n_runs", "seed", "hamiltonian", "initial_state", "distribution",
            "sweep", "histogram", "zeno", "output"}
DEFAULTS = {"m": 100, "n_runs": 1000, "seed": 0}


@dataclass(frozen=True)
class SweepSpec:
    start: float
    stop: float
    step: float
    variable: Optional[str] = None

    def grid(self):
        """Inclusive grid ``start, start + step, ..., stop`` in seconds."""
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(n)


@dataclass(frozen=True)
class ExperimentConfig:
    hamiltonian: HermitianOperator
    initial_state: StateVector
    atoms: tuple
    m: int
    n_runs: int
    seed: int
    sweep: Optional[SweepSpec] = None
    bins: object = "sigma"
    bin_scale: str = "log"
    strict: float = STRICT_ZENO
    loose: float = LOOSE_ZENO
    out_dir: Optional[str] = None
    out_format: str = "csv"
    raw: dict = field(default_factory=dict, compare=False)

    @property
    def distribution(self):
        return IntervalDistribution.from_atoms(self.atoms)


def _check_keys(table, allowed, where):
    if not isinstance(table, dict):
        raise ConfigError("expected a table", where)
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise ConfigError(f"unrecognized key(s) {unknown}", where)


def _require(table, key, where):
    if key not in table:
        raise ConfigError(f"missing required key {key!r}", where)
    return table[key]


def _integer(value, where, minimum):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"expected an integer >= {minimum}, got {value!r}", where)
    return value


def _complex_entry(value, where):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        return complex(value[0], value[1])
    raise ConfigError(f"expected a number or [re, im] pair, got {value!r}", where)


def _parse_hamiltonian(table):
    where = "hamiltonian"
    kind = _require(table, "kind", where)
    if kind == "rabi":
        _check_keys(table, {"kind", "delta_h"}, where)
        return rabi_hamiltonian(parse_frequency(_require(table, "delta_h", where), f"{where}.delta_h"))
    if kind == "matrix":
        _check_keys(table, {"kind", "units", "matrix"}, where)
        units = _require(table, "units", where)
        if units not in FREQUENCY_UNITS:
            raise ConfigError(f"unknown unit {units!r}; expected one of {sorted(FREQUENCY_UNITS)}",
                              f"{where}.units")
        rows = _require(table, "matrix", where)
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ConfigError("expected a list of rows", f"{where}.matrix")
        mat = [[_complex_entry(v, f"{where}.matrix[{i}][{j}]") for j, v in enumerate(row)]
               for i, row in enumerate(rows)]
        try:
            return HermitianOperator(np.array(mat, dtype=complex) * FREQUENCY_UNITS[units])
        except (ValidationError, ValueError) as exc:
            raise ConfigError(str(exc), f"{where}.matrix") from exc
    raise ConfigError(f"kind must be 'rabi' or 'matrix', got {kind!r}", f"{where}.kind")


def _parse_state(table, dim):
    where = "initial_state"
    _check_keys(table, {"basis", "amplitudes"}, where)
    if ("basis" in table) == ("amplitudes" in table):
        raise ConfigError("give exactly one of 'basis' or 'amplitudes'", where)
    try:
        if "basis" in table:
            return basis_state(dim, _integer(table["basis"], f"{where}.basis", 0))
        amps = table["amplitudes"]
        if not isinstance(amps, list):
            raise ConfigError("expected a list", f"{where}.amplitudes")
        vec = [_complex_entry(v, f"{where}.amplitudes[{i}]") for i, v in enumerate(amps)]
        if len(vec) != dim:
            raise ConfigError(f"expected {dim} amplitudes, got {len(vec)}", f"{where}.amplitudes")
        return StateVector.normalized(vec)
    except ValidationError as exc:
        raise ConfigError(str(exc), where) from exc


def _parse_atoms(table):
    where = "distribution"
    _check_keys(table, {"atoms"}, where)
    atoms = _require(table, "atoms", where)
    if not isinstance(atoms, list) or not atoms:
        raise ConfigError("expected a non-empty list of atoms", f"{where}.atoms")
    parsed = []
    for i, atom in enumerate(atoms):
        at = f"{where}.atoms[{i}]"
        _check_keys(atom, {"mu", "weight"}, at)
        mu = parse_time(_require(atom, "mu", at), f"{at}.mu")
        weight = _require(atom, "weight", at)
        if isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise ConfigError(f"weight must be a number, got {weight!r}", f"{at}.weight")
        parsed.append((mu, float(weight)))
    try:
        IntervalDistribution.from_atoms(parsed)
    except ValidationError as exc:
        raise ConfigError(str(exc), where) from exc
    return tuple(parsed)


def _parse_sweep(table):
    where = "sweep"
    _check_keys(table, {"variable", "start", "stop", "step"}, where)
    variable = table.get("variable")
    if variable is not None and variable not in ("mu", "mu2"):
        raise ConfigError(f"variable must be 'mu' or 'mu2', got {variable!r}", f"{where}.variable")
    start = parse_time(_require(table, "start", where), f"{where}.start")
    stop = parse_time(_require(table, "stop", where), f"{where}.stop")
    step = parse_time(_require(table, "step", where), f"{where}.step")
    if start < 0 or step <= 0 or stop < start:
        raise ConfigError("need 0 <= start <= stop and step > 0", where)
    return SweepSpec(start, stop, step, variable)


def config_from_dict(data):
    """Validate a parsed configuration table and build an :class:`ExperimentConfig`."""
    _check_keys(data, TOP_KEYS, "<root>")
    values = {k: data.get(k, DEFAULTS[k]) for k in DEFAULTS}
    m = _integer(values["m"], "m", 1)
    n_runs = _integer(values["n_runs"], "n_runs", 1)
    try:
        seed = check_seed(values["seed"])
    except ValidationError as exc:
        raise ConfigError(str(exc), "seed") from exc

    H = _parse_hamiltonian(_require(data, "hamiltonian", "<root>"))
    psi0 = _parse_state(_require(data, "initial_state", "<root>"), H.dim)
    atoms = _parse_atoms(_require(data, "distribution", "<root>"))
    sweep = _parse_sweep(data["sweep"]) if "sweep" in data else None

    hist = data.get("histogram", {})
    _check_keys(hist, {"bins", "scale"}, "histogram")
    bins = hist.get("bins", "sigma")
    if not (isinstance(bins, str) or (isinstance(bins, int) and not isinstance(bins, bool) and bins > 0)):
        raise ConfigError(f"bins must be a positive integer or a numpy rule name, got {bins!r}",
                          "histogram.bins")
    scale = hist.get("scale", "log")
    if scale not in ("log", "linear"):
        raise ConfigError(f"scale must be 'log' or 'linear', got {scale!r}", "histogram.scale")

    zeno = data.get("zeno", {})
    _check_keys(zeno, {"strict", "loose"}, "zeno")
    strict = float(zeno.get("strict", STRICT_ZENO))
    loose = float(zeno.get("loose", LOOSE_ZENO))
    if not 0 < strict <= loose:
        raise ConfigError("need 0 < strict <= loose", "zeno")

    output = data.get("output", {})
    _check_keys(output, {"dir", "format"}, "output")
    out_format = output.get("format", "csv")
    if out_format not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {out_format!r}", "output.format")

    return ExperimentConfig(
        hamiltonian=H, initial_state=psi0, atoms=atoms, m=m, n_runs=n_runs, seed=seed,
        sweep=sweep, bins=bins, bin_scale=scale, strict=strict, loose=loose,
        out_dir=output.get("dir"), out_format=out_format, raw=data,
    )


def load_config(path):
    """Read a TOML configuration, or the ``config`` member of a JSON report."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        if isinstance(data, dict) and "schema_version" in data and "config" in data:
            data = data["config"]
    else:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)
