"""Sweep harness: Monte Carlo attack and analytic prediction side by side.

A configuration is a JSON document.  Every field is optional; missing
fields take the standard demonstration setup (1 kΩ / 10 kΩ, 1 MHz,
700 bits of 500 samples, ΔU of 0.1 V and 0.2 V)::

    {
      "base": {"r_low": 1000, "r_high": 10000, "bandwidth": 1e6,
               "samples_per_bit": 500, "key_length": 700, "master_seed": 0},
      "temp_sweep": [1e10, 1e12, 1e14],
      "delta_u_values": [0.1, 0.2],
      "dc_offset": 0.0,
      "defenses": [{"kind": "dc_block", "parameter": "bob"}],
      "replicate_count": 1,
      "output_path": "report.csv"
    }

For each grid point the parasitic sources are ``U_DCA = ΔU + dc_offset``
and ``U_DCB = dc_offset``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .analytic import predict
from .defense import DefenseAction
from .errors import ConfigError, InsufficientDataError, InvalidParameterError
from .eve import run_attack
from .exchange import run_key_exchange
from .physics import SystemParams

DEFAULT_TEMPS = tuple(float(t) for t in np.logspace(10, 17, 12))
DEFAULT_DELTA_U = (0.1, 0.2)

_BASE_FIELDS = {
    "r_low": float,
    "r_high": float,
    "bandwidth": float,
    "samples_per_bit": int,
    "key_length": int,
    "master_seed": int,
}


@dataclass(frozen=True)
class ExperimentConfig:
    base: SystemParams
    temp_sweep: tuple = DEFAULT_TEMPS
    delta_u_values: tuple = DEFAULT_DELTA_U
    defenses: tuple = ()
    replicate_count: int = 1
    output_path: str | None = None
    dc_offset: float = 0.0

    @property
    def all_defenses(self):
        """``none`` first, then the configured defenses without duplicates."""
        out = [DefenseAction()]
        for d in self.defenses:
            if d not in out:
                out.append(d)
        return out


@dataclass(frozen=True)
class ReportRow:
    temp_k: float
    delta_u_v: float
    defense: str
    p_mc: float
    p_mc_stderr: float
    p_analytic: float
    n_undetermined: int
    n_tot: int
    seed: int


REPORT_FIELDS = tuple(f.name for f in fields(ReportRow))
_INT_FIELDS = {"n_undetermined", "n_tot", "seed"}


@dataclass(frozen=True)
class SweepReport:
    rows: tuple = ()

    def __len__(self):
        return len(self.rows)


def _number(value, path, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    return float(value)


def _number_list(value, path):
    if not isinstance(value, list):
        raise ConfigError(path, "expected a list")
    if not value:
        raise ConfigError(path, "must be nonempty")
    return tuple(_number(v, f"{path}[{k}]") for k, v in enumerate(value))


def parse_config(source):
    """Parse and validate a JSON configuration document.

    Raises :class:`ConfigError` naming the offending field.
    """
    try:
        doc = json.loads(source) if source.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("", "top level must be an object")
    known = {"base", "temp_sweep", "delta_u_values", "defenses", "replicate_count",
             "output_path", "dc_offset"}
    for key in doc:
        if key not in known:
            raise ConfigError(key, "unknown field")

    base_doc = doc.get("base", {})
    if not isinstance(base_doc, dict):
        raise ConfigError("base", "expected an object")
    base_kwargs = {}
    for key, value in base_doc.items():
        if key not in _BASE_FIELDS:
            raise ConfigError(f"base.{key}", "unknown field")
        base_kwargs[key] = _number(value, f"base.{key}", _BASE_FIELDS[key])
    try:
        base = SystemParams(**base_kwargs)
    except InvalidParameterError as exc:
        raise ConfigError("base", str(exc)) from exc

    temps = _number_list(doc["temp_sweep"], "temp_sweep") if "temp_sweep" in doc else DEFAULT_TEMPS
    for k, t in enumerate(temps):
        if t < 0:
            raise ConfigError(f"temp_sweep[{k}]", "temperature must be >= 0")
    delta_u = (_number_list(doc["delta_u_values"], "delta_u_values")
               if "delta_u_values" in doc else DEFAULT_DELTA_U)

    defenses = []
    raw_defenses = doc.get("defenses", [])
    if not isinstance(raw_defenses, list):
        raise ConfigError("defenses", "expected a list")
    for k, d in enumerate(raw_defenses):
        path = f"defenses[{k}]"
        if not isinstance(d, dict) or "kind" not in d:
            raise ConfigError(path, "expected an object with a 'kind'")
        try:
            defenses.append(DefenseAction(d["kind"], d.get("parameter")))
        except InvalidParameterError as exc:
            raise ConfigError(path, str(exc)) from exc

    replicates = _number(doc.get("replicate_count", 1), "replicate_count", int)
    if replicates < 1:
        raise ConfigError("replicate_count", "must be >= 1")
    output_path = doc.get("output_path")
    if output_path is not None and not isinstance(output_path, str):
        raise ConfigError("output_path", "expected a string")
    offset = _number(doc.get("dc_offset", 0.0), "dc_offset")

    return ExperimentConfig(base, temps, delta_u, tuple(defenses), replicates,
                            output_path, offset)


def replicate_seed(master_seed, replicate):
    """Seed of replicate ``replicate``; shared by every grid point of that replicate."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(2, replicate))
    return int(ss.generate_state(1, np.uint32)[0])


def grid_params(config, temp, delta_u, seed):
    return replace(config.base, temp_eff=temp, u_dca=delta_u + config.dc_offset,
                   u_dcb=config.dc_offset, master_seed=seed)


def binomial_stderr(n_cor, n_tot):
    """Agresti-Coull standard error; stays positive at p = 0 or 1."""
    p = (n_cor + 2) / (n_tot + 4)
    return math.sqrt(p * (1 - p) / (n_tot + 4))


def _grid(config):
    for defense in config.all_defenses:
        for delta_u in config.delta_u_values:
            for temp in config.temp_sweep:
                for rep in range(config.replicate_count):
                    yield temp, delta_u, defense, replicate_seed(config.base.master_seed, rep)


def _evaluate(point):
    config, temp, delta_u, defense, seed = point
    params = defense.apply(grid_params(config, temp, delta_u, seed))
    try:
        stats = run_attack(run_key_exchange(params))
    except InsufficientDataError as exc:
        raise InsufficientDataError(
            f"grid point T={temp:g} K, dU={delta_u:g} V, defense={defense.label}, "
            f"seed={seed}: {exc}"
        ) from exc
    return ReportRow(
        temp_k=temp,
        delta_u_v=delta_u,
        defense=defense.label,
        p_mc=stats.p,
        p_mc_stderr=binomial_stderr(stats.n_cor, stats.n_tot),
        p_analytic=predict(params).p_bit,
        n_undetermined=stats.n_undetermined,
        n_tot=stats.n_tot,
        seed=seed,
    )


def run_experiment(config, workers=1):
    """Evaluate every grid point; rows come back in grid order regardless of ``workers``."""
    points = [(config, *p) for p in _grid(config)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate, points))
    else:
        rows = [_evaluate(p) for p in points]
    return SweepReport(tuple(rows))


def predict_grid(config):
    """Analytic predictions only, one dict per (defense, ΔU, temperature)."""
    out = []
    for defense in config.all_defenses:
        for delta_u in config.delta_u_values:
            for temp in config.temp_sweep:
                params = defense.apply(grid_params(config, temp, delta_u, config.base.master_seed))
                out.append({"temp_k": temp, "delta_u_v": delta_u, "defense": defense.label,
                            "p_analytic": predict(params).p_bit})
    return out


def _fmt(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def emit_rows(rows, field_names, fmt="csv", path=None):
    """Render a list of dicts as CSV or a JSON array; write to ``path`` if given."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(field_names)
        for row in rows:
            writer.writerow([_fmt(row[name]) for name in field_names])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([{name: row[name] for name in field_names} for row in rows],
                          indent=1) + "\n"
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def emit_report(report, fmt="csv", path=None):
    return emit_rows([asdict(r) for r in report.rows], REPORT_FIELDS, fmt, path)


def load_report(text, fmt="csv"):
    """Inverse of :func:`emit_report`."""
    if fmt == "csv":
        records = list(csv.DictReader(io.StringIO(text)))
    elif fmt == "json":
        records = json.loads(text)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    rows = []
    for rec in records:
        kwargs = {}
        for name in REPORT_FIELDS:
            value = rec[name]
            if name == "defense":
                kwargs[name] = str(value)
            elif name in _INT_FIELDS:
                kwargs[name] = int(value)
            else:
                kwargs[name] = float(value)
        rows.append(ReportRow(**kwargs))
    return SweepReport(tuple(rows))
