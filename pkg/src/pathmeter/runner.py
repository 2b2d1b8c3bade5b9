"""Config-driven experiments, named presets and report writing.

A config is a JSON object::

    {"schema_version": 1, "kind": "<kind>", "name": "<optional label>", ...}

with the kind-specific keys listed in ``KINDS``.  Complex numbers are written
either as a plain number or as ``[re, im]``; matrices are lists of rows.
:func:`run` returns an :class:`ExperimentReport` whose ``config`` is fully
resolved (defaults filled in), so feeding it back to :func:`run` reproduces
the same scalars.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import classical, meter
from .errors import ConfigError
from .experiments import double_slit
from .pathsum import Impulse, Sampled, TimeGrid, amplitude_distribution, exact_amplitude
from .quantum import MeasuredObservable, PureState, QuantumSystem
from .quasidist import QuasiDistribution, normalize, statistics

SCHEMA_VERSION = 1

KINDS = {
    "quasidist": {"points"},
    "double-slit": {"omega_larmor", "total_time", "slices", "delta_f"},
    "sweep": {"omega_larmor", "total_time", "slices", "delta_f_values", "delta_f_grid"},
    "classical": {"routes", "delta_f", "n_trials", "seed", "batch_size", "export_trials"},
    "weak-asymptotics": {"omega_larmor", "total_time", "slices", "delta_f_values"},
    "custom": {
        "hamiltonian", "observable", "initial", "final", "total_time", "slices",
        "beta", "delta_f_values",
    },
}
_COMMON = {"schema_version", "kind", "name", "output_dir"}


@dataclass
class Scalar:
    value: Any
    units: str
    anchor: str


@dataclass
class Table:
    header: list[str]
    rows: list[list[Any]]


@dataclass
class ExperimentReport:
    config: dict
    scalars: dict[str, Scalar] = field(default_factory=dict)
    tables: dict[str, Table] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def add(self, name, value, units="dimensionless", anchor="custom"):
        self.scalars[name] = Scalar(value, units, anchor)

    def scalar_values(self) -> dict[str, Any]:
        return {k: v.value for k, v in self.scalars.items()}

    def summary(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "scalars": {
                k: {"value": _jsonable(s.value), "units": s.units, "anchor": s.anchor}
                for k, s in self.scalars.items()
            },
            "tables": sorted(f"{name}.csv" for name in self.tables),
            "notes": self.notes,
        }


# ---------------------------------------------------------------- parsing


def _jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _number(x, name: str, *, positive=False, integer=False):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"expected a number, got {x!r}", name)
    if not math.isfinite(x):
        raise ConfigError("must be finite", name)
    if integer and int(x) != x:
        raise ConfigError(f"expected an integer, got {x!r}", name)
    if positive and x <= 0:
        raise ConfigError(f"must be positive, got {x!r}", name)
    return int(x) if integer else float(x)


def _complex(x, name: str) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ConfigError(f"complex numbers are [re, im], got {x!r}", name)
        return complex(_number(x[0], name), _number(x[1], name))
    return complex(_number(x, name))


def _vector(x, name: str) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ConfigError("expected a non-empty list", name)
    return np.array([_complex(v, f"{name}[{i}]") for i, v in enumerate(x)])


def _matrix(x, name: str) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise ConfigError("expected a list of rows", name)
    rows = [_vector(r, f"{name}[{i}]") for i, r in enumerate(x)]
    if len({r.size for r in rows}) != 1:
        raise ConfigError("rows differ in length", name)
    return np.array(rows)


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError("missing required field", key)
    return cfg[key]


def _delta_fs(cfg: dict) -> list[float]:
    if "delta_f_values" in cfg:
        vals = cfg["delta_f_values"]
        if not isinstance(vals, list) or not vals:
            raise ConfigError("expected a non-empty list", "delta_f_values")
        return [_number(v, f"delta_f_values[{i}]", positive=True) for i, v in enumerate(vals)]
    grid = cfg.get("delta_f_grid")
    if not isinstance(grid, dict):
        raise ConfigError("give delta_f_values or a delta_f_grid object", "delta_f_grid")
    start = _number(_require(grid, "start"), "delta_f_grid.start", positive=True)
    stop = _number(_require(grid, "stop"), "delta_f_grid.stop", positive=True)
    per = _number(grid.get("per_decade", 10), "delta_f_grid.per_decade", positive=True, integer=True)
    if stop <= start:
        raise ConfigError("stop must exceed start", "delta_f_grid")
    return [float(v) for v in meter.log_grid(start, stop, per)]


def validate(config: Any) -> dict:
    """Check the top-level shape of a config and return a defaults-filled copy."""
    if not isinstance(config, dict) or not config:
        raise ConfigError("config must be a non-empty JSON object")
    version = config.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {version!r}", "schema_version")
    kind = config.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {sorted(KINDS)}", "kind")
    unknown = set(config) - KINDS[kind] - _COMMON
    if unknown:
        raise ConfigError(f"unknown field(s) for kind {kind!r}", ",".join(sorted(unknown)))
    cfg = copy.deepcopy(config)
    cfg.setdefault("name", kind)
    if kind in ("double-slit", "sweep", "weak-asymptotics"):
        cfg.setdefault("omega_larmor", 1.0)
        cfg.setdefault("total_time", None)
        cfg.setdefault("slices", 2)
    if kind == "double-slit":
        cfg.setdefault("delta_f", meter.STRONG_DELTA_F)
    if kind == "weak-asymptotics":
        cfg.setdefault("delta_f_values", [1e2, 1e3, 1e4])
    if kind == "classical":
        cfg.setdefault("delta_f", 10.0)
        cfg.setdefault("n_trials", 100000)
        cfg.setdefault("seed", 0)
        cfg.setdefault("batch_size", 1 << 18)
        cfg.setdefault("export_trials", False)
    return cfg


# ---------------------------------------------------------------- kinds


def _run_quasidist(cfg, rep):
    pts = _require(cfg, "points")
    if not isinstance(pts, list) or not pts:
        raise ConfigError("expected a non-empty list of [f, weight] pairs", "points")
    pairs = []
    for i, p in enumerate(pts):
        if not isinstance(p, list) or len(p) not in (2, 3):
            raise ConfigError("each point is [f, re] or [f, re, im]", f"points[{i}]")
        w = complex(_number(p[1], f"points[{i}]"), _number(p[2], f"points[{i}]") if len(p) == 3 else 0.0)
        pairs.append((_number(p[0], f"points[{i}]"), w))
    try:
        dist = QuasiDistribution.from_pairs(pairs)
    except ValueError as exc:
        raise ConfigError(str(exc), "points") from exc
    st = statistics(dist)
    anchor = "mean and spread of an unnormalised signed/complex distribution"
    rep.add("normalization", st.normalization, anchor=anchor)
    rep.add("mean", st.mean, anchor=anchor)
    rep.add("second_moment", st.second_moment, anchor=anchor)
    rep.add("std_dev", st.std_dev, anchor=anchor)
    rows = [[f, w.real, w.imag] for f, w in normalize(dist)]
    rep.tables["normalized"] = Table(["f", "weight_re", "weight_im"], rows)


def _build_double_slit(cfg):
    omega = _number(cfg["omega_larmor"], "omega_larmor", positive=True)
    t = cfg["total_time"]
    t = None if t is None else _number(t, "total_time", positive=True)
    slices = _number(cfg["slices"], "slices", positive=True, integer=True)
    if slices % 2:
        raise ConfigError("must be even so the mid-time falls on a node", "slices")
    return double_slit(omega, t, slices)


def _pathway_scalars(ds, rep):
    a1, a2 = (complex(a) for a in ds.phi.amplitudes)
    rep.add("total_time", ds.grid.total_time, "time (1/omega_L units)", "dark-fringe preparation time")
    rep.add("amplitude_slit_1", a1, anchor="pathway amplitude cos^2(omega_L T/2)")
    rep.add("amplitude_slit_2", a2, anchor="pathway amplitude -sin^2(omega_L T/2)")
    rep.add(
        "meter_off_probability", ds.phi.interfering_probability(), "probability",
        "arrival probability with interfering pathways |A(1)+A(2)|^2",
    )
    rep.add(
        "decohered_probability", ds.phi.decohered_probability(), "probability",
        "arrival probability with pathways made real |A(1)|^2+|A(2)|^2",
    )
    f1, f2 = meter.weak_value_moments(ds.phi)
    rep.add("weak_value", f1, anchor="weak value of the slit number")
    rep.add("weak_second_moment", f2, anchor="second moment of the pathway amplitudes")
    rep.tables["amplitude_distribution"] = Table(
        ["f", "amplitude_re", "amplitude_im"], [[f, a.real, a.imag] for f, a in ds.phi.entries()]
    )


def _run_double_slit(cfg, rep):
    ds = _build_double_slit(cfg)
    df = _number(cfg["delta_f"], "delta_f", positive=True)
    _pathway_scalars(ds, rep)
    psi = meter.coarse_grain(ds.phi, meter.GaussianWindow(df))
    st = meter.reading_moments(psi)
    rep.add("delta_f", df, "same units as f", "meter accuracy")
    rep.add("mean_reading", st.mean, anchor="mean meter reading at this accuracy")
    rep.add("reading_variance", st.variance, anchor="variance of the meter readings")
    rep.add("arrival_probability", st.arrival_probability, "probability", "arrival probability with the meter on")
    weights = psi.binned_weights()
    for f, w in zip(psi.centers, weights):
        rep.add(
            f"binned_weight_f{f:g}", float(w), "probability",
            "reading mass near each slit number (unnormalised)",
        )
    rep.tables["binned_weights"] = Table(["f", "weight"], [[f, w] for f, w in zip(psi.centers, weights)])
    if df <= meter.STRONG_DELTA_F:
        rep.notes.append(
            f"strong limit evaluated at finite delta_f={df:g}; the delta-window weights are"
            " |A(k)|^2: " + ", ".join(f"{abs(a) ** 2:.6f}" for a in ds.phi.amplitudes)
        )


def _sweep_table(points):
    return Table(
        ["delta_f", "mean_reading", "arrival_probability"],
        [[p.delta_f, p.mean, p.arrival_probability] for p in points],
    )


def _run_sweep(cfg, rep):
    ds = _build_double_slit(cfg)
    dfs = _delta_fs(cfg)
    _pathway_scalars(ds, rep)
    points = meter.accuracy_sweep(ds.phi, dfs)
    rep.add("mean_reading_narrowest", points[0].mean, anchor="strong-measurement end of the sweep")
    rep.add("mean_reading_widest", points[-1].mean, anchor="weak-measurement end of the sweep")
    rep.tables["sweep"] = _sweep_table(points)


def _run_weak(cfg, rep):
    ds = _build_double_slit(cfg)
    dfs = _delta_fs(cfg)
    _pathway_scalars(ds, rep)
    try:
        r = meter.weak_asymptotics_check(ds.phi, dfs)
    except ValueError as exc:
        raise ConfigError(str(exc), "delta_f_values") from exc
    rep.add("deviation_bound_constant", r.bound_constant, "same units as f", "c in |<f> - Re f_bar| <= c/delta_f")
    rep.add("deviations_decreasing", r.decreasing, "flag", "weak-limit convergence of the mean reading")
    rep.add("deviations_within_bound", r.within_bound, "flag", "weak-limit convergence of the mean reading")
    rep.add("shape_constant", r.shape_constant, anchor="window-shape constant C at the widest window")
    shapes = r.shape_constants or (None,) * len(r.delta_f)
    rep.tables["weak_asymptotics"] = Table(
        ["delta_f", "mean_reading", "deviation", "reading_variance", "shape_constant"],
        [list(row) for row in zip(r.delta_f, r.means, r.deviations, r.variances, shapes)],
    )


def _run_classical(cfg, rep):
    routes = _require(cfg, "routes")
    if not isinstance(routes, list) or not routes:
        raise ConfigError("expected a non-empty list of [value, probability]", "routes")
    try:
        model = classical.ClassicalRouteModel.from_routes(
            (_number(r[0], f"routes[{i}]"), _number(r[1], f"routes[{i}]"))
            for i, r in enumerate(routes)
        )
    except (ValueError, TypeError, IndexError) as exc:
        raise ConfigError(str(exc), "routes") from exc
    window = meter.GaussianWindow(_number(cfg["delta_f"], "delta_f", positive=True))
    n = _number(cfg["n_trials"], "n_trials", positive=True, integer=True)
    seed = _number(cfg["seed"], "seed", integer=True)
    if seed < 0:
        raise ConfigError("must be non-negative", "seed")
    batch = _number(cfg["batch_size"], "batch_size", positive=True, integer=True)
    exact = classical.classical_moments(model, window)
    anchor = "broad classical meter recovers the route mean and spread"
    rep.add("exact_mean", exact.mean, anchor=anchor)
    rep.add("exact_second_moment", exact.second_moment, anchor=anchor)
    rep.add("exact_recovered_sigma", exact.recovered_sigma, anchor=anchor)
    trials = classical.simulate_trials(model, window, n, seed, batch_size=batch)
    rep.add("sample_mean", trials.mean, anchor=anchor)
    rep.add("sample_mean_stderr", trials.mean_stderr, anchor=anchor)
    rep.add("sample_recovered_sigma", trials.recovered_sigma, anchor=anchor)
    rep.add("sample_recovered_sigma_stderr", trials.recovered_sigma_stderr, anchor=anchor)
    if cfg["export_trials"]:
        rep.tables["trials"] = Table(
            ["trial", "route", "reading"],
            [[i, int(r), float(x)] for i, (r, x) in enumerate(zip(trials.routes, trials.readings))],
        )


def _run_custom(cfg, rep):
    try:
        system = QuantumSystem(_matrix(_require(cfg, "hamiltonian"), "hamiltonian"))
    except ValueError as exc:
        raise ConfigError(str(exc), "hamiltonian") from exc
    obs_cfg = _require(cfg, "observable")
    if not isinstance(obs_cfg, dict):
        raise ConfigError("expected an object with eigenvalues", "observable")
    eig = _require(obs_cfg, "eigenvalues")
    if not isinstance(eig, list):
        raise ConfigError("expected a list", "observable.eigenvalues")
    eig = [_number(v, "observable.eigenvalues") for v in eig]
    try:
        if "eigenbasis" in obs_cfg:
            observable = MeasuredObservable(eig, _matrix(obs_cfg["eigenbasis"], "observable.eigenbasis"))
        else:
            observable = MeasuredObservable.diagonal(eig)
    except ValueError as exc:
        raise ConfigError(str(exc), "observable") from exc
    states = {}
    for key in ("initial", "final"):
        try:
            states[key] = PureState.normalized(_vector(_require(cfg, key), key))
        except ValueError as exc:
            raise ConfigError(str(exc), key) from exc
    t = _number(_require(cfg, "total_time"), "total_time", positive=True)
    n = _number(_require(cfg, "slices"), "slices", positive=True, integer=True)
    grid = TimeGrid(t, n)
    beta = _require(cfg, "beta")
    if not isinstance(beta, dict) or len(beta) != 1 or not {"impulse", "sampled"} & set(beta):
        raise ConfigError('expected {"impulse": t0} or {"sampled": [...]}', "beta")
    try:
        if "impulse" in beta:
            weight = Impulse(_number(beta["impulse"], "beta.impulse"))
            weight.node_index(grid)
        else:
            weight = Sampled(tuple(_number(v, "beta.sampled") for v in beta["sampled"]))
            weight.node_weights(grid)
        phi = amplitude_distribution(system, observable, states["initial"], states["final"], grid, weight)
    except ValueError as exc:
        raise ConfigError(str(exc), "beta") from exc
    rep.add("transition_amplitude", exact_amplitude(phi))
    rep.add("path_sum_total", phi.total())
    rep.add("meter_off_probability", phi.interfering_probability(), "probability")
    rep.add("decohered_probability", phi.decohered_probability(), "probability")
    f1, f2 = meter.weak_value_moments(phi)
    rep.add("weak_value", f1)
    rep.add("weak_second_moment", f2)
    rep.tables["amplitude_distribution"] = Table(
        ["f", "amplitude_re", "amplitude_im"], [[f, a.real, a.imag] for f, a in phi.entries()]
    )
    if "delta_f_values" in cfg:
        rep.tables["sweep"] = _sweep_table(meter.accuracy_sweep(phi, _delta_fs(cfg)))


_RUNNERS = {
    "quasidist": _run_quasidist,
    "double-slit": _run_double_slit,
    "sweep": _run_sweep,
    "classical": _run_classical,
    "weak-asymptotics": _run_weak,
    "custom": _run_custom,
}


def run(config: dict) -> ExperimentReport:
    """Validate ``config`` and compute its report (no files are written)."""
    cfg = validate(config)
    rep = ExperimentReport(config=cfg)
    _RUNNERS[cfg["kind"]](cfg, rep)
    return rep


# ---------------------------------------------------------------- presets


PRESETS: dict[str, tuple[str, dict]] = {
    "quasidist-pos": (
        "positive weights rho(1)=1.1, rho(2)=1: mean ~1.4762, sigma ~0.4994",
        {"kind": "quasidist", "points": [[1, 1.1], [2, 1.0]]},
    ),
    "quasidist-neg": (
        "sign-alternating weights rho(1)=-1.1, rho(2)=1: mean -9, sigma ~10.49i",
        {"kind": "quasidist", "points": [[1, -1.1], [2, 1.0]]},
    ),
    "double-slit-strong": (
        "accurate meter (delta_f=0.01): weights ~0.252/0.248, mean slit ~1.4951",
        {"kind": "double-slit", "delta_f": 1e-2},
    ),
    "double-slit-weak": (
        "inaccurate meter (delta_f=1e4): weak value -100, meter-off probability ~0.000024",
        {"kind": "double-slit", "delta_f": 1e4},
    ),
    "fig2-sweep": (
        "mean slit number against meter accuracy, 1e-2..1e4: from ~1.4951 to ~-100",
        {"kind": "sweep", "delta_f_grid": {"start": 1e-2, "stop": 1e4, "per_decade": 10}},
    ),
    "classical-two-route": (
        "classical two-route control, w1=w2=1/2: mean 1.5, recovered sigma 0.5",
        {
            "kind": "classical", "routes": [[1, 0.5], [2, 0.5]], "delta_f": 10.0,
            "n_trials": 1000000, "seed": 20121,
        },
    ),
    "weak-asymptotics": (
        "convergence of the mean reading to Re f_bar and the shape constant C",
        {"kind": "weak-asymptotics", "delta_f_values": [1e2, 1e3, 1e4]},
    ),
}


def list_presets() -> list[tuple[str, str]]:
    return [(name, desc) for name, (desc, _) in PRESETS.items()]


def preset_config(name: str, seed: int | None = None) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; see list-presets", "preset")
    cfg = {"schema_version": SCHEMA_VERSION, "name": name, **copy.deepcopy(PRESETS[name][1])}
    if seed is not None:
        if cfg["kind"] != "classical":
            raise ConfigError(f"preset {name!r} is deterministic and takes no seed", "seed")
        cfg["seed"] = seed
    return cfg


# ---------------------------------------------------------------- output


def format_float(x) -> str:
    """17 significant digits: round-trips every double exactly."""
    return format(float(x), ".17g")


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format_float(x)


def table_to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header)
    for row in table.rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def read_csv(path) -> tuple[list[str], list[list[float]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(x) if x else math.nan for x in r] for r in rows[1:]]


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: ExperimentReport, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    for name, table in report.tables.items():
        p = out_dir / f"{name}.csv"
        atomic_write(p, table_to_csv(table))
        written.append(p)
    p = out_dir / "summary.json"
    atomic_write(p, json.dumps(report.summary(), indent=2, allow_nan=True) + "\n")
    written.append(p)
    return written


def resolve_out_dir(cli_out: str | None, config: dict) -> Path:
    """``--out`` beats ``$PATHMETER_OUT``, which beats the config's ``output_dir``."""
    if cli_out:
        return Path(cli_out)
    env = os.environ.get("PATHMETER_OUT")
    if env:
        return Path(env) / config.get("name", config.get("kind", "run"))
    if config.get("output_dir"):
        return Path(config["output_dir"])
    return Path("pathmeter-out") / config.get("name", config.get("kind", "run"))
