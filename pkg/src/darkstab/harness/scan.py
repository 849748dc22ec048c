"""Declarative parameter scans over preset systems."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from ..obe import (DEFAULT_MAX_PERIODS, DEFAULT_PERIOD_TOL, IntegrationError,
                   QuasiSteadyError, SchemeError, SteadyStateError, density_matrix_errors,
                   excited_population, level_populations, quasi_steady_average,
                   steady_state)
from .analysis import AnalysisError, lineshape_fwhm
from .config import ConfigError, parse_number
from .presets import MAGIC_DEG, Setup, build_setup, preset_defaults, resolve_param

__all__ = [
    "Axis",
    "ScanSpec",
    "ScanRecord",
    "SWEEPABLE",
    "evaluate_point",
    "run_scan",
    "DENSITY_TOLERANCES",
]

SWEEPABLE = ("delta_B", "theta_BE", "omega", "detuning", "phi", "delta_mod", "linewidth")
OBSERVABLES = ("Pf", "fwhm", "populations")
#: Acceptance limits for every returned density matrix.
DENSITY_TOLERANCES = {"hermiticity": 1e-10, "trace": 1e-10, "min_eigenvalue": -1e-9,
                      "population_sum": 1e-8}
DEFAULT_SOLVER = {"tol": DEFAULT_PERIOD_TOL, "max_periods": DEFAULT_MAX_PERIODS,
                  "int_tol": 1e-10, "method": "floquet"}


@dataclass(frozen=True)
class Axis:
    """One swept parameter.  ``relative_to`` multiplies grid values by another
    parameter of the point (e.g. ``delta_B`` in units of ``omega``)."""

    name: str
    min: float
    max: float
    count: int
    spacing: str = "linear"
    relative_to: str | None = None

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError(f"axis {self.name}: count must be >= 2")
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"axis {self.name}: spacing must be linear or log")
        if self.spacing == "log" and self.min <= 0:
            raise ConfigError(f"axis {self.name}: log spacing needs min > 0")
        if self.max < self.min:
            raise ConfigError(f"axis {self.name}: max < min")
        base = self.name.split(".")[0]
        if base not in SWEEPABLE:
            raise ConfigError(f"axis {self.name}: not a sweepable parameter "
                              f"({', '.join(SWEEPABLE)})")

    def grid(self) -> np.ndarray:
        if self.spacing == "log":
            g = np.geomspace(self.min, self.max, self.count)
        else:
            g = np.linspace(self.min, self.max, self.count)
        if self.name == "theta_BE" and self.relative_to is None \
                and self.min < MAGIC_DEG < self.max:
            if not np.any(np.isclose(g, MAGIC_DEG, rtol=0, atol=1e-9)):
                g = np.sort(np.append(g, MAGIC_DEG))
        return g

    @classmethod
    def from_dict(cls, d: dict) -> "Axis":
        try:
            return cls(name=str(d["name"]), min=parse_number(d["min"], "min"),
                       max=parse_number(d["max"], "max"), count=int(d["count"]),
                       spacing=d.get("spacing", "linear"),
                       relative_to=d.get("relative_to"))
        except KeyError as exc:
            raise ConfigError(f"axis is missing {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad axis {d!r}: {exc}") from None

    def to_dict(self) -> dict:
        d = {"name": self.name, "min": self.min, "max": self.max, "count": self.count,
             "spacing": self.spacing}
        if self.relative_to:
            d["relative_to"] = self.relative_to
        return d


@dataclass(frozen=True)
class ScanSpec:
    preset: str
    axes: tuple[Axis, ...]
    overrides: dict = field(default_factory=dict)
    observables: tuple[str, ...] = ("Pf",)
    solver: dict = field(default_factory=dict)
    fwhm: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("a scan has one or two axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ConfigError("axes must be distinct")
        for ob in self.observables:
            if ob not in OBSERVABLES:
                raise ConfigError(f"unknown observable {ob!r}")
        preset_defaults(self.preset)  # validates the name
        for a in self.axes:
            resolve_param(self.preset, a.name)
            if a.relative_to:
                resolve_param(self.preset, a.relative_to)
        for k in self.solver:
            if k not in DEFAULT_SOLVER:
                raise ConfigError(f"unknown solver option {k!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "ScanSpec":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(d) - {"preset", "axes", "overrides", "observables", "solver", "fwhm"}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "preset" not in d or "axes" not in d:
            raise ConfigError("config needs 'preset' and 'axes'")
        axes = d["axes"]
        if not isinstance(axes, list):
            raise ConfigError("'axes' must be a list")
        return cls(preset=str(d["preset"]),
                   axes=tuple(Axis.from_dict(a) for a in axes),
                   overrides=dict(d.get("overrides", {})),
                   observables=tuple(d.get("observables", ["Pf"])),
                   solver=dict(d.get("solver", {})),
                   fwhm=dict(d.get("fwhm", {})))

    def to_dict(self) -> dict:
        return {"preset": self.preset, "axes": [a.to_dict() for a in self.axes],
                "overrides": dict(self.overrides), "observables": list(self.observables),
                "solver": self.solver_options(), "fwhm": dict(self.fwhm)}

    def solver_options(self) -> dict:
        out = dict(DEFAULT_SOLVER)
        out.update(self.solver)
        return out

    def grids(self) -> list[np.ndarray]:
        return [a.grid() for a in self.axes]

    def points(self) -> list[tuple[tuple[int, ...], dict]]:
        """Grid index and parameter overrides of every point, row-major."""
        grids = self.grids()
        out = []
        for idx in itertools.product(*[range(len(g)) for g in grids]):
            params = dict(self.overrides)
            values = {}
            for a, g, i in zip(self.axes, grids, idx):
                v = float(g[i])
                values[a.name] = v
            for a in self.axes:
                v = values[a.name]
                if a.relative_to:
                    ref = values.get(a.relative_to)
                    if ref is None:
                        ref = self._param(a.relative_to)
                    v = v * ref
                params[a.name] = v
            out.append((idx, params))
        return out

    def _param(self, name):
        key = resolve_param(self.preset, name)
        for k, v in self.overrides.items():
            if resolve_param(self.preset, k) == key:
                return parse_number(v, k)
        return float(preset_defaults(self.preset)[key])


@dataclass
class ScanRecord:
    """One grid point: swept values, populations, widths, solver metadata."""

    index: tuple[int, ...]
    values: dict[str, float]
    populations: dict[str, float] = field(default_factory=dict)
    Pf: float | None = None
    fwhm: float | None = None
    meta: dict[str, Any] = field(default_factory=dict)
    error: str | None = None

    def get(self, key: str, default=None):
        if key in self.values:
            return self.values[key]
        if key in ("Pf", "fwhm", "error"):
            return getattr(self, key)
        if key.startswith("pop_") and key[4:] in self.populations:
            return self.populations[key[4:]]
        if key in self.populations:
            return self.populations[key]
        return self.meta.get(key, default)


def _solve(setup: Setup, opts: dict):
    """Time-averaged (or stationary) density matrix and metadata."""
    L = setup.liouvillian()
    if L.time_independent:
        rho, info = steady_state(L, full_output=True)
        meta = {"settle_time": 0.0, "residual": info["residual"],
                "null_dim": info["null_dim"], "degenerate": info["degenerate"]}
        return rho, meta
    rho, settle, info = quasi_steady_average(
        L, tol=opts["tol"], max_periods=int(opts["max_periods"]),
        method=opts["method"], int_tol=opts["int_tol"], full_output=True)
    meta = {"settle_time": settle, "periodicity": info["periodicity"],
            "null_dim": info.get("null_dim", 1), "degenerate": info.get("degenerate", False)}
    return rho, meta


def _check_density(rho, pops) -> tuple[dict, str | None]:
    err = density_matrix_errors(rho)
    tol = DENSITY_TOLERANCES
    psum = abs(sum(pops.values()) - 1.0)
    err["population_sum"] = psum
    bad = []
    if err["hermiticity"] > tol["hermiticity"]:
        bad.append("hermiticity")
    if err["trace"] > tol["trace"]:
        bad.append("trace")
    if err["min_eigenvalue"] < tol["min_eigenvalue"]:
        bad.append("positivity")
    if psum > tol["population_sum"]:
        bad.append("population sum")
    return err, (f"invariant: {', '.join(bad)}" if bad else None)


def evaluate_point(preset: str, params: dict, observables: Sequence[str] = ("Pf",),
                   solver: dict | None = None, fwhm_opts: dict | None = None,
                   index: tuple[int, ...] = (), values: dict | None = None) -> ScanRecord:
    """Solve one parameter point; failures are recorded, not raised."""
    opts = dict(DEFAULT_SOLVER)
    opts.update(solver or {})
    rec = ScanRecord(tuple(index), dict(values if values is not None else params))
    try:
        setup = build_setup(preset, params)
    except (ConfigError, SchemeError) as exc:
        rec.error, rec.meta["error_kind"] = f"config: {exc}", "config"
        return rec
    try:
        rho, meta = _solve(setup, opts)
    except (SteadyStateError, QuasiSteadyError, IntegrationError, np.linalg.LinAlgError) as exc:
        rec.error, rec.meta["error_kind"] = f"nonconvergence: {exc}", "solver"
        return rec
    rec.meta.update(meta)
    rec.populations = level_populations(rho, setup.scheme)
    rec.Pf = excited_population(rho, setup.scheme, setup.observed)
    checks, bad = _check_density(rho, rec.populations)
    rec.meta.update(checks)
    if bad:
        rec.error, rec.meta["error_kind"] = bad, "invariant"
        return rec
    if "fwhm" in observables:
        fo = dict(fwhm_opts or {})
        drive = fo.get("drive", setup.main_drive)
        d0 = next((d for d in setup.drives if d.name == drive), None)
        if d0 is None:
            rec.error, rec.meta["error_kind"] = f"config: no drive {drive!r}", "config"
            return rec
        om = max(d.omega for d in setup.drives)
        scale = float(fo.get("scale", 2.0 * max(1.0, om, 4.0 * setup.zeeman.delta_B)))

        def pf_at(det):
            r, _ = _solve(setup.with_detuning(det, drive), opts)
            return excited_population(r, setup.scheme, setup.observed)

        try:
            w = lineshape_fwhm(pf_at, center=float(fo.get("center", 0.0)), scale=scale,
                               points=int(fo.get("points", 61)))
            rec.fwhm = float(w)
            rec.meta["fwhm_masked"] = w.masked
        except AnalysisError as exc:
            rec.error, rec.meta["error_kind"] = f"fwhm: {exc}", "fwhm"
        except (SteadyStateError, QuasiSteadyError, IntegrationError) as exc:
            rec.error, rec.meta["error_kind"] = f"nonconvergence: {exc}", "solver"
    return rec


def _worker(job):
    preset, params, observables, solver, fwhm_opts, index, values = job
    return evaluate_point(preset, params, observables, solver, fwhm_opts, index, values)


def run_scan(spec: ScanSpec, workers: int = 1) -> list[ScanRecord]:
    """Evaluate every grid point; the result order is the grid order."""
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    jobs = []
    for idx, params in spec.points():
        values = {a.name: params[a.name] for a in spec.axes}
        jobs.append((spec.preset, params, spec.observables, spec.solver_options(),
                     spec.fwhm, idx, values))
    if workers == 1 or len(jobs) == 1:
        return [_worker(j) for j in jobs]
    chunk = max(1, math.ceil(len(jobs) / (4 * workers)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_worker, jobs, chunksize=chunk))
