"""Command-line entry point.

Exit status: 0 success, 1 config error, 2 solver non-convergence in any
row, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .. import __version__
from ..amcore import AngularMomentumError, SphericalField, spherical_components
from ..darkstates import DarkStateError, dark_space
from ..models import (LambdaParams, ModelDomainError, j10_population, j10_width,
                      lambda_incoherent_population, lambda_photon_rate,
                      lambda_rate_population)
from .config import ConfigError, parse_kv_list, parse_number
from .presets import describe_presets

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

__all__ = ["main", "build_parser", "MODELS"]


def _lambda(fn):
    def run(p):
        keys = {"omega_if", "delta_if", "alpha", "gamma", "r_pump"}
        _require(p, {"omega_if", "r_pump"}, keys)
        return fn(LambdaParams(**p))
    return run


def _require(p, need, allowed):
    missing = need - set(p)
    if missing:
        raise ConfigError(f"missing parameters: {', '.join(sorted(missing))}")
    extra = set(p) - allowed
    if extra:
        raise ConfigError(f"unknown parameters: {', '.join(sorted(extra))}")


def _j10(fn, with_delta):
    def run(p):
        allowed = {"omega", "theta_BE", "delta_B", "gamma"} | ({"delta"} if with_delta else set())
        _require(p, {"omega", "theta_BE", "delta_B"}, allowed)
        q = dict(p)
        q["theta_be"] = math.radians(q.pop("theta_BE"))
        q["delta_b"] = q.pop("delta_B")
        return fn(**q)
    return run


def _rate(p):
    _require(p, {"r_if", "r_df", "alpha"}, {"r_if", "r_df", "alpha", "gamma"})
    return lambda_rate_population(**p)


def _photon_rate(p):
    form = p.pop("form", "exact")
    return _lambda(lambda lp: lambda_photon_rate(lp, form=form))(p)


#: name -> callable(params); angles in degrees.
MODELS = {
    "j10_population": _j10(j10_population, True),
    "j10_width": _j10(j10_width, False),
    "lambda_incoherent_population": _lambda(lambda_incoherent_population),
    "lambda_photon_rate": _photon_rate,
    "lambda_rate_population": _rate,
}


def _complex(text: str, name: str) -> complex:
    t = text.strip().replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        return complex(parse_number(text, name))


def cmd_darkspace(args) -> int:
    parts = args.field.split(",")
    if len(parts) != 3:
        raise ConfigError("--field needs three comma-separated Cartesian components")
    ex, ey, ez = (_complex(v, n) for v, n in zip(parts, "xyz"))
    ji, jf = parse_number(args.ji, "ji"), parse_number(args.jf, "jf")
    space = dark_space(ji, jf, spherical_components(ex, ey, ez))
    field: SphericalField = spherical_components(ex, ey, ez)
    doc = {
        "ji": ji, "jf": jf,
        "field_spherical": [[c.real, c.imag] for c in field.as_array()],
        "dim": space.dim,
        "basis": [[[c.real, c.imag] for c in row] for row in space.basis],
        "m_order": "ascending from -ji",
    }
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_model(args) -> int:
    if args.name not in MODELS:
        raise ConfigError(f"unknown model {args.name!r}; choose from {', '.join(MODELS)}")
    raw = parse_kv_list(args.params or "")
    params = {}
    for k, v in raw.items():
        params[k] = v if k == "form" else parse_number(v, k)
    try:
        value = MODELS[args.name](params)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    print(json.dumps({"model": args.name, "params": params, "value": value}))
    return EXIT_OK


def cmd_presets(args) -> int:
    for p in describe_presets():
        print(json.dumps(p, default=float))
    return EXIT_OK


def cmd_scan(args) -> int:
    from .output import write_csv, write_sidecar
    from .scan import ScanSpec, run_scan

    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    spec = ScanSpec.from_dict(doc)
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    records = run_scan(spec, workers=args.workers)
    failed = [r for r in records if r.meta.get("error_kind") == "solver"]
    config_bad = [r for r in records if r.meta.get("error_kind") == "config"]
    try:
        write_csv(args.out, spec, records)
        write_sidecar(args.out, spec, __version__,
                      {"rows": len(records), "failed_rows": len(failed)})
        if args.plot:
            from .plotting import plot_scan
            plot_scan(spec, records, args.plot)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if config_bad:
        print(f"error: {len(config_bad)} point(s) have invalid parameters, "
              f"first: {config_bad[0].error}", file=sys.stderr)
        return EXIT_CONFIG
    if failed:
        print(f"error: {len(failed)} point(s) did not converge", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="darkstab",
                                 description="Dark-state destabilization calculations.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scan", help="run a parameter scan from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="CSV output path")
    s.add_argument("--plot", help="optional image path")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_scan)

    d = sub.add_parser("darkspace", help="dark states of a transition in a field")
    d.add_argument("--ji", required=True)
    d.add_argument("--jf", required=True)
    d.add_argument("--field", required=True, help="Cartesian Ex,Ey,Ez (complex allowed)")
    d.set_defaults(func=cmd_darkspace)

    m = sub.add_parser("model", help="evaluate a closed-form model")
    m.add_argument("name", help=", ".join(MODELS))
    m.add_argument("--params", default="", help="k=v,... (theta_BE in degrees)")
    m.set_defaults(func=cmd_model)

    p = sub.add_parser("presets", help="list presets")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_presets)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ModelDomainError, AngularMomentumError, DarkStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
