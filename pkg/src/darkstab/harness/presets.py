"""Named atomic systems with default lasers.

Parameters are flat dictionaries in config units: frequencies in units of
the excited-state decay rate, angles in degrees.  Modulation phases (``phi``)
are in radians.  Every field built here has unit rms norm, so a drive's
``omega`` is its rms Rabi frequency.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..amcore import MAGIC_ANGLE, AngularMomentumError, linear_polarization_at_angle
from ..fields import (AomBichromatic, EomWaveplate, FieldModelError, PemPhaseMod,
                      StaticField, ZeemanSpec, field_components, lande_g)
from ..obe import Decay, DriveSpec, Level, LevelScheme, Liouvillian, build_liouvillian
from .config import ConfigError, parse_number

__all__ = [
    "Setup",
    "PRESET_NAMES",
    "SPD_ALPHA",
    "preset_defaults",
    "resolve_param",
    "build_setup",
    "describe_presets",
]

PRESET_NAMES = ("J10", "TwoLevelGeneric", "SPD_Sr", "SPD_Ca", "SPD_Ba", "Ladder")
#: Fraction of P decays ending in D.
SPD_ALPHA = {"SPD_Sr": 1 / 14, "SPD_Ca": 1 / 13, "SPD_Ba": 1 / 3.7}

MAGIC_DEG = math.degrees(MAGIC_ANGLE)
_NORM_SAMPLES = 1024
_LADDER_RE = re.compile(r"^Ladder\(\s*([0-9/.]+)\s*,\s*([0-9/.]+)\s*\)$")

# parameters that are not plain numbers
_TEXT_PARAMS = {"modulation"}
_OPTIONAL_PARAMS = {"delta_mod_minus", "g_P", "alpha"}


@dataclass(frozen=True)
class Setup:
    """A fully specified problem: scheme, lasers, magnetic field."""

    name: str
    params: dict
    scheme: LevelScheme
    drives: tuple[DriveSpec, ...]
    zeeman: ZeemanSpec
    observed: str
    main_drive: str

    @property
    def modulated(self) -> bool:
        return any(getattr(d.field, "modulated", False) for d in self.drives)

    def liouvillian(self) -> Liouvillian:
        return build_liouvillian(self.scheme, self.drives, self.zeeman)

    def with_detuning(self, detuning: float, drive: str | None = None) -> "Setup":
        drive = drive or self.main_drive
        drives = tuple(DriveSpec(d.lower, d.upper, detuning, d.field, d.omega,
                                 d.linewidth, d.label) if d.name == drive else d
                       for d in self.drives)
        if drives == self.drives and not any(d.name == drive for d in drives):
            raise ConfigError(f"no drive named {drive!r}")
        return Setup(self.name, self.params, self.scheme, drives, self.zeeman,
                     self.observed, self.main_drive)


def _common_defaults() -> dict:
    return {"modulation": "static", "phi": math.pi, "delta_mod": 0.1,
            "delta_mod_minus": None, "e_sigma_plus": 1.0, "e_sigma_minus": 1.0}


def preset_defaults(name: str) -> dict:
    """Default parameter dictionary of a preset (``Ladder(ji,jf)`` allowed)."""
    base, ladder = _split_name(name)
    if base == "J10":
        d = {"omega": math.sqrt(3) / 5, "detuning": 0.0, "linewidth": 0.0,
             "delta_B": math.sqrt(3) / 20, "theta_BE": MAGIC_DEG,
             "e_pi": 1.0, "e_pem": 1.0, "static_angle": 0.0, "g_S": 2.0}
        d.update(_common_defaults())
        return d
    if base == "TwoLevelGeneric":
        return {"omega": 0.5, "detuning": 0.0, "linewidth": 0.0}
    if base in SPD_ALPHA:
        d = {"alpha": SPD_ALPHA[base],
             "omega_SP": math.sqrt(2) / 5, "omega_DP": math.sqrt(2) / 5,
             "detuning_SP": 0.0, "detuning_DP": 0.5,
             "linewidth_SP": 0.0, "linewidth_DP": 0.0,
             "theta_BE": 90.0, "delta_B": 0.0,
             "g_S": 2.0, "g_P": 2 / 3, "g_D": 0.8}
        d.update(_common_defaults())
        return d
    if base == "Ladder":
        ji, jf = ladder if ladder else (2.0, 1.0)
        return {"ji": ji, "jf": jf, "omega": math.sqrt(3) / 5, "detuning": 0.0,
                "linewidth": 0.0, "delta_B": 0.01, "theta_BE": MAGIC_DEG,
                "g_S": 2.0, "g_P": None}
    raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")


def _split_name(name: str):
    m = _LADDER_RE.match(name.strip())
    if m:
        try:
            ji, jf = Fraction(m.group(1)), Fraction(m.group(2))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad Ladder arguments in {name!r}") from None
        tji, tjf = 2 * ji, 2 * jf
        if (tji.denominator != 1 or tjf.denominator != 1 or ji < 0 or jf < 0
                or abs(ji - jf) > 1 or (tji - tjf) % 2 or ji == jf == 0):
            raise ConfigError(f"{name!r} is not a dipole-allowed J pair")
        return "Ladder", (float(ji), float(jf))
    return name.strip(), None


def resolve_param(preset: str, key: str) -> str:
    """Map axis/override names onto preset parameter names.

    ``omega.DP`` -> ``omega_DP``; bare ``omega``/``detuning``/``linewidth``
    on a two-laser preset refer to the cooling laser.
    """
    defaults = preset_defaults(preset)
    k = key.replace(".", "_")
    if k in defaults:
        return k
    if f"{k}_SP" in defaults:
        return f"{k}_SP"
    raise ConfigError(f"preset {preset!r} has no parameter {key!r}")


def _merge(preset: str, overrides: dict | None) -> dict:
    params = preset_defaults(preset)
    for key, value in (overrides or {}).items():
        k = resolve_param(preset, key)
        if k in _TEXT_PARAMS:
            if not isinstance(value, str):
                raise ConfigError(f"{key}: expected a string")
            params[k] = value
        elif value is None and k in _OPTIONAL_PARAMS:
            params[k] = None
        else:
            params[k] = parse_number(value, key)
    return params


def _unit_rms(make, amps: dict):
    """Rescale the named amplitudes so the period-averaged |E|^2 is 1."""
    model = make(**amps)
    T = model.period
    if T is None:
        sq = float(np.sum(np.abs(model.components(0.0)) ** 2))
    else:
        t = np.arange(_NORM_SAMPLES) * (T / _NORM_SAMPLES)
        sq = float(np.mean(np.sum(np.abs(field_components(model, t)) ** 2, axis=-1)))
    if sq <= 0:
        raise ConfigError("field amplitudes are all zero")
    s = 1.0 / math.sqrt(sq)
    return make(**{k: v * s for k, v in amps.items()})


def _shifts(p):
    plus = p["delta_mod"]
    minus = -plus if p["delta_mod_minus"] is None else p["delta_mod_minus"]
    return plus, minus


def _j10_field(p):
    theta = math.radians(p["theta_BE"])
    mode = p["modulation"]
    if mode == "static":
        return StaticField(linear_polarization_at_angle(theta))
    if mode == "aom":
        plus, minus = _shifts(p)
        return _unit_rms(lambda e_sigma_plus, e_sigma_minus, e_pi: AomBichromatic(
            e_sigma_plus, e_sigma_minus, e_pi, plus, minus),
            {"e_sigma_plus": p["e_sigma_plus"], "e_sigma_minus": p["e_sigma_minus"],
             "e_pi": p["e_pi"]})
    if mode == "pem":
        return _unit_rms(lambda e_pem, e_pi: PemPhaseMod(
            e_pem, e_pi, p["phi"], p["delta_mod"], math.radians(p["static_angle"])),
            {"e_pem": p["e_pem"], "e_pi": p["e_pi"]})
    raise ConfigError(f"J10 modulation must be static, aom or pem, not {mode!r}")


def _repump_field(p):
    mode = p["modulation"]
    if mode == "static":
        return StaticField(linear_polarization_at_angle(math.radians(p["theta_BE"])))
    if mode == "aom":
        plus, minus = _shifts(p)
        return _unit_rms(lambda e_sigma_plus, e_sigma_minus: AomBichromatic(
            e_sigma_plus, e_sigma_minus, 0.0, plus, minus),
            {"e_sigma_plus": p["e_sigma_plus"], "e_sigma_minus": p["e_sigma_minus"]})
    if mode == "eom":
        return _unit_rms(lambda e_eom: EomWaveplate(e_eom, p["phi"], p["delta_mod"]),
                         {"e_eom": 1.0})
    raise ConfigError(f"SPD modulation must be static, eom or aom, not {mode!r}")


def _check_rates(p, keys):
    for k in keys:
        if p[k] < 0:
            raise ConfigError(f"{k} must be non-negative")


def build_setup(preset: str, overrides: dict | None = None) -> Setup:
    """Construct scheme, drives and field for a preset with overrides."""
    base, _ = _split_name(preset)
    p = _merge(preset, overrides)
    try:
        return _build(base, preset, p)
    except (FieldModelError, AngularMomentumError) as exc:
        raise ConfigError(str(exc)) from None


def _build(base, preset, p) -> Setup:
    if base == "J10":
        _check_rates(p, ("omega", "linewidth", "delta_B"))
        scheme = LevelScheme((Level("S", 1, p["g_S"]), Level("P", 0, 0.0)),
                             (Decay("P", "S", 1.0),))
        drive = DriveSpec("S", "P", p["detuning"], _j10_field(p), p["omega"], p["linewidth"])
        return Setup(preset, p, scheme, (drive,), ZeemanSpec(p["delta_B"]), "P", "SP")

    if base == "TwoLevelGeneric":
        _check_rates(p, ("omega", "linewidth"))
        scheme = LevelScheme((Level("g", 0), Level("e", 0)), (Decay("e", "g", 1.0),))
        field = StaticField(linear_polarization_at_angle(0.0))
        drive = DriveSpec("g", "e", p["detuning"], field, p["omega"], p["linewidth"])
        return Setup(preset, p, scheme, (drive,), ZeemanSpec(), "e", "ge")

    if base in SPD_ALPHA:
        _check_rates(p, ("omega_SP", "omega_DP", "linewidth_SP", "linewidth_DP", "delta_B"))
        a = p["alpha"]
        if not 0 < a < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        scheme = LevelScheme(
            (Level("S", 0.5, p["g_S"]), Level("P", 0.5, p["g_P"]), Level("D", 1.5, p["g_D"])),
            (Decay("P", "S", 1 - a), Decay("P", "D", a)))
        cool = StaticField(linear_polarization_at_angle(math.radians(p["theta_BE"])))
        drives = (
            DriveSpec("S", "P", p["detuning_SP"], cool, p["omega_SP"], p["linewidth_SP"]),
            DriveSpec("D", "P", p["detuning_DP"], _repump_field(p), p["omega_DP"],
                      p["linewidth_DP"]),
        )
        return Setup(preset, p, scheme, drives, ZeemanSpec(p["delta_B"]), "P", "SP")

    if base == "Ladder":
        _check_rates(p, ("omega", "linewidth", "delta_B"))
        ji, jf = p["ji"], p["jf"]
        g_p = p["g_P"] if p["g_P"] is not None else lande_g(1, ji, jf)
        scheme = LevelScheme((Level("S", ji, p["g_S"]), Level("P", jf, g_p)),
                             (Decay("P", "S", 1.0),))
        field = StaticField(linear_polarization_at_angle(math.radians(p["theta_BE"])))
        drive = DriveSpec("S", "P", p["detuning"], field, p["omega"], p["linewidth"])
        name = f"Ladder({_fmt_j(ji)},{_fmt_j(jf)})"
        return Setup(name, p, scheme, (drive,), ZeemanSpec(p["delta_B"]), "P", "SP")

    raise ConfigError(f"unknown preset {preset!r}")


def _fmt_j(j: float) -> str:
    f = Fraction(j).limit_denominator(2)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def describe_presets() -> list[dict]:
    """Name, levels and default parameters of every preset."""
    out = []
    for name in PRESET_NAMES:
        s = build_setup(name)
        out.append({
            "name": name if name != "Ladder" else "Ladder(ji,jf)",
            "levels": [{"label": l.label, "J": l.j, "g": l.g} for l in s.scheme.levels],
            "states": s.scheme.dim,
            "drives": [d.name for d in s.drives],
            "defaults": s.params,
        })
    return out
