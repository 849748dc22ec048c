"""Time-dependent laser polarization models and Zeeman shifts.

Every model returns spherical components ``(E_{-1}, E_0, E_{+1})`` at time
``t``.  A factor ``exp(-i*delta*t)`` on a component shifts that component's
optical frequency up by ``delta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .amcore import SphericalField, linear_polarization_at_angle, m_values

__all__ = [
    "FieldModelError",
    "StaticField",
    "AomBichromatic",
    "PemPhaseMod",
    "EomWaveplate",
    "FieldModel",
    "ZeemanSpec",
    "evaluate_field",
    "field_components",
    "effective_evolution_rate",
    "sideband_spectrum",
    "lande_g",
    "zeeman_shifts",
    "SIDEBAND_SAMPLES",
]

#: Samples per period used by :func:`sideband_spectrum`.
SIDEBAND_SAMPLES = 4096


class FieldModelError(ValueError):
    pass


def _nonneg(name, value):
    if value < 0:
        raise FieldModelError(f"{name} must be non-negative, got {value}")


@dataclass(frozen=True)
class StaticField:
    field: SphericalField

    modulated = False

    @property
    def period(self):
        return None

    def components(self, t):
        base = self.field.as_array()
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return base.copy()
        return np.broadcast_to(base, t.shape + (3,)).copy()


@dataclass(frozen=True)
class AomBichromatic:
    """Circular components shifted separately by two AOMs, plus a pi beam.

    ``E_{-1} = e_sigma_plus * exp(-i*delta_minus*t)``,
    ``E_{+1} = e_sigma_minus * exp(-i*delta_plus*t)``, ``E_0 = e_pi``.
    With ``e_pi = 0`` this is the two-beam variant used on a repump.
    """

    e_sigma_plus: float
    e_sigma_minus: float
    e_pi: float = 0.0
    delta_plus: float = 0.1
    delta_minus: float = -0.1

    modulated = True

    def __post_init__(self):
        for name in ("e_sigma_plus", "e_sigma_minus", "e_pi"):
            _nonneg(name, getattr(self, name))
        if self.delta_plus == 0 and self.delta_minus == 0:
            raise FieldModelError("AOM model needs at least one non-zero shift")

    @property
    def period(self) -> float:
        shifts = [abs(d) for d in (self.delta_plus, self.delta_minus) if d != 0]
        if len(shifts) == 1:
            return 2 * math.pi / shifts[0]
        # fundamental frequency = gcd of the two shifts (rational approximation)
        a = Fraction(shifts[0]).limit_denominator(10**6)
        b = Fraction(shifts[1]).limit_denominator(10**6)
        num = math.gcd(a.numerator * b.denominator, b.numerator * a.denominator)
        g = Fraction(num, a.denominator * b.denominator)
        return 2 * math.pi / float(g)

    def components(self, t):
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape + (3,), dtype=complex)
        out[..., 0] = self.e_sigma_plus * np.exp(-1j * self.delta_minus * t)
        out[..., 1] = self.e_pi
        out[..., 2] = self.e_sigma_minus * np.exp(-1j * self.delta_plus * t)
        return out


def _retardation(phi_amp, rate, t):
    return 0.5 * phi_amp * (1.0 - np.cos(rate * t))


@dataclass(frozen=True)
class PemPhaseMod:
    """PEM-modulated beam along z overlapped with an unmodulated linear beam.

    The unmodulated beam has amplitude ``e_pi`` and is linearly polarized at
    ``static_angle`` (radians) to z; ``static_angle = 0`` is the orthogonal
    geometry where it is pure pi light.
    """

    e_pem: float
    e_pi: float
    phi: float
    delta_pem: float
    static_angle: float = 0.0

    modulated = True

    def __post_init__(self):
        _nonneg("e_pem", self.e_pem)
        _nonneg("e_pi", self.e_pi)
        _nonneg("phi", self.phi)
        if self.delta_pem <= 0:
            raise FieldModelError("delta_pem must be positive")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.delta_pem

    def components(self, t):
        t = np.asarray(t, dtype=float)
        ph = _retardation(self.phi, self.delta_pem, t)
        a, b = np.exp(1j * ph), 1j * np.exp(-1j * ph)
        s = self.e_pem / math.sqrt(2.0)
        static = linear_polarization_at_angle(self.static_angle, self.e_pi).as_array()
        out = np.empty(t.shape + (3,), dtype=complex)
        out[..., 0] = s * (a + b) + static[0]
        out[..., 1] = static[1]
        out[..., 2] = s * (a - b) + static[2]
        return out


@dataclass(frozen=True)
class EomWaveplate:
    """Single beam through an EOM acting as a variable waveplate."""

    e_eom: float
    phi: float
    delta_eom: float

    modulated = True

    def __post_init__(self):
        _nonneg("e_eom", self.e_eom)
        _nonneg("phi", self.phi)
        if self.delta_eom <= 0:
            raise FieldModelError("delta_eom must be positive")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.delta_eom

    def components(self, t):
        t = np.asarray(t, dtype=float)
        b = 1j * np.exp(-1j * _retardation(self.phi, self.delta_eom, t))
        s = self.e_eom / math.sqrt(2.0)
        out = np.zeros(t.shape + (3,), dtype=complex)
        out[..., 0] = s * (1 + b)
        out[..., 2] = s * (1 - b)
        return out


FieldModel = Union[StaticField, AomBichromatic, PemPhaseMod, EomWaveplate]


def field_components(model: FieldModel, t) -> np.ndarray:
    """Spherical components at ``t`` (scalar or array) as complex ndarray."""
    if isinstance(model, SphericalField):
        model = StaticField(model)
    return model.components(t)


def evaluate_field(model: FieldModel, t: float) -> SphericalField:
    if t < 0:
        raise FieldModelError("t must be non-negative")
    return SphericalField.from_array(field_components(model, float(t)))


def effective_evolution_rate(model: FieldModel) -> float:
    """Rate at which the instantaneous dark state is driven around.

    AOM: the shift magnitude.  PEM/EOM: ``phi * rate`` above the high-index
    threshold ``phi > pi``, otherwise the modulation rate itself.
    """
    if isinstance(model, AomBichromatic):
        return max(abs(model.delta_plus), abs(model.delta_minus))
    if isinstance(model, PemPhaseMod):
        rate = model.delta_pem
    elif isinstance(model, EomWaveplate):
        rate = model.delta_eom
    else:
        raise FieldModelError("static field has no dark-state evolution rate")
    return model.phi * rate if model.phi > math.pi else rate


def sideband_spectrum(model: FieldModel, n_max: int, period: float | None = None,
                      samples: int = SIDEBAND_SAMPLES) -> dict[int, list[tuple[int, complex]]]:
    """Fourier coefficients of each spherical component over one period.

    Uses ``E_q(t) = sum_n c_n exp(-i n w t)`` with ``w = 2 pi / T`` so that
    positive ``n`` is a blue sideband.  Returns ``{q: [(n, c_n), ...]}`` for
    ``q`` in (-1, 0, 1) and ``n`` in ``-n_max..n_max``.  ``period`` lifts a
    static model onto an arbitrary period.
    """
    if n_max < 1:
        raise FieldModelError("n_max must be >= 1")
    T = period if period is not None else getattr(model, "period", None)
    if T is None:
        raise FieldModelError("static field needs an explicit period")
    t = np.arange(samples) * (T / samples)
    comps = field_components(model, t)  # (samples, 3)
    # trapezoid on a periodic grid == rectangle rule == DFT
    coeffs = np.fft.fft(comps, axis=0) / samples  # index k <-> exp(-2 pi i k s / N)
    # c_n multiplies exp(-i n w t), so c_n = (1/N) sum E exp(+i n w t) = ifft index n
    out = {}
    for col, q in enumerate((-1, 0, 1)):
        series = []
        for n in range(-n_max, n_max + 1):
            series.append((n, complex(coeffs[(-n) % samples, col])))
        out[q] = series
    return out


@dataclass(frozen=True)
class ZeemanSpec:
    """Magnetic field along z, expressed as the shift frequency ``mu_B B``."""

    delta_B: float = 0.0
    g_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.delta_B < 0:
            raise FieldModelError("delta_B must be non-negative")


def lande_g(L: float, S: float, J: float, g_s: float = 2.0) -> float:
    """Landé g_J for LS coupling (g_L = 1)."""
    if J == 0:
        return 0.0
    jj, ss, ll = J * (J + 1), S * (S + 1), L * (L + 1)
    return ((jj - ss + ll) + g_s * (jj + ss - ll)) / (2 * jj)


def zeeman_shifts(scheme, delta_B: float, g_overrides: dict | None = None) -> np.ndarray:
    """Sublevel shifts ``g_level * m * delta_B`` in scheme basis order."""
    if delta_B < 0:
        raise FieldModelError("delta_B must be non-negative")
    g_overrides = g_overrides or {}
    parts = []
    for lvl in scheme.levels:
        g = g_overrides.get(lvl.label, lvl.g)
        parts.append(g * m_values(lvl.j) * delta_B)
    return np.concatenate(parts)
