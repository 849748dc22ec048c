"""Closed-form reference models.

* the J=1 <-> J=0 atom in a magnetic field, linearly polarized light at
  ``theta_BE`` to the field (excited population and resonance width);
* a Lambda system with one driven arm and incoherent exchange ``R`` between
  the light and dark ground states;
* the quantum-jump estimate of the photon rate for that Lambda system;
* the rate-equation Lambda system with both arms pumped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ModelDomainError",
    "LambdaParams",
    "j10_width",
    "j10_population",
    "lambda_incoherent_population",
    "lambda_photon_rate",
    "lambda_rate_population",
]


class ModelDomainError(ValueError):
    """Formula evaluated outside its domain of validity."""


def _angle_factor(theta_be: float) -> tuple[float, float]:
    c2 = math.cos(theta_be) ** 2
    return c2, c2 / (1.0 + 3.0 * c2)


def j10_width(omega: float, theta_be: float, delta_b: float, gamma: float = 1.0) -> float:
    """Full width ``gamma'`` of the J=1<->0 resonance in a magnetic field."""
    if delta_b <= 0:
        raise ModelDomainError("delta_B must be positive (dark state is stable at 0)")
    if gamma <= 0:
        raise ModelDomainError("gamma must be positive")
    c2, f = _angle_factor(theta_be)
    half_sq = (gamma / 2) ** 2 \
        + omega ** 2 * c2 * (1 - 3 * c2) / (1 + 3 * c2) \
        + f * (omega ** 4 / (16 * delta_b ** 2) + 16 * delta_b ** 2)
    return 2.0 * math.sqrt(half_sq)


def j10_population(omega: float, theta_be: float, delta_b: float, delta: float = 0.0,
                   gamma: float = 1.0) -> float:
    """Excited-state population of the J=1<->0 atom; Lorentzian in ``delta``."""
    width = j10_width(omega, theta_be, delta_b, gamma)
    c2 = math.cos(theta_be) ** 2
    s2 = math.sin(theta_be) ** 2
    amp = 0.75 * omega ** 2 * c2 * s2 / (1 + 3 * c2)
    return amp / ((width / 2) ** 2 + delta ** 2)


@dataclass(frozen=True)
class LambdaParams:
    omega_if: float
    delta_if: float = 0.0
    alpha: float = 0.1
    gamma: float = 1.0
    r_pump: float = 0.0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ModelDomainError("alpha must lie in (0, 1)")
        if self.gamma <= 0 or self.r_pump < 0 or self.omega_if < 0:
            raise ModelDomainError("rates must be non-negative and gamma positive")


def lambda_incoherent_population(p: LambdaParams) -> float:
    """Excited population when the dark ground state is exchanged with the
    light one at the incoherent rate ``R`` (both directions)."""
    if p.r_pump <= 0:
        raise ModelDomainError("r_pump must be positive")
    om2 = p.omega_if ** 2
    den = (p.gamma ** 2 / 4 + 3 * om2 / 8
           + p.alpha * p.gamma * om2 / (8 * p.r_pump) + p.delta_if ** 2)
    return (om2 / 8) / den


def lambda_photon_rate(p: LambdaParams, form: str = "exact") -> float:
    """Mean fluorescence photons per unit time from the bright/dark cycle.

    A bright period of ``(1-alpha)/alpha`` photons lasting ``dt`` alternates
    with a dark period ``1/R``.  ``form='small-alpha'`` drops ``(1-alpha)``
    against 1.
    """
    if p.r_pump <= 0:
        raise ModelDomainError("r_pump must be positive")
    if p.omega_if <= 0:
        return 0.0
    a = p.alpha
    lorentz = (p.gamma ** 2 / 4 + p.delta_if ** 2) / (0.5 * p.omega_if ** 2 * p.gamma)
    if form == "exact":
        dt = (1 - a) / a * lorentz
        return (1 - a) / a / (1 / p.r_pump + dt)
    if form == "small-alpha":
        return (1 / a) / (1 / p.r_pump + lorentz / a)
    raise ValueError(f"unknown form {form!r}")


def lambda_rate_population(r_if: float, r_df: float, alpha: float,
                           gamma: float = 1.0) -> float:
    """Rate-equation excited population with both Lambda arms pumped."""
    if r_if <= 0 or r_df <= 0:
        raise ModelDomainError("excitation rates must be positive")
    if not 0 < alpha < 1:
        raise ModelDomainError("alpha must lie in (0, 1)")
    return 1.0 / (3 + (1 - alpha) * gamma / r_if + alpha * gamma / r_df)
