"""Angular-momentum arithmetic for electric-dipole couplings.

Half-integer quantum numbers are handled internally as doubled integers
(``2j``, ``2m``) so equality tests and caching are exact.  Public functions
accept ints, floats or :class:`fractions.Fraction` values that are integer
multiples of 1/2.

Phase conventions
-----------------
The Rabi matrix follows the Wigner-Eckart form

    Omega[m_i, m_f] = N * (-1)**(J_i - m_i)
                      * sum_q (-1)**q * E_{-q} * 3j(J_i 1 J_f; -m_i q m_f)

so the component ``E_{+1}`` couples ``m_i`` to ``m_f = m_i + 1`` (that is,
``m_i - m_f = -1``) and ``E_{-1}`` couples ``m_i`` to ``m_f = m_i - 1``.
The Hamiltonian built on top of it uses ``<f|H|i> = -Omega[i, f] / 2`` so
that a lower-level superposition ``c`` is dark exactly when
``Omega.T @ c == 0`` (no complex conjugation of the field).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "AngularMomentumError",
    "SphericalField",
    "RabiMatrix",
    "twice",
    "m_values",
    "wigner3j",
    "spherical_components",
    "linear_polarization_at_angle",
    "dipole_tensor",
    "rabi_matrix",
    "rms_rabi",
    "MAGIC_ANGLE",
]

#: Polarization angle at which the three J=1<->0 Rabi frequencies are equal.
MAGIC_ANGLE = math.acos(1.0 / math.sqrt(3.0))


class AngularMomentumError(ValueError):
    """Invalid angular-momentum quantum numbers or selection rules."""


def twice(x) -> int:
    """Return ``2*x`` as an int, raising if ``x`` is not a multiple of 1/2."""
    if isinstance(x, (int, np.integer)):
        return 2 * int(x)
    if isinstance(x, Fraction):
        d = 2 * x
        if d.denominator != 1:
            raise AngularMomentumError(f"{x} is not a half-integer")
        return int(d)
    d = 2.0 * float(x)
    r = round(d)
    if abs(d - r) > 1e-9:
        raise AngularMomentumError(f"{x} is not a half-integer")
    return int(r)


def m_values(j) -> np.ndarray:
    """Magnetic quantum numbers ``-j, ..., +j`` as floats."""
    tj = twice(j)
    if tj < 0:
        raise AngularMomentumError(f"negative angular momentum {j}")
    return np.array([tm / 2 for tm in range(-tj, tj + 1, 2)])


# -- 3-j symbols -------------------------------------------------------------

def _fact(n: int) -> int:
    return math.factorial(n)


@lru_cache(maxsize=200_000)
def _wigner3j_squared_signed(tj1, tj2, tj3, tm1, tm2, tm3) -> tuple[int, Fraction]:
    """Sign and exact square of a 3-j symbol (all arguments doubled)."""
    if tm1 + tm2 + tm3 != 0:
        return 0, Fraction(0)
    if tj3 < abs(tj1 - tj2) or tj3 > tj1 + tj2:
        return 0, Fraction(0)
    if (tj1 + tj2 + tj3) % 2:
        return 0, Fraction(0)
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        if abs(tm) > tj:
            return 0, Fraction(0)

    # everything below is an integer once un-doubled
    a = (tj1 + tj2 - tj3) // 2
    b = (tj1 - tj2 + tj3) // 2
    c = (-tj1 + tj2 + tj3) // 2
    big = (tj1 + tj2 + tj3) // 2 + 1
    j1pm, j1mm = (tj1 + tm1) // 2, (tj1 - tm1) // 2
    j2pm, j2mm = (tj2 + tm2) // 2, (tj2 - tm2) // 2
    j3pm, j3mm = (tj3 + tm3) // 2, (tj3 - tm3) // 2

    pref2 = Fraction(
        _fact(a) * _fact(b) * _fact(c)
        * _fact(j1pm) * _fact(j1mm) * _fact(j2pm) * _fact(j2mm)
        * _fact(j3pm) * _fact(j3mm),
        _fact(big),
    )

    # Racah sum over k with all factorial arguments non-negative
    t1 = (tj3 - tj2 + tm1) // 2  # j3 - j2 + m1
    t2 = (tj3 - tj1 - tm2) // 2  # j3 - j1 - m2
    kmin = max(0, -t1, -t2)
    kmax = min(a, j1mm, j2pm)
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (_fact(k) * _fact(a - k) * _fact(j1mm - k) * _fact(j2pm - k)
               * _fact(t1 + k) * _fact(t2 + k))
        total += Fraction(-1 if k % 2 else 1, den)
    if total == 0:
        return 0, Fraction(0)

    phase_exp = (tj1 - tj2 - tm3) // 2
    sign = -1 if phase_exp % 2 else 1
    if total < 0:
        sign = -sign
    return sign, total * total * pref2


def _check_pair(tj: int, tm: int) -> None:
    if tj < 0:
        raise AngularMomentumError(f"negative angular momentum j={tj / 2}")
    if (tj - tm) % 2:
        raise AngularMomentumError(
            f"j={tj / 2} and m={tm / 2} differ by a non-integer")


def wigner3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3-j symbol ``(j1 j2 j3; m1 m2 m3)``.

    Evaluated with exact rational arithmetic and converted to float once at
    the end.  Returns 0.0 whenever a triangle, projection or ``m1+m2+m3 = 0``
    condition fails.
    """
    args = tuple(twice(x) for x in (j1, j2, j3, m1, m2, m3))
    for tj, tm in zip(args[:3], args[3:]):
        _check_pair(tj, tm)
    return wigner3j_doubled(*args)


def wigner3j_doubled(tj1, tj2, tj3, tm1, tm2, tm3) -> float:
    """3-j symbol from doubled-integer arguments (no validation)."""
    sign, sq = _wigner3j_squared_signed(tj1, tj2, tj3, tm1, tm2, tm3)
    if sign == 0:
        return 0.0
    return sign * math.sqrt(sq)


# -- fields ------------------------------------------------------------------

@dataclass(frozen=True)
class SphericalField:
    """Irreducible spherical components ``(E_{-1}, E_0, E_{+1})``.

    ``e_minus`` is E_{-1}, ``e_zero`` is E_0 and ``e_plus`` is E_{+1}.
    """

    e_minus: complex = 0.0
    e_zero: complex = 0.0
    e_plus: complex = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.e_minus, self.e_zero, self.e_plus], dtype=complex)

    def component(self, q: int) -> complex:
        return (self.e_minus, self.e_zero, self.e_plus)[q + 1]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def scaled(self, factor: complex) -> "SphericalField":
        return SphericalField(self.e_minus * factor, self.e_zero * factor,
                              self.e_plus * factor)

    @classmethod
    def from_array(cls, arr) -> "SphericalField":
        a = np.asarray(arr, dtype=complex)
        return cls(complex(a[0]), complex(a[1]), complex(a[2]))


def spherical_components(ex: complex, ey: complex, ez: complex) -> SphericalField:
    """Convert Cartesian amplitudes to spherical components.

    ``E_{+1} = -(Ex + i Ey)/sqrt(2)``, ``E_{-1} = (Ex - i Ey)/sqrt(2)``,
    ``E_0 = Ez``.
    """
    s = 1.0 / math.sqrt(2.0)
    return SphericalField(
        e_minus=s * (ex - 1j * ey),
        e_zero=complex(ez),
        e_plus=-s * (ex + 1j * ey),
    )


def linear_polarization_at_angle(theta_be: float, amplitude: float = 1.0) -> SphericalField:
    """Real linear polarization in the x-z plane at ``theta_be`` to z."""
    if amplitude < 0:
        raise ValueError("amplitude must be non-negative")
    return spherical_components(amplitude * math.sin(theta_be), 0.0,
                                amplitude * math.cos(theta_be))


# -- Rabi matrices -------------------------------------------------------------

@dataclass(frozen=True)
class RabiMatrix:
    j_lower: float
    j_upper: float
    omega: np.ndarray  # shape (2J_i+1, 2J_f+1), rows m_i ascending, cols m_f ascending

    @property
    def shape(self) -> tuple[int, int]:
        return self.omega.shape


def _check_e1(tji: int, tjf: int, allow_scalar: bool = False) -> None:
    if tji < 0 or tjf < 0:
        raise AngularMomentumError("negative angular momentum")
    if (tji - tjf) % 2:
        raise AngularMomentumError(
            f"J_i={tji / 2} and J_f={tjf / 2} differ by a non-integer")
    if abs(tji - tjf) > 2:
        raise AngularMomentumError(
            f"E1 selection rule violated: |J_i - J_f| > 1 for {tji / 2}<->{tjf / 2}")
    if tji == 0 and tjf == 0 and not allow_scalar:
        raise AngularMomentumError("J=0 <-> J=0 has no electric-dipole coupling")


@lru_cache(maxsize=256)
def _dipole_tensor_cached(tji: int, tjf: int) -> tuple[np.ndarray, ...]:
    ni, nf = tji + 1, tjf + 1
    out = []
    if tji == 0 and tjf == 0:
        # structureless two-level stand-in, coupled by the pi component only
        for q in (-1, 0, 1):
            d = np.zeros((1, 1))
            if q == 0:
                d[0, 0] = 1.0 / math.sqrt(3.0)
            out.append(d)
        return tuple(out)
    for q in (-1, 0, 1):
        d = np.zeros((ni, nf))
        for a, tmi in enumerate(range(-tji, tji + 1, 2)):
            tmf = tmi - 2 * q
            if abs(tmf) > tjf:
                continue
            b = (tmf + tjf) // 2
            phase = -1.0 if ((tji - tmi) // 2) % 2 else 1.0
            d[a, b] = phase * wigner3j_doubled(tji, 2, tjf, -tmi, 2 * q, tmf)
        out.append(d)
    for d in out:
        d.setflags(write=False)
    return tuple(out)


def dipole_tensor(j_lower, j_upper, allow_scalar: bool = False) -> tuple[np.ndarray, ...]:
    """Reduced dipole components ``D_q[m_i, m_f]`` for ``q = -1, 0, +1``.

    ``D_q[m_i, m_f] = (-1)**(J_i - m_i) * 3j(J_i 1 J_f; -m_i q m_f)``.  For
    every ``m_f``, ``(2J_f+1) * sum_{q, m_i} D_q**2 = 1``.
    """
    tji, tjf = twice(j_lower), twice(j_upper)
    _check_e1(tji, tjf, allow_scalar=allow_scalar)
    return _dipole_tensor_cached(tji, tjf)


def coupling_operators(j_lower, j_upper, allow_scalar: bool = False) -> tuple[np.ndarray, ...]:
    """Rabi matrices produced by unit ``E_{-1}``, ``E_0``, ``E_{+1}``.

    Scaled so that a unit-norm field gives unit rms Rabi frequency.
    """
    dq = dipole_tensor(j_lower, j_upper, allow_scalar=allow_scalar)
    # E_p enters with q = -p and phase (-1)**q
    ops = []
    for p in (-1, 0, 1):
        q = -p
        ops.append(math.sqrt(3.0) * (-1.0) ** q * dq[q + 1])
    return tuple(ops)


def rabi_matrix(j_lower, j_upper, field: SphericalField,
                reduced_coupling: float = 1.0) -> RabiMatrix:
    """Sublevel Rabi frequencies for a field on a ``J_i <-> J_f`` transition.

    The overall scale makes ``rms_rabi`` of the result equal to
    ``reduced_coupling * field.norm``.
    """
    ops = coupling_operators(j_lower, j_upper)
    comps = field.as_array()
    omega = reduced_coupling * sum(c * op for c, op in zip(comps, ops))
    return RabiMatrix(float(j_lower), float(j_upper), np.asarray(omega, dtype=complex))


def rms_rabi(m) -> float:
    """Root-sum-square of all sublevel Rabi frequencies."""
    omega = m.omega if isinstance(m, RabiMatrix) else np.asarray(m)
    return float(np.sqrt(np.sum(np.abs(omega) ** 2)))
