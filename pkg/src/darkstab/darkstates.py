"""Dark states of a Zeeman-degenerate transition.

A lower-level superposition ``|d> = sum_m c_m |J_i, m>`` is dark when no
excited sublevel is coupled to it, i.e. ``Omega.T @ c = 0`` for the Rabi
matrix of :func:`darkstab.amcore.rabi_matrix`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .amcore import SphericalField, rabi_matrix, twice
from .fields import FieldModel, field_components

__all__ = [
    "DarkStateError",
    "DarkSpace",
    "NULL_TOL",
    "COMPONENT_TOL",
    "dark_space",
    "dark_state_count",
    "dark_trajectory",
    "POLARIZATION_CLASSES",
]

#: Singular values below this fraction of the largest count as zero.
NULL_TOL = 1e-10
#: Field components smaller than this fraction of the largest are zeroed.
COMPONENT_TOL = 1e-12

POLARIZATION_CLASSES = ("linear-pi", "generic", "pure-circular")


class DarkStateError(ValueError):
    pass


@dataclass(frozen=True)
class DarkSpace:
    j_lower: float
    basis: np.ndarray  # (k, 2J_i+1); rows are orthonormal coefficient vectors
    t: float | None = None

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def projector(self) -> np.ndarray:
        b = self.basis
        return b.T @ b.conj()

    def contains(self, vec, rtol: float = 1e-10) -> bool:
        """True if ``vec`` lies in the span to relative tolerance ``rtol``."""
        v = np.asarray(vec, dtype=complex)
        nv = np.linalg.norm(v)
        if nv == 0:
            return True
        resid = v - self.projector() @ v
        return bool(np.linalg.norm(resid) <= rtol * nv)


def _clean(field: SphericalField) -> SphericalField:
    arr = field.as_array()
    big = np.max(np.abs(arr))
    if big == 0:
        raise DarkStateError("zero field: every lower state is trivially dark")
    arr = np.where(np.abs(arr) < COMPONENT_TOL * big, 0.0, arr)
    return SphericalField.from_array(arr)


def _null_basis(omega: np.ndarray) -> np.ndarray:
    # left nullspace: c with omega.T @ c = 0
    a = omega.T
    _, s, vh = np.linalg.svd(a)
    ni = a.shape[1]
    rank = int(np.sum(s > NULL_TOL * s[0])) if s.size else 0
    # rows of vh beyond rank span null(a)
    return vh[rank:ni].conj()


def dark_space(j_lower, j_upper, field: SphericalField) -> DarkSpace:
    """Orthonormal basis of the dark lower-level superpositions."""
    field = _clean(field)
    omega = rabi_matrix(j_lower, j_upper, field).omega
    return DarkSpace(float(j_lower), _null_basis(omega))


def dark_state_count(j_lower, j_upper, polarization_class: str = "generic") -> int:
    """Number of dark states expected for a polarization class at zero field."""
    if polarization_class not in POLARIZATION_CLASSES:
        raise DarkStateError(f"unknown polarization class {polarization_class!r}")
    tji, tjf = twice(j_lower), twice(j_upper)
    if abs(tji - tjf) > 2 or (tji - tjf) % 2 or (tji == 0 and tjf == 0):
        raise DarkStateError(f"not an E1 pair: {j_lower} <-> {j_upper}")
    if tjf == tji + 2:
        return 0
    if tjf == tji - 2:
        return 2
    if tji % 2 == 0:
        return 1
    return 1 if polarization_class == "pure-circular" else 0


def _align(prev: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Rotate ``new`` within its span to best overlap ``prev``."""
    if prev.shape != new.shape or new.shape[0] == 0:
        return new
    overlap = new.conj() @ prev.T  # (k_new, k_prev)
    u, _, vh = np.linalg.svd(overlap)
    rot = u @ vh  # unitary closest to the overlap matrix
    return rot.T @ new


def dark_trajectory(j_lower, j_upper, model: FieldModel,
                    sublevel_energies: Sequence[float] | None,
                    times: Sequence[float]) -> list[DarkSpace]:
    """Instantaneous dark spaces along a time grid, with energy phases.

    At each ``t`` the dark space of the instantaneous field is computed, its
    basis rotated to follow the previous sample continuously, and each
    coefficient ``c_m`` multiplied by ``exp(-i * eps_m * t)``.
    """
    n = twice(j_lower) + 1
    eps = np.zeros(n) if sublevel_energies is None else np.asarray(sublevel_energies, float)
    if eps.shape != (n,):
        raise DarkStateError(f"need {n} sublevel energies, got {eps.shape}")
    out = []
    prev = None
    for t in times:
        comps = field_components(model, float(t))
        if np.max(np.abs(comps)) == 0:
            raise DarkStateError(f"field vanishes at t={t}")
        raw = dark_space(j_lower, j_upper, SphericalField.from_array(comps)).basis
        if prev is not None:
            raw = _align(prev, raw)
        prev = raw
        phased = raw * np.exp(-1j * eps * float(t))[None, :]
        out.append(DarkSpace(float(j_lower), phased, float(t)))
    return out
