"""Optical Bloch (master) equations for Zeeman-degenerate multilevel atoms.

The density matrix is carried in a real orthonormal Hermitian basis: the
``n`` populations first, then ``sqrt(2)*Re`` and ``sqrt(2)*Im`` of every
upper-triangle coherence.  A Liouvillian is therefore a real
``n**2 x n**2`` matrix ``M(t) = M0 + sum_k c_k(t) G_k`` where the ``c_k`` are
real and imaginary parts of the modulated field components.

Units are hbar = gamma = 1 throughout.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .amcore import coupling_operators, dipole_tensor, m_values, twice
from .fields import FieldModel, ZeemanSpec, zeeman_shifts

__all__ = [
    "Level",
    "Decay",
    "LevelScheme",
    "DriveSpec",
    "Liouvillian",
    "SchemeError",
    "SteadyStateError",
    "IntegrationError",
    "QuasiSteadyError",
    "build_liouvillian",
    "decay_superoperator",
    "apply_laser_dephasing",
    "steady_state",
    "evolve",
    "quasi_steady_average",
    "excited_population",
    "level_populations",
    "ground_mixture",
    "density_matrix_errors",
    "to_real",
    "to_complex",
]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_PERIOD_TOL = 1e-8
DEFAULT_MAX_PERIODS = 10_000
#: Singular values of L below this fraction of the largest count as zero.
NULLITY_TOL = 1e-11
#: Step-controller tolerance used by :func:`evolve`, relative to the requested one.
EVOLVE_MARGIN = 0.1


class SchemeError(ValueError):
    pass


class SteadyStateError(RuntimeError):
    pass


class IntegrationError(RuntimeError):
    pass


class QuasiSteadyError(RuntimeError):
    pass


# -- level schemes -------------------------------------------------------------

@dataclass(frozen=True)
class Level:
    label: str
    j: float
    g: float = 0.0
    energy: float = 0.0  # static offset added in the rotating frame


@dataclass(frozen=True)
class Decay:
    upper: str
    lower: str
    rate: float  # in units of gamma


@dataclass(frozen=True)
class LevelScheme:
    levels: tuple[Level, ...]
    decays: tuple[Decay, ...] = ()

    def __post_init__(self):
        labels = [lvl.label for lvl in self.levels]
        if len(set(labels)) != len(labels):
            raise SchemeError("duplicate level labels")
        for lvl in self.levels:
            if twice(lvl.j) < 0:
                raise SchemeError(f"negative J on {lvl.label}")
        for d in self.decays:
            if d.upper not in labels or d.lower not in labels:
                raise SchemeError(f"decay {d.upper}->{d.lower} names an unknown level")
            if d.rate < 0:
                raise SchemeError("decay rates must be non-negative")

    @property
    def dim(self) -> int:
        return sum(twice(lvl.j) + 1 for lvl in self.levels)

    def level(self, label: str) -> Level:
        for lvl in self.levels:
            if lvl.label == label:
                return lvl
        raise SchemeError(f"unknown level {label!r}")

    def slice(self, label: str) -> slice:
        start = 0
        for lvl in self.levels:
            size = twice(lvl.j) + 1
            if lvl.label == label:
                return slice(start, start + size)
            start += size
        raise SchemeError(f"unknown level {label!r}")

    def decay_rate(self, label: str) -> float:
        return sum(d.rate for d in self.decays if d.upper == label)

    def sublevel_names(self) -> list[str]:
        names = []
        for lvl in self.levels:
            for m in m_values(lvl.j):
                names.append(f"{lvl.label}({_fmt_m(m)})")
        return names

    def level_of_index(self) -> np.ndarray:
        out = []
        for k, lvl in enumerate(self.levels):
            out += [k] * (twice(lvl.j) + 1)
        return np.array(out)


def _fmt_m(m: float) -> str:
    f = Fraction(m).limit_denominator(2)
    s = f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)
    return ("+" if m > 0 else "") + s


@dataclass(frozen=True)
class DriveSpec:
    """One laser on one transition.

    ``omega`` is the rms Rabi frequency produced by a unit-norm field; fields
    built by the presets have unit norm, so ``omega`` is the rms Rabi
    frequency itself.
    """

    lower: str
    upper: str
    detuning: float
    field: FieldModel
    omega: float
    linewidth: float = 0.0
    label: str | None = None

    @property
    def name(self) -> str:
        return self.label or f"{self.lower}{self.upper}"


# -- Hermitian real basis ----------------------------------------------------------

_BASIS_CACHE: dict[int, np.ndarray] = {}


def _basis(n: int) -> np.ndarray:
    """Columns are vec(B_k) for the orthonormal Hermitian basis B_k."""
    hit = _BASIS_CACHE.get(n)
    if hit is not None:
        return hit
    N = n * n
    T = np.zeros((N, N), dtype=complex)
    for i in range(n):
        T[i * n + i, i] = 1.0
    k = n
    s = 1.0 / math.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            T[i * n + j, k] = s
            T[j * n + i, k] = s
            T[i * n + j, k + 1] = -1j * s
            T[j * n + i, k + 1] = 1j * s
            k += 2
    T.setflags(write=False)
    _BASIS_CACHE[n] = T
    return T


def to_real(rho: np.ndarray) -> np.ndarray:
    n = rho.shape[0]
    return (_basis(n).conj().T @ rho.reshape(-1)).real


def to_complex(r: np.ndarray) -> np.ndarray:
    N = r.shape[0]
    n = int(round(math.sqrt(N)))
    return (_basis(n) @ r).reshape(n, n)


def _realify(superop: np.ndarray, n: int) -> np.ndarray:
    T = _basis(n)
    return (T.conj().T @ superop @ T).real


def _commutator_superop(H: np.ndarray) -> np.ndarray:
    n = H.shape[0]
    eye = np.eye(n)
    return -1j * (np.kron(H, eye) - np.kron(eye, H.T))


def _dissipator(C: np.ndarray) -> np.ndarray:
    n = C.shape[0]
    eye = np.eye(n)
    cdc = C.conj().T @ C
    return np.kron(C, C.conj()) - 0.5 * np.kron(cdc, eye) - 0.5 * np.kron(eye, cdc.T)


# -- Liouvillian ----------------------------------------------------------------

@dataclass
class Liouvillian:
    """Real-basis generator ``M(t) = M0 + sum_k c_k(t) G_k``."""

    scheme: LevelScheme
    drives: tuple[DriveSpec, ...]
    M0: np.ndarray
    G: np.ndarray  # (K, N, N), empty K for static problems
    modulated: tuple[tuple[int, DriveSpec], ...]  # (first G index, drive)
    period: float | None
    frame_paths: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.scheme.dim

    @property
    def N(self) -> int:
        return self.M0.shape[0]

    @property
    def time_independent(self) -> bool:
        return self.G.shape[0] == 0

    def coefficients(self, t: float) -> np.ndarray:
        c = np.empty(self.G.shape[0])
        for k0, drive in self.modulated:
            comps = drive.field.components(t) * drive.omega
            c[k0:k0 + 3] = comps.real
            c[k0 + 3:k0 + 6] = comps.imag
        return c

    def matrix(self, t: float = 0.0) -> np.ndarray:
        if self.time_independent:
            return self.M0
        return self.M0 + np.tensordot(self.coefficients(t), self.G, axes=1)

    def __call__(self, t: float, rho: np.ndarray) -> np.ndarray:
        """Complex ``d rho/dt`` for a complex density matrix."""
        return to_complex(self.matrix(t) @ to_real(rho))

    def superoperator(self, t: float = 0.0) -> np.ndarray:
        """Complex superoperator acting on row-major ``vec(rho)``."""
        T = _basis(self.n)
        return T @ self.matrix(t) @ T.conj().T

    def with_extra(self, extra_M0: np.ndarray) -> "Liouvillian":
        return replace(self, M0=self.M0 + extra_M0)


def _frame_offsets(scheme: LevelScheme, drives: Sequence[DriveSpec]):
    """Rotating-frame energy of every level and the drives on its frame path."""
    labels = [lvl.label for lvl in scheme.levels]
    offset = {labels[0]: 0.0}
    path = {labels[0]: frozenset()}
    adj: dict[str, list] = {lab: [] for lab in labels}
    for d in drives:
        adj[d.lower].append((d.upper, -d.detuning, d.name))
        adj[d.upper].append((d.lower, d.detuning, d.name))
    pending = list(labels)
    while pending:
        root = next(lab for lab in pending if lab in offset) if any(
            lab in offset for lab in pending) else pending[0]
        offset.setdefault(root, 0.0)
        path.setdefault(root, frozenset())
        queue = deque([root])
        while queue:
            a = queue.popleft()
            if a in pending:
                pending.remove(a)
            for b, shift, name in adj[a]:
                val = offset[a] + shift
                if b in offset:
                    if abs(offset[b] - val) > 1e-12:
                        raise SchemeError(
                            f"drives form a loop with inconsistent frames at {b}")
                    continue
                offset[b] = val
                path[b] = path[a] ^ {name}
                queue.append(b)
    return offset, path


def _coupling_blocks(scheme: LevelScheme, drive: DriveSpec):
    """Hermitian pieces K_p, J_p for unit Re/Im of each field component."""
    lo, up = scheme.level(drive.lower), scheme.level(drive.upper)
    ops = coupling_operators(lo.j, up.j, allow_scalar=True)
    si, sf = scheme.slice(drive.lower), scheme.slice(drive.upper)
    n = scheme.dim
    Ks, Js = [], []
    for op in ops:
        A = np.zeros((n, n), dtype=complex)
        A[sf, si] = -0.5 * op.T  # <f|H|i> = -Omega[i, f] / 2
        Ks.append(A + A.conj().T)
        Js.append(1j * A - 1j * A.conj().T)
    return Ks, Js


def decay_superoperator(scheme: LevelScheme, gamma: float = 1.0) -> np.ndarray:
    """Complex superoperator for spontaneous emission on every decay channel.

    Jump operators ``C_q`` are the lowering parts of the dipole operator, so
    lower-level coherences are fed from upper-level coherences with the
    ``(-1)**(m_i - m_i')`` 3-j structure; upper populations decay at the
    channel-summed rate and optical coherences at half of it.
    """
    n = scheme.dim
    sup = np.zeros((n * n, n * n), dtype=complex)
    for d in scheme.decays:
        if d.rate == 0:
            continue
        lo, up = scheme.level(d.lower), scheme.level(d.upper)
        dq = dipole_tensor(lo.j, up.j, allow_scalar=True)
        norm = sum(float(np.sum(x[:, 0] ** 2)) for x in dq)
        si, sf = scheme.slice(d.lower), scheme.slice(d.upper)
        for x in dq:
            if not np.any(x):
                continue
            C = np.zeros((n, n))
            C[si, sf] = x * math.sqrt(gamma * d.rate / norm)
            sup += _dissipator(C)
    return sup


def _dephasing_superop(scheme: LevelScheme, paths: dict, drive_name: str,
                       rate: float) -> np.ndarray:
    n = scheme.dim
    lvl_idx = scheme.level_of_index()
    labels = [lvl.label for lvl in scheme.levels]
    touched = np.array([drive_name in paths.get(lab, frozenset()) for lab in labels])
    diag = np.zeros(n * n)
    for a in range(n):
        for b in range(n):
            if touched[lvl_idx[a]] != touched[lvl_idx[b]]:
                diag[a * n + b] = -rate
    return np.diag(diag).astype(complex)


def apply_laser_dephasing(liou: Liouvillian, drive: DriveSpec | str,
                          linewidth: float) -> Liouvillian:
    """Extra decay from a laser's phase noise.

    Coherences between sublevels whose rotating frames differ by this laser's
    phase decay at ``linewidth`` more: the optical coherences of its own
    transition and any Raman coherences it takes part in.  Rates from several
    lasers add.
    """
    if linewidth < 0:
        raise SchemeError("linewidth must be non-negative")
    if linewidth == 0:
        return liou
    name = drive if isinstance(drive, str) else drive.name
    sup = _dephasing_superop(liou.scheme, liou.frame_paths, name, linewidth)
    return liou.with_extra(_realify(sup, liou.n))


def _common_period(periods: list[float]) -> float | None:
    if not periods:
        return None
    freqs = [Fraction(2 * math.pi / p).limit_denominator(10**6) for p in periods]
    g = freqs[0]
    for f in freqs[1:]:
        num = math.gcd(g.numerator * f.denominator, f.numerator * g.denominator)
        g = Fraction(num, g.denominator * f.denominator)
    return 2 * math.pi / float(g)


def build_liouvillian(scheme: LevelScheme, drives: Sequence[DriveSpec],
                      zeeman: ZeemanSpec | None = None, gamma: float = 1.0) -> Liouvillian:
    """Assemble Hamiltonian, decay and laser-dephasing terms."""
    zeeman = zeeman or ZeemanSpec()
    labels = {lvl.label for lvl in scheme.levels}
    seen = set()
    for d in drives:
        if d.lower not in labels or d.upper not in labels:
            raise SchemeError(f"drive on nonexistent transition {d.lower}->{d.upper}")
        key = (d.lower, d.upper)
        if key in seen:
            raise SchemeError(f"two drives share the transition {d.lower}->{d.upper}")
        seen.add(key)
    names = [d.name for d in drives]
    if len(set(names)) != len(names):
        raise SchemeError("drive names must be unique")

    n = scheme.dim
    offsets, paths = _frame_offsets(scheme, drives)
    diag = zeeman_shifts(scheme, zeeman.delta_B, zeeman.g_overrides)
    for lvl in scheme.levels:
        diag[scheme.slice(lvl.label)] += offsets[lvl.label] + lvl.energy
    H0 = np.diag(diag).astype(complex)

    G = []
    modulated = []
    for d in drives:
        Ks, Js = _coupling_blocks(scheme, d)
        model = d.field
        if not getattr(model, "modulated", False):
            comps = model.components(0.0) * d.omega
            for c, K, J in zip(comps, Ks, Js):
                H0 = H0 + c.real * K + c.imag * J
        else:
            modulated.append((len(G), d))
            for K in Ks:
                G.append(_realify(_commutator_superop(K), n))
            for J in Js:
                G.append(_realify(_commutator_superop(J), n))

    sup = _commutator_superop(H0) + decay_superoperator(scheme, gamma)
    M0 = _realify(sup, n)
    G_arr = np.array(G) if G else np.zeros((0, n * n, n * n))
    period = _common_period([d.field.period for _, d in modulated])
    liou = Liouvillian(scheme, tuple(drives), M0, G_arr, tuple(modulated), period, paths)
    for d in drives:
        liou = apply_laser_dephasing(liou, d, d.linewidth)
    return liou


# -- density matrices ---------------------------------------------------------------

def ground_mixture(scheme: LevelScheme, label: str | None = None) -> np.ndarray:
    """Uniform mixture over one level's sublevels (default: the first level)."""
    label = label or scheme.levels[0].label
    rho = np.zeros((scheme.dim, scheme.dim), dtype=complex)
    s = scheme.slice(label)
    size = s.stop - s.start
    rho[s, s] = np.eye(size) / size
    return rho


def density_matrix_errors(rho: np.ndarray) -> dict[str, float]:
    """Hermiticity error, trace error and most negative eigenvalue."""
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    tr = float(abs(np.trace(rho) - 1.0))
    ev = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return {"hermiticity": herm, "trace": tr, "min_eigenvalue": float(ev.min())}


def level_populations(rho: np.ndarray, scheme: LevelScheme) -> dict[str, float]:
    diag = np.real(np.diag(rho))
    return {lvl.label: float(diag[scheme.slice(lvl.label)].sum()) for lvl in scheme.levels}


def excited_population(rho: np.ndarray, scheme: LevelScheme, label: str) -> float:
    """Summed population of one level's sublevels."""
    return float(np.real(np.trace(rho[scheme.slice(label), scheme.slice(label)])))


# -- steady state ---------------------------------------------------------------------

def _trace_row(n: int) -> np.ndarray:
    row = np.zeros(n * n)
    row[:n] = 1.0
    return row


def _unreachable(liou: Liouvillian, start: np.ndarray) -> list[str]:
    """Sublevels not connected to the support of ``start`` by any process."""
    n = liou.n
    coupling = np.abs(liou.superoperator(0.0)) > 0
    if not liou.time_independent:
        for k in range(liou.G.shape[0]):
            T = _basis(n)
            coupling |= np.abs(T @ liou.G[k] @ T.conj().T) > 0
    # links: Hamiltonian elements (one index shared) and population transfer
    adj = np.zeros((n, n), bool)
    idx = np.nonzero(coupling)
    for row, col in zip(*idx):
        a, b = divmod(row, n)
        c, d = divmod(col, n)
        if a == c and b != d:
            adj[b, d] = adj[d, b] = True
        elif b == d and a != c:
            adj[a, c] = adj[c, a] = True
        elif a == b and c == d and a != c:
            adj[c, a] = True
    seen = set(np.nonzero(np.abs(np.diag(start)) > 0)[0].tolist())
    queue = deque(seen)
    while queue:
        a = queue.popleft()
        for b in np.nonzero(adj[a])[0]:
            if b not in seen:
                seen.add(int(b))
                queue.append(int(b))
    names = liou.scheme.sublevel_names()
    return [names[k] for k in range(n) if k not in seen]


def _fixed_point(A: np.ndarray, n: int, r0: np.ndarray, strict: bool, liou=None):
    """Trace-one null vector of ``A`` (A = L or Phi - I); handles degeneracy."""
    u, s, vh = np.linalg.svd(A)
    scale = s[0] if s[0] > 0 else 1.0
    null_dim = int(np.sum(s <= NULLITY_TOL * scale))
    info = {"null_dim": max(null_dim, 1), "degenerate": null_dim > 1}
    if null_dim <= 1:
        B = A.copy()
        B[0, :] = _trace_row(n)
        rhs = np.zeros(A.shape[0])
        rhs[0] = 1.0
        r = np.linalg.solve(B, rhs)
    else:
        if strict:
            missing = _unreachable(liou, to_complex(r0)) if liou is not None else []
            raise SteadyStateError(
                f"stationary space has dimension {null_dim}; "
                f"unreachable sublevels: {', '.join(missing) or 'none (dark states)'}")
        R = vh[-null_dim:].T  # right null vectors
        Lf = u[:, -null_dim:]  # left null vectors
        P = R @ np.linalg.solve(Lf.T @ R, Lf.T)
        r = P @ r0
        tr = r[:n].sum()
        if abs(tr) < 1e-12:
            raise SteadyStateError("initial state has no weight on any stationary state")
        r = r / tr
    info["residual"] = float(np.max(np.abs(A @ r))) / scale
    return r, info


def steady_state(liou: Liouvillian, *, rho0: np.ndarray | None = None,
                 strict: bool = False, full_output: bool = False):
    """Stationary density matrix of a time-independent Liouvillian.

    When the stationary space is degenerate (dark states at zero field, no
    drive, ...), the long-time limit reached from ``rho0`` (default: uniform
    mixture over the first level) is returned and ``info['degenerate']`` is
    set.  ``strict=True`` raises instead, naming sublevels that no process
    reaches.
    """
    if not liou.time_independent:
        raise SteadyStateError("steady_state needs a time-independent Liouvillian; "
                               "use quasi_steady_average")
    n = liou.n
    r0 = to_real(rho0 if rho0 is not None else ground_mixture(liou.scheme))
    r, info = _fixed_point(liou.M0, n, r0, strict, liou)
    rho = to_complex(r)
    rho = 0.5 * (rho + rho.conj().T)
    if full_output:
        return rho, info
    return rho


# -- time integration ----------------------------------------------------------------

def _rhs(liou: Liouvillian):
    if liou.time_independent:
        M0 = liou.M0
        return lambda t, y: M0 @ y
    return lambda t, y: liou.matrix(t) @ y


def _integrate(fun, t0, t1, y0, tol, dense=False):
    sol = solve_ivp(fun, (t0, t1), y0, method="RK45", rtol=tol, atol=tol,
                    dense_output=dense)
    if not sol.success:
        raise IntegrationError(f"integration failed on [{t0}, {t1}]: {sol.message}")
    return sol


def evolve(liou: Liouvillian, rho0: np.ndarray, t0: float, t1: float,
           tol: float = DEFAULT_TOL) -> np.ndarray:
    """Integrate the master equation from ``t0`` to ``t1`` (Dormand-Prince 5(4)).

    The step controller runs a decade below ``tol`` so that the accumulated
    error over ~100 decay times stays near ``10 * tol``.
    """
    if t1 < t0:
        raise ValueError("t1 must not precede t0")
    r0 = to_real(np.asarray(rho0, dtype=complex))
    if t1 == t0:
        return to_complex(r0)
    sol = _integrate(_rhs(liou), t0, t1, r0, tol * EVOLVE_MARGIN)
    return to_complex(sol.y[:, -1])


def _period_map(liou: Liouvillian, T: float, tol: float, t0: float = 0.0) -> np.ndarray:
    N = liou.N

    def fun(t, y):
        return (liou.matrix(t) @ y.reshape(N, N)).ravel()

    sol = _integrate(fun, t0, t0 + T, np.eye(N).ravel(), tol)
    return sol.y[:, -1].reshape(N, N)


def _max_abs_rho(r: np.ndarray) -> float:
    return float(np.max(np.abs(to_complex(r))))


def _average_over_period(liou, r_start, T, tol):
    N = liou.N
    base = _rhs(liou)

    def fun(t, y):
        r = y[:N]
        return np.concatenate([base(t, r), r])

    y0 = np.concatenate([r_start, np.zeros(N)])
    sol = _integrate(fun, 0.0, T, y0, tol)
    end = sol.y[:N, -1]
    avg = sol.y[N:, -1] / T
    return avg, end


def quasi_steady_average(liou: Liouvillian, tol: float = DEFAULT_PERIOD_TOL,
                         max_periods: int = DEFAULT_MAX_PERIODS, *,
                         period: float | None = None, rho0: np.ndarray | None = None,
                         method: str = "floquet", int_tol: float = 1e-10,
                         full_output: bool = False):
    """Period-averaged density matrix in the periodic long-time regime.

    ``method='floquet'`` integrates the one-period propagator once and
    iterates it from ``rho0`` until successive periods agree to ``tol`` in
    max-norm (this fixes the settle time); the periodic state is then the
    trace-one fixed point of the propagator.  ``method='integrate'`` steps
    the state forward period by period instead.  Either way the average is
    accumulated by the adaptive integrator along the final period.

    Returns ``(rho_avg, settle_time)``, or ``(rho_avg, settle_time, info)``
    with ``full_output=True``.
    """
    T = period if period is not None else liou.period
    if T is None or T <= 0:
        raise QuasiSteadyError("quasi-steady averaging needs a modulation period")
    n = liou.n
    r0 = to_real(rho0 if rho0 is not None else ground_mixture(liou.scheme))

    info: dict = {"period": T, "method": method}
    if method == "floquet":
        Phi = _period_map(liou, T, int_tol)
        r = r0.copy()
        settled = None
        for k in range(1, max_periods + 1):
            nxt = Phi @ r
            if _max_abs_rho(nxt - r) < tol:
                settled = k
                r = nxt
                break
            r = nxt
        if settled is None:
            raise QuasiSteadyError(
                f"no periodic state within {max_periods} periods (T={T:.4g})")
        r_fix, fp = _fixed_point(Phi - np.eye(liou.N), n, r, False)
        info.update({"null_dim": fp["null_dim"], "degenerate": fp["degenerate"]})
        # in a degenerate case the iterate itself is the physical limit
        r_start = r if fp["degenerate"] else r_fix
    elif method == "integrate":
        fun = _rhs(liou)
        r = r0.copy()
        settled = None
        for k in range(1, max_periods + 1):
            nxt = _integrate(fun, 0.0, T, r, int_tol).y[:, -1]
            if _max_abs_rho(nxt - r) < tol:
                settled = k
                r = nxt
                break
            r = nxt
        if settled is None:
            raise QuasiSteadyError(
                f"no periodic state within {max_periods} periods (T={T:.4g})")
        r_start = r
    else:
        raise ValueError(f"unknown method {method!r}")

    avg, end = _average_over_period(liou, r_start, T, int_tol)
    info["periodicity"] = _max_abs_rho(end - r_start)
    info["settle_periods"] = settled
    rho_avg = to_complex(avg)
    rho_avg = 0.5 * (rho_avg + rho_avg.conj().T)
    settle_time = settled * T
    if full_output:
        return rho_avg, settle_time, info
    return rho_avg, settle_time
