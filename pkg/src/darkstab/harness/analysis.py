"""Lineshape widths, optima and power-law slopes of scan results."""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.signal import medfilt

__all__ = [
    "AnalysisError",
    "InsufficientSpanError",
    "FwhmResult",
    "mask_dips",
    "extract_fwhm",
    "lineshape_fwhm",
    "find_optimum",
    "loglog_slope",
    "DIP_WIDTH_STEPS",
]

#: Dips narrower than this many grid steps are masked before width extraction.
DIP_WIDTH_STEPS = 5
MIN_SAMPLES = 9


class AnalysisError(ValueError):
    pass


class InsufficientSpanError(AnalysisError):
    def __init__(self, detail: str = ""):
        super().__init__("insufficient span" + (f": {detail}" if detail else ""))


class FwhmResult(float):
    """A width that also remembers where the flanks were and what was masked."""

    left: float
    right: float
    masked: int

    def __new__(cls, width, left, right, masked):
        obj = super().__new__(cls, width)
        obj.left, obj.right, obj.masked = left, right, masked
        return obj


def mask_dips(y: np.ndarray, width_steps: int = DIP_WIDTH_STEPS,
              x: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """Bridge narrow downward features.

    Points lying clearly below a running median are flagged and replaced by
    a monotone cubic through the unflagged points, so peaks and
    smooth flanks pass through untouched.
    """
    y = np.asarray(y, float)
    kernel = 2 * width_steps + 1
    if y.size < kernel:
        return y.copy(), 0
    med = medfilt(np.pad(y, width_steps, mode="edge"), kernel)[width_steps:-width_steps]
    scale = max(float(np.max(np.abs(y))), 1e-300)
    low = y < med - 1e-3 * scale
    if not low.any():
        return y.copy(), 0
    xs = np.arange(y.size, dtype=float) if x is None else np.asarray(x, float)
    out = y.copy()
    out[low] = PchipInterpolator(xs[~low], y[~low], extrapolate=True)(xs[low])
    return out, int(low.sum())


def extract_fwhm(samples: Sequence[tuple[float, float]], mask: bool = True) -> FwhmResult:
    """Full width at half maximum of a single-peaked sampled lineshape.

    Flank crossings come from a monotone cubic (PCHIP) interpolant solved by
    bracketing root search.
    """
    arr = np.asarray(samples, float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise AnalysisError("samples must be (x, y) pairs")
    if arr.shape[0] < MIN_SAMPLES:
        raise AnalysisError(f"need at least {MIN_SAMPLES} samples, got {arr.shape[0]}")
    arr = arr[np.argsort(arr[:, 0], kind="stable")]
    x, y = arr[:, 0], arr[:, 1]
    if np.any(np.diff(x) <= 0):
        raise AnalysisError("sample abscissae must be distinct")
    masked = 0
    if mask:
        y, masked = mask_dips(y, x=x)
    k = int(np.argmax(y))
    peak = y[k]
    if peak <= 0:
        raise AnalysisError("lineshape has no positive peak")
    if k == 0 or k == len(x) - 1:
        raise InsufficientSpanError("peak at the edge of the sampled range")
    half = 0.5 * peak
    below_left = np.nonzero(y[:k] < half)[0]
    below_right = np.nonzero(y[k + 1:] < half)[0]
    if below_left.size == 0 or below_right.size == 0:
        raise InsufficientSpanError("half maximum not crossed on both flanks")
    interp = PchipInterpolator(x, y - half)
    i = below_left[-1]
    left = brentq(interp, x[i], x[i + 1], xtol=1e-14 * max(1.0, abs(x[i])))
    j = k + 1 + below_right[0]
    right = brentq(interp, x[j - 1], x[j], xtol=1e-14 * max(1.0, abs(x[j])))
    return FwhmResult(right - left, left, right, masked)


def lineshape_fwhm(fun: Callable[[float], float], center: float = 0.0,
                   scale: float = 1.0, points: int = 61, max_span: float = 1e4,
                   refine: bool = True) -> FwhmResult:
    """FWHM of ``fun(detuning)``, widening the window until the peak is bracketed.

    A coarse symmetric window is doubled until both half-maximum crossings
    are inside it; a second pass resamples around the located peak on
    +-1.5 widths so the flanks are well resolved.
    """
    span = max(scale, 1e-6)
    while True:
        xs = np.linspace(center - span, center + span, points)
        ys = np.array([fun(float(v)) for v in xs])
        try:
            res = extract_fwhm(list(zip(xs, ys)))
            break
        except InsufficientSpanError:
            if span >= max_span:
                raise
            span *= 2.0
    if not refine:
        return res
    mid = 0.5 * (res.left + res.right)
    half = 1.5 * float(res)
    xs = np.linspace(mid - half, mid + half, points)
    ys = np.array([fun(float(v)) for v in xs])
    try:
        return extract_fwhm(list(zip(xs, ys)))
    except InsufficientSpanError:
        return res


def _value(rec, key):
    if isinstance(rec, dict):
        return rec.get(key)
    return rec.get(key) if hasattr(rec, "get") else getattr(rec, key)


def find_optimum(records: Sequence, objective: str = "max Pf"):
    """Record with the largest ``Pf`` (``"max Pf"``) or smallest width
    (``"min fwhm"``); ties resolve to the earliest record."""
    if objective not in ("max Pf", "min fwhm"):
        raise AnalysisError(f"unknown objective {objective!r}")
    key = "Pf" if objective == "max Pf" else "fwhm"
    best, best_val = None, None
    for rec in records:
        if _value(rec, "error"):
            continue
        v = _value(rec, key)
        if v is None or not math.isfinite(v):
            continue
        if best is None or (v > best_val if key == "Pf" else v < best_val):
            best, best_val = rec, v
    if best is None:
        raise AnalysisError(f"no usable record for objective {objective!r}")
    return best


def loglog_slope(records: Sequence, x_name: str, observable: str = "Pf",
                 x_range: tuple[float, float] | None = None) -> float:
    """Least-squares slope of log(observable) against log(x)."""
    xs, ys = [], []
    for rec in records:
        if _value(rec, "error"):
            continue
        x, y = _value(rec, x_name), _value(rec, observable)
        if x_range is not None and not (x_range[0] <= x <= x_range[1]):
            continue
        xs.append(x)
        ys.append(y)
    if len(xs) < 4:
        raise AnalysisError(f"need at least 4 points in range, got {len(xs)}")
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise AnalysisError("log-log slope needs positive values")
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)
