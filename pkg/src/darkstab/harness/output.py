"""CSV tables and JSON sidecars for scan results."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

from .scan import DENSITY_TOLERANCES, ScanRecord, ScanSpec

__all__ = ["record_columns", "format_float", "write_csv", "read_csv", "write_sidecar",
           "sidecar_path"]

_META_COLUMNS = ("settle_time", "residual", "periodicity", "null_dim", "degenerate",
                 "fwhm_masked", "hermiticity", "trace", "min_eigenvalue")


def format_float(x) -> str:
    """Round-trippable scientific notation; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.17e}"


def record_columns(spec: ScanSpec, records: Sequence[ScanRecord]) -> list[str]:
    levels: list[str] = []
    for r in records:
        for lab in r.populations:
            if lab not in levels:
                levels.append(lab)
    cols = [f"i{k}" for k in range(len(spec.axes))]
    cols += [a.name for a in spec.axes]
    cols += [f"pop_{lab}" for lab in levels]
    cols += ["Pf"]
    if "fwhm" in spec.observables:
        cols += ["fwhm"]
    cols += list(_META_COLUMNS) + ["error"]
    return cols


def _cell(rec: ScanRecord, col: str) -> str:
    if col[0] == "i" and col[1:].isdigit():
        return str(rec.index[int(col[1:])])
    if col == "error":
        return rec.error or ""
    v = rec.get(col)
    if col in ("null_dim", "fwhm_masked") and v is not None:
        return str(int(v))
    if col == "degenerate" and v is not None:
        return "1" if v else "0"
    return format_float(v)


def write_csv(path, spec: ScanSpec, records: Sequence[ScanRecord]) -> list[str]:
    cols = record_columns(spec, records)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for rec in records:
            w.writerow([_cell(rec, c) for c in cols])
    return cols


def read_csv(path) -> list[dict]:
    """Rows as dicts; numeric cells converted to float."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            conv = {}
            for k, v in row.items():
                if k == "error" or v == "":
                    conv[k] = v if k == "error" else None
                else:
                    try:
                        conv[k] = float(v)
                    except ValueError:
                        conv[k] = v
            out.append(conv)
    return out


def sidecar_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.name + ".json")


def write_sidecar(csv_path, spec: ScanSpec, version: str, extra: dict | None = None) -> Path:
    path = sidecar_path(csv_path)
    doc = {"config": spec.to_dict(), "solver_tolerances": spec.solver_options(),
           "density_tolerances": DENSITY_TOLERANCES, "version": version}
    doc.update(extra or {})
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
