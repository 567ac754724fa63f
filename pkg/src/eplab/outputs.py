"""Writers and readers for run artifacts: diagnostics/series/snapshot CSVs and JSON summaries.

Floats are written with 17 significant digits so every value reads back bit-for-bit.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .diagnostics import DiagnosticsRecord
from .errors import MissingArtifactError

DIAGNOSTICS_FILE = "diagnostics.csv"
SERIES_FILE = "series.csv"
SNAPSHOT_FILE = "snapshots.csv"
SUMMARY_FILE = "summary.json"
CONFIG_FILE = "config.txt"

SERIES_COLUMNS = ("t", "rho_origin", "minus_ux_origin", "min_ux", "max_abs_ux", "max_abs_rhox",
                  "max_rho", "spectral_tail")
SNAPSHOT_COLUMNS = ("t", "x", "rho", "u", "phi")


def fmt(value):
    return f"{float(value):.17g}"


def write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_diagnostics(path, records):
    return write_rows(path, DiagnosticsRecord.CSV_COLUMNS, (r.csv_row() for r in records))


def write_series(path, series):
    cols = [c for c in SERIES_COLUMNS if c in series]
    rows = zip(*(series[c] for c in cols))
    return write_rows(path, cols, ([fmt(v) for v in row] for row in rows))


def write_snapshots(path, states, x):
    def rows():
        for st in states:
            for xi, r, u, p in zip(x, st.rho, st.u, st.phi):
                yield [fmt(st.time), fmt(xi), fmt(r), fmt(u), fmt(p)]

    return write_rows(path, SNAPSHOT_COLUMNS, rows())


def read_csv(path):
    """Columns of a numeric CSV as float arrays (non-numeric columns stay strings)."""
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"missing artifact {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise MissingArtifactError(f"empty artifact {path}")
        cols = list(zip(*reader)) or [()] * len(header)
    out = {}
    for name, values in zip(header, cols):
        try:
            out[name] = np.array([float(v) for v in values])
        except ValueError:
            out[name] = list(values)
    return out


def _clean(obj):
    # JSON has no NaN/inf; numpy scalars need unwrapping
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(doc):
    """Deterministic JSON (sorted keys, shortest round-trip floats)."""
    return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"


def write_json(path, doc):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc), encoding="utf-8")
    return path


def read_json(path):
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"missing artifact {path}")
    return json.loads(path.read_text(encoding="utf-8"))
