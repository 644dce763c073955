"""CSV ingestion, flat-file output and run manifests."""

from __future__ import annotations

import csv
import json
import math
import platform
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

import numpy as np

from .errors import EmptySeries, ParseError


@dataclass
class Series:
    values: np.ndarray
    columns: list
    timestamps: list | None = None

    @property
    def n(self):
        return self.values.shape[0]


def _parse(text, row, column):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(row, column, text) from None
    if math.isnan(v):
        raise ParseError(row, column, text)
    return v


def load_series(path, columns=None, time_column=None):
    """Read numeric columns of a headered CSV file into an (n, k) array.

    ``columns`` selects columns by header name (default: every column except
    the time column).  If columns are given and the first header column is
    not among them, that first column is taken as the time column.  Time
    values are kept as strings in ``Series.timestamps``.  Row numbers in
    ParseError count data rows from 1 (the header is not counted).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptySeries(f"{path} is empty")
        header = [h.strip() for h in header]
        if columns is not None:
            columns = list(columns)
            missing = [c for c in columns if c not in header]
            if missing:
                raise KeyError(f"columns not in header: {missing}")
            if time_column is None and header[0] not in columns:
                time_column = header[0]
        else:
            columns = [h for h in header if h != time_column]
        if time_column is not None and time_column not in header:
            raise KeyError(f"time column {time_column!r} not in header")
        idx = [header.index(c) for c in columns]
        t_idx = header.index(time_column) if time_column is not None else None
        rows, stamps = [], []
        data_row = 0
        for record in reader:
            if not record or all(not cell.strip() for cell in record):
                continue
            data_row += 1
            if len(record) < len(header):
                record = record + [""] * (len(header) - len(record))
            rows.append([_parse(record[i], data_row, header[i]) for i in idx])
            if t_idx is not None:
                stamps.append(record[t_idx])
    if not rows:
        raise EmptySeries(f"{path} has no data rows")
    return Series(values=np.array(rows, dtype=float).reshape(len(rows), len(columns)),
                  columns=columns, timestamps=stamps if t_idx is not None else None)


def format_value(v):
    """Shortest round-trip decimal for floats; integers and strings unchanged."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(v) for v in row])
    return path


def write_series(path, x, columns, timestamps=None):
    x = np.asarray(x)
    x = x[:, None] if x.ndim == 1 else x
    if timestamps is None:
        return write_csv(path, list(columns), x.tolist())
    return write_csv(path, ["time"] + list(columns), ([t] + r for t, r in zip(timestamps, x.tolist())))


def write_extremogram(path, result):
    """Columns lag, rho11, rho12, rho21, rho22, band11..band22 (bands nan when absent)."""
    k = result.rho.shape[1]
    pairs = [(i, j) for i in range(k) for j in range(k)]
    header = ["lag"] + [f"rho{i + 1}{j + 1}" for i, j in pairs] + [f"band{i + 1}{j + 1}" for i, j in pairs]
    band = result.band if result.band is not None else np.full((k, k), np.nan)
    rows = ([int(h)] + [float(result.rho[h, i, j]) for i, j in pairs] + [float(band[i, j]) for i, j in pairs]
            for h in result.lags)
    return write_csv(path, header, rows)


def versions():
    out = {"python": platform.python_version()}
    for dist in ("artifact", "numpy", "scipy", "numba"):
        try:
            out[dist] = metadata.version(dist)
        except metadata.PackageNotFoundError:
            out[dist] = None
    return out


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def write_manifest(out_dir, config, outputs, summary=None):
    """manifest.json: resolved config (including the master seed), library
    versions, output file names and summary statistics.  No wall-clock data,
    so identical runs give identical manifests."""
    manifest = {"config": config, "seed": config.get("seed"), "versions": versions(),
                "outputs": sorted(Path(p).name for p in outputs), "summary": summary or {}}
    return write_json(Path(out_dir) / "manifest.json", manifest)


def read_config(path):
    """Options from a JSON file; a run manifest contributes its "config" block."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValueError(f"{path}: configuration must be a JSON object")
    return dict(data["config"]) if "config" in data and "versions" in data else data
