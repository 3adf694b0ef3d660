"""CSV / JSON writers. Floats are written with 17 significant digits so reruns are byte-identical; NaN and inf become empty cells or null."""

import csv
import json
import logging
import math
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .config import FLOAT_FORMAT


def format_cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return ""
        return format(float(value), FLOAT_FORMAT)
    return str(value)


@contextmanager
def _open_output(path):
    if path is None:
        yield sys.stdout
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        yield handle
    logging.info(f"Wrote {path}")


def write_csv(path, header, rows):
    """Header row plus data rows; path None writes to stdout"""
    with _open_output(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])


def jsonable(value):
    """Plain JSON types; non-finite floats become null"""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def write_json(path, meta, data):
    document = {"meta": jsonable(meta), "data": jsonable(data)}
    with _open_output(path) as handle:
        json.dump(document, handle, indent=2, sort_keys=True, allow_nan=False)
        handle.write("\n")


def read_series_csv(path):
    """(t, value) columns of a series file; empty cells read as NaN"""
    times, values = [], []
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            times.append(int(row["t"]))
            cell = row["value"].strip()
            values.append(float(cell) if cell else math.nan)
    return times, values
