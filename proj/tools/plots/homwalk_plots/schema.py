# SPDX-License-Identifier: Apache-2.0
# Copyright the homwalk authors
"""CSV loading against the experiment table schemas."""

import csv
import json
import math
from pathlib import Path


class SchemaError(ValueError):
    """Input CSV does not match the expected table schema."""


def read_table(path, numeric, text=()):
    """Read a CSV into column lists, converting ``numeric`` columns to float.

    Every column in ``numeric`` and ``text`` must be present, the file must have
    at least one data row and each row must have the header's width.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError, csv.Error) as e:
        raise SchemaError(f"{path}: cannot read CSV: {e}") from e
    if not rows or not rows[0]:
        raise SchemaError(f"{path}: missing header")
    header = rows[0]
    if len(set(header)) != len(header):
        raise SchemaError(f"{path}: duplicate column names")
    missing = [c for c in (*numeric, *text) if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {', '.join(missing)}")
    data = rows[1:]
    if not data:
        raise SchemaError(f"{path}: no data rows")
    cols = {c: [] for c in (*numeric, *text)}
    for i, row in enumerate(data, start=2):
        if len(row) != len(header):
            raise SchemaError(f"{path}:{i}: expected {len(header)} fields, got {len(row)}")
        for c in numeric:
            cell = row[header.index(c)]
            try:
                v = float(cell)
            except ValueError:
                raise SchemaError(f"{path}:{i}: column {c}: not a number: {cell!r}") from None
            if math.isinf(v):
                raise SchemaError(f"{path}:{i}: column {c}: infinite value")
            cols[c].append(v)
        for c in text:
            cols[c].append(row[header.index(c)])
    return cols


def read_thresholds(csv_path):
    """Thresholds from the run's manifest.json next to the CSV, if present."""
    manifest = Path(csv_path).with_name("manifest.json")
    if not manifest.is_file():
        return {}
    try:
        doc = json.loads(manifest.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"{manifest}: {e}") from e
    return doc.get("config", {}).get("thresholds", {})
