"""Plain-text run outputs: CSV at 17 significant digits with LF line endings, and JSON."""

import csv
import json
import os
from typing import Iterable, Sequence

import numpy as np


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """
    Write a CSV file. Floats are written with 17 significant digits and a `.`
    decimal separator regardless of locale.

    Returns:
    - str: the path written.
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def write_columns(path: str, columns: dict[str, np.ndarray]) -> str:
    header = list(columns)
    data = [np.asarray(columns[name]).reshape(-1) for name in header]
    return write_csv(path, header, zip(*data))


def read_columns(path: str) -> dict[str, np.ndarray]:
    """Read a numeric CSV with a header row into named float columns."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path} is empty")
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name.strip(): data[:, i] for i, name in enumerate(header)}


def write_json(path: str, obj) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, indent=2)
        f.write("\n")
    return path
