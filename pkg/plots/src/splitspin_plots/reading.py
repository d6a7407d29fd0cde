"""Readers for the sweep CSV artifacts.

Row files: one '# config sha256: ...' comment, a header, then data rows.
Field files: same comment, 'theta,phi,w' header, one row per grid node.
"""

import csv
import re

import numpy as np

ROW_COLUMNS = ("series", "axis", "theta_a", "n", "mu", "sigma", "la_star",
               "prob", "fq_density", "negativity")
FIELD_COLUMNS = ("theta", "phi", "w")

_TEXT_COLUMNS = {"series", "axis"}


class SchemaError(Exception):
    def __init__(self, path, column):
        super().__init__(f"{path}: missing column {column!r}")
        self.column = column


class EmptyInput(Exception):
    def __init__(self, path):
        super().__init__(f"{path}: no data rows")


def _read_table(path, required):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = None
        body = []
        for rec in reader:
            if not rec or rec[0].startswith("#"):
                continue
            if header is None:
                header = rec
            else:
                body.append(rec)
    if header is None:
        raise EmptyInput(path)
    for col in required:
        if col not in header:
            raise SchemaError(path, col)
    if not body:
        raise EmptyInput(path)
    return header, body


def read_rows(path):
    """Sweep rows as a dict of column arrays; blanks become NaN."""
    header, body = _read_table(path, ROW_COLUMNS)
    cols = {}
    for i, name in enumerate(header):
        raw = [rec[i] for rec in body]
        if name in _TEXT_COLUMNS:
            cols[name] = np.array(raw, dtype=object)
        else:
            cols[name] = np.array([float(v) if v else np.nan for v in raw])
    return cols


def read_field(path):
    """Wigner field file -> (theta, phi, w) with w shaped (nTheta, nPhi)."""
    header, body = _read_table(path, FIELD_COLUMNS)
    idx = [header.index(c) for c in FIELD_COLUMNS]
    data = np.array([[float(rec[i]) for i in idx] for rec in body])
    theta = np.unique(data[:, 0])
    phi = np.unique(data[:, 1])
    if theta.size * phi.size != data.shape[0]:
        raise EmptyInput(path)  # ragged grid; treat as unusable input
    order = np.lexsort((data[:, 1], data[:, 0]))
    w = data[order, 2].reshape(theta.size, phi.size)
    return theta, phi, w


_FIELD_NAME = re.compile(
    r"\.field\.la(?P<la>\d+)\.mu(?P<mu>[0-9.eE+-]+)\.sigma(?P<sigma>[0-9.eE+-]+)\.csv$")


def field_params(path):
    """(l_a, mu, sigma) parsed from a field file name; None if not one."""
    m = _FIELD_NAME.search(str(path))
    if not m:
        return None
    return int(m.group("la")), float(m.group("mu")), float(m.group("sigma"))


def split_inputs(paths):
    """Partition input paths into (row CSVs, field CSVs keyed by params)."""
    rows, fields = [], {}
    for p in paths:
        params = field_params(p)
        if params is None:
            rows.append(p)
        else:
            fields[params] = p
    return rows, fields
