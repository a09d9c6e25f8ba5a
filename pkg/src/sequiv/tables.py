"""Deterministic CSV/JSON rendering of result tables.

Floats are written with 17 significant digits in lowercase scientific
notation so that equal inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import numbers

import numpy as np


def format_float(v) -> str:
    return format(float(v), ".16e")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        return format_float(v)
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if v is None or isinstance(v, str):
        return v
    if isinstance(v, numbers.Integral):
        return int(v)
    if isinstance(v, numbers.Real):
        return float(v)
    if isinstance(v, numbers.Complex):
        return [float(v.real), float(v.imag)]
    return str(v)


def table_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def table_to_json(columns, rows) -> str:
    return json.dumps({"columns": list(columns), "rows": [[_json_value(v) for v in row] for row in rows]})
