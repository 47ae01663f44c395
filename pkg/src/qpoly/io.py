"""State files and report serialisation.

State files are UTF-8 JSON::

    {"dims": [2, 2], "labels": ["A", "B1"], "kind": "pure" | "mixed",
     "data": [[re, im], ...]}

``data`` holds the amplitudes of a pure state, or the rows of a density
matrix for a mixed one (each row a list of ``[re, im]`` pairs). Floats are
written with Python's shortest round-trip repr, so load followed by save
reproduces a file byte for byte.
"""

import csv
import io
import json

import numpy as np

from .tensor import DensityOperator, StateVector, SystemLayout

CSV_COLUMNS = ("check", "lhs", "middle", "rhs", "slack1", "slack2", "tolerance", "verdict")
TIMING_KEY = "timing"


def _pairs(values):
    return [[float(z.real), float(z.imag)] for z in values]


def _complex(pairs):
    arr = np.asarray(pairs, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(state):
    layout = state.layout
    out = {"dims": list(layout.dims), "labels": list(layout.labels)}
    if isinstance(state, StateVector):
        out["kind"] = "pure"
        out["data"] = _pairs(state.amplitudes)
    else:
        out["kind"] = "mixed"
        out["data"] = [_pairs(row) for row in state.matrix]
    return out


def state_from_dict(obj):
    try:
        dims, labels, kind, data = obj["dims"], obj["labels"], obj["kind"], obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"state file is missing field {exc}") from None
    layout = SystemLayout.from_dims(dims, labels)
    if kind == "pure":
        return StateVector(layout, _complex(data))
    if kind == "mixed":
        return DensityOperator(layout, _complex(data))
    raise ValueError(f"state kind must be 'pure' or 'mixed', got {kind!r}")


def dumps_state(state):
    return json.dumps(state_to_dict(state), sort_keys=True, allow_nan=False) + "\n"


def loads_state(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"state file is not valid JSON: {exc}") from None
    return state_from_dict(obj)


def save_state(state, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_state(state))


def load_state(path):
    with open(path, encoding="utf-8") as fh:
        return loads_state(fh.read())


def without_timing(record):
    """Copy of a report with every timing entry removed, at any depth."""
    if isinstance(record, dict):
        return {k: without_timing(v) for k, v in record.items() if k != TIMING_KEY}
    if isinstance(record, list):
        return [without_timing(v) for v in record]
    return record


def dumps_report(record, timing=True):
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    if not timing:
        record = without_timing(record)
    return json.dumps(record, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _cell(value):
    return "" if value is None else value


def report_rows(record):
    """CSV rows for every check in a report (fuzz reports are flattened per trial)."""
    if "trials" in record:
        rows = []
        for t in record["trials"]:
            for row in report_rows(t):
                row["check"] = f"trial{t['trial']}:{row['check']}"
                rows.append(row)
        return rows
    return [{col: _cell(check.get(col)) for col in CSV_COLUMNS} for check in record["checks"]]


def dumps_csv(record):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(report_rows(record))
    return buf.getvalue()


def write_text(text, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
