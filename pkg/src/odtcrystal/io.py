"""CSV and JSON plumbing shared by the command-line tools.

Floats are always written with 9 significant digits so identical inputs
give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .survival import SurvivalObservation

__all__ = [
    "OBSERVATION_COLUMNS",
    "ObservationFormatError",
    "format_value",
    "to_csv",
    "to_json",
    "read_observations",
    "write_observations",
]

OBSERVATION_COLUMNS = ("power_W", "n_ions", "successes", "attempts")


class ObservationFormatError(ValueError):
    def __init__(self, problems):
        self.problems = problems
        lines = ", ".join(str(line) for line, _ in problems)
        detail = "; ".join(f"line {line}: {msg}" for line, msg in problems)
        super().__init__(f"malformed observation rows at line(s) {lines}: {detail}")


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return format(float(value), ".9g")
    return str(value)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _rounded(obj):
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_rounded(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return None
        return float(format(float(obj), ".9g"))
    return obj


def to_json(obj) -> str:
    return json.dumps(_rounded(obj), indent=2, ensure_ascii=False) + "\n"


def read_observations(source) -> list[SurvivalObservation]:
    """Parse survival counts from a CSV path or open text stream.

    Every malformed row is collected before raising, so the error lists all
    offending line numbers at once.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, newline="", encoding="utf-8") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ObservationFormatError([(1, "empty file")]) from None
    missing = [c for c in OBSERVATION_COLUMNS if c not in header]
    if missing:
        raise ObservationFormatError([(1, f"missing column(s) {', '.join(missing)}")])
    idx = {c: header.index(c) for c in OBSERVATION_COLUMNS}
    observations, problems = [], []
    for line, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            if len(row) != len(header):
                raise ValueError(f"expected {len(header)} fields, got {len(row)}")
            power = float(row[idx["power_W"]])
            n_ions, successes, attempts = (
                int(row[idx[c]]) for c in ("n_ions", "successes", "attempts")
            )
            observations.append(SurvivalObservation(power, n_ions, successes, attempts))
        except ValueError as exc:
            problems.append((line, str(exc)))
    if problems:
        raise ObservationFormatError(problems)
    return observations


def write_observations(observations) -> str:
    rows = [(o.power, o.n_ions, o.successes, o.attempts) for o in observations]
    return to_csv(OBSERVATION_COLUMNS, rows)
