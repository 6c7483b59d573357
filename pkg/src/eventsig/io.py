"""CSV readers and writers for spike trains, signals and detections.

Times are written with ``%.17g`` so they round-trip exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import SpikeTrain, UniformSignal
from .errors import ParseError

__all__ = [
    "read_csv_columns",
    "read_spikes_csv",
    "write_spikes_csv",
    "read_signal_csv",
    "write_signal_csv",
    "write_detections_csv",
    "csv_kind",
]

_FMT = "%.17g"


def read_csv_columns(path, required):
    """Read a headed numeric CSV and return ``{column: array}`` for ``required``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(f"{path}: missing column(s) {', '.join(missing)}", 1)
        cols = [header.index(c) for c in required]
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            try:
                rows.append([float(row[c]) for c in cols])
            except (ValueError, IndexError):
                raise ParseError(f"{path}: bad numeric row {row!r}", line_no) from None
    arr = np.asarray(rows, dtype=float).reshape(-1, len(required))
    return {c: arr[:, k] for k, c in enumerate(required)}


def csv_kind(path) -> str:
    """``'spikes'`` or ``'signal'`` depending on the header columns."""
    with open(path, newline="") as fh:
        header = [h.strip() for h in next(csv.reader(fh), [])]
    if "amplitude" in header:
        return "spikes"
    if "value" in header:
        return "signal"
    raise ParseError(f"{path}: header must contain 'amplitude' or 'value'", 1)


def read_spikes_csv(path) -> SpikeTrain:
    cols = read_csv_columns(path, ["t", "amplitude"])
    t = cols["t"]
    if t.size > 1 and not np.all(np.diff(t) > 0):
        raise ParseError(f"{path}: spike times must be strictly increasing")
    return SpikeTrain(t, cols["amplitude"])


def write_spikes_csv(path, train: SpikeTrain):
    data = np.column_stack([train.times, train.amplitudes])
    np.savetxt(path, data, fmt=_FMT, delimiter=",", header="t,amplitude", comments="")


def read_signal_csv(path) -> UniformSignal:
    """Read ``t,value`` rows sampled on a uniform grid."""
    cols = read_csv_columns(path, ["t", "value"])
    t = cols["t"]
    if t.size < 2:
        raise ParseError(f"{path}: need at least two samples to infer the sample period")
    steps = np.diff(t)
    dt = float(np.mean(steps))
    if not dt > 0 or np.max(np.abs(steps - dt)) > 1e-6 * dt:
        raise ParseError(f"{path}: samples are not uniformly spaced")
    return UniformSignal(float(t[0]), dt, cols["value"])


def write_signal_csv(path, x: UniformSignal):
    data = np.column_stack([x.times, x.samples])
    np.savetxt(path, data, fmt=_FMT, delimiter=",", header="t,value", comments="")


def write_detections_csv(path, detections):
    t = np.asarray([d.t for d in detections], dtype=float)
    np.savetxt(Path(path), t.reshape(-1, 1), fmt=_FMT, header="t", comments="")
