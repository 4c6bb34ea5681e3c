"""Delimited trace/control output, the JSON report, and their loaders.

Floats are written with repr so every file round-trips bit-exactly; rows are
ordered step-major, then by neuron id.  trace.csv carries one row per state
per neuron, control.csv one row per step per actuated neuron.
"""

from __future__ import annotations

import csv
import json
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, FileFormatError
from .model import Trace

TRACE_COLUMNS = ("time_ms", "neuron_id", "v", "u", "fired")
CONTROL_COLUMNS = ("time_ms", "neuron_id", "i_control")


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_trace(trace: Trace, path, firing_threshold: float = 30.0) -> None:
    """Write states to CSV; the fired column is the threshold predicate per state."""
    fired_all = trace.v >= firing_threshold
    if trace.n_steps and not np.array_equal(fired_all[: trace.n_steps], trace.fired):
        raise ConfigurationError(
            "trace firing masks disagree with the threshold predicate"
        )
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for k in range(trace.v.shape[0]):
            t = _fmt(k * trace.dt)
            for i in range(trace.n):
                writer.writerow(
                    [t, i, _fmt(trace.v[k, i]), _fmt(trace.u[k, i]), int(fired_all[k, i])]
                )


def emit_controls(trace: Trace, path, control_ids: Sequence[int]) -> None:
    """Write the applied control currents for the actuated neurons only."""
    ids = sorted(int(i) for i in control_ids)
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CONTROL_COLUMNS)
        for k in range(trace.n_steps):
            t = _fmt(k * trace.dt)
            for i in ids:
                writer.writerow([t, i, _fmt(trace.control[k, i])])


def _read_rows(path, expected_header: Sequence[str]) -> list[list[str]]:
    with open(path, "r", newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FileFormatError(f"{path}:1: empty file, expected a header row")
        if header != list(expected_header):
            raise FileFormatError(
                f"{path}:1: bad header {header}, expected {list(expected_header)}"
            )
        return [row for row in reader if row]


def load_trace(path, controls_path=None) -> Trace:
    """Rebuild a Trace from trace.csv (and control.csv, when given).

    Controls default to zero for neurons absent from the control file, which is
    exact for any controlled run: the control-set constraint guarantees them.
    """
    rows = _read_rows(path, TRACE_COLUMNS)
    if not rows:
        return Trace(
            v=np.zeros((0, 0)), u=np.zeros((0, 0)),
            fired=np.zeros((0, 0), dtype=bool), control=np.zeros((0, 0)), dt=1.0,
        )
    try:
        times = np.asarray([float(r[0]) for r in rows])
        ids = np.asarray([int(r[1]) for r in rows])
        v_col = np.asarray([float(r[2]) for r in rows])
        u_col = np.asarray([float(r[3]) for r in rows])
        fired_col = np.asarray([int(r[4]) for r in rows], dtype=bool)
    except (ValueError, IndexError) as exc:
        raise FileFormatError(f"{path}: malformed data row: {exc}") from exc

    n = int(np.sum(times == times[0]))
    if n == 0 or len(rows) % n != 0:
        raise FileFormatError(f"{path}: row count {len(rows)} not divisible by n={n}")
    states = len(rows) // n
    dt = float(times[n] - times[0]) if states > 1 else 1.0
    v = v_col.reshape(states, n)
    u = u_col.reshape(states, n)
    fired = fired_col.reshape(states, n)[: states - 1]
    expected_ids = np.tile(np.arange(n), states)
    if not np.array_equal(ids, expected_ids):
        raise FileFormatError(f"{path}: neuron ids are not 0..{n - 1} per step")

    control = np.zeros((states - 1, n))
    if controls_path is not None:
        control = load_controls(controls_path, n, states - 1, dt)
    return Trace(v=v, u=u, fired=fired, control=control, dt=dt)


def load_controls(path, n: int, n_steps: int, dt: float) -> np.ndarray:
    """Read control.csv into a dense (steps, n) array, zero outside the file's ids."""
    rows = _read_rows(path, CONTROL_COLUMNS)
    control = np.zeros((n_steps, n))
    for row in rows:
        try:
            t, i, value = float(row[0]), int(row[1]), float(row[2])
        except (ValueError, IndexError) as exc:
            raise FileFormatError(f"{path}: malformed data row: {exc}") from exc
        k = int(round(t / dt))
        if not (0 <= k < n_steps and 0 <= i < n):
            raise FileFormatError(f"{path}: row for step {k}, neuron {i} out of range")
        control[k, i] = value
    return control


def emit_report(report: dict, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(report, fh, indent=2, allow_nan=False)
        fh.write("\n")


def load_report(path) -> dict:
    with open(path, "r", encoding="ascii") as fh:
        return json.load(fh)
