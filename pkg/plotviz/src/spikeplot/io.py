"""Strict readers for the run-directory contract: trace.csv, control.csv, report.json.

These parse only the documented columns and fail loudly, naming the missing
column or key, so schema drift in either package surfaces immediately.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path


class SchemaError(Exception):
    """Input file does not match the documented run-directory schema."""


TRACE_COLUMNS = ("time_ms", "neuron_id", "v", "u", "fired")
CONTROL_COLUMNS = ("time_ms", "neuron_id", "i_control")


def read_columns(path: Path, required: tuple[str, ...]) -> dict[str, list]:
    """Read a CSV into per-column lists, checking every required column exists."""
    try:
        with open(path, "r", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty file, expected a header row")
            for column in required:
                if column not in header:
                    raise SchemaError(f"{path}: missing required column {column!r}")
            index = {column: header.index(column) for column in required}
            data: dict[str, list] = {column: [] for column in required}
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                for column in required:
                    try:
                        data[column].append(row[index[column]])
                    except IndexError:
                        raise SchemaError(
                            f"{path}:{lineno}: row has no value for column {column!r}"
                        )
            return data
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def load_trace_table(path: Path) -> dict[str, list]:
    raw = read_columns(path, TRACE_COLUMNS)
    try:
        return {
            "time_ms": [float(x) for x in raw["time_ms"]],
            "neuron_id": [int(x) for x in raw["neuron_id"]],
            "v": [float(x) for x in raw["v"]],
        }
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric value: {exc}") from exc


def load_control_table(path: Path) -> dict[str, list]:
    raw = read_columns(path, CONTROL_COLUMNS)
    try:
        return {
            "time_ms": [float(x) for x in raw["time_ms"]],
            "neuron_id": [int(x) for x in raw["neuron_id"]],
            "i_control": [float(x) for x in raw["i_control"]],
        }
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric value: {exc}") from exc


def load_run_report(path: Path) -> dict:
    """Report JSON with the partition listing and the switch time."""
    try:
        with open(path, "r") as fh:
            report = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    try:
        partition = report["network"]["partition"]
        modules = {
            name: [int(i) for i in partition[name]]
            for name in ("control", "module1", "module2")
        }
    except KeyError as exc:
        raise SchemaError(f"{path}: missing report key {exc}") from exc
    try:
        t_switch = float(report["config"]["mpc"]["t_switch"])
    except KeyError as exc:
        raise SchemaError(f"{path}: missing report key {exc}") from exc
    return {"partition": modules, "t_switch": t_switch}
