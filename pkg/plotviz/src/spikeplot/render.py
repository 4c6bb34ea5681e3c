"""Figure rendering from a run directory.

Every figure is written as PNG through the Agg backend with the Software
metadata key dropped, so identical inputs give identical bytes.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .io import load_control_table, load_run_report, load_trace_table

_SAVE_KWARGS = dict(dpi=120, metadata={"Software": None})


def _series_by_neuron(table, value_key):
    series = defaultdict(lambda: ([], []))
    for t, i, x in zip(table["time_ms"], table["neuron_id"], table[value_key]):
        ts, xs = series[i]
        ts.append(t)
        xs.append(x)
    return series


def _span_label(ids):
    ids = sorted(ids)
    if ids and ids == list(range(ids[0], ids[-1] + 1)):
        return f"{ids[0]}-{ids[-1]}"
    return ",".join(str(i) for i in ids)


def plot_traces(run_dir, out_dir) -> list[Path]:
    """One membrane-potential figure per module; marks the switching time."""
    run_dir, out_dir = Path(run_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = load_trace_table(run_dir / "trace.csv")
    meta = load_run_report(run_dir / "report.json")
    series = _series_by_neuron(table, "v")

    written = []
    for name in ("control", "module1", "module2"):
        ids = meta["partition"][name]
        fig, ax = plt.subplots(figsize=(6.0, 3.6))
        for i in ids:
            ts, vs = series.get(i, ([], []))
            ax.plot(ts, vs, linewidth=1.0, label=f"neuron {i}")
        ax.axvline(meta["t_switch"], color="k", linestyle="--", linewidth=0.8)
        ax.set_xlabel("time (ms)")
        ax.set_ylabel("membrane potential (mV)")
        ax.set_title(f"{name} (neurons {_span_label(ids)})")
        if ids:
            ax.legend(fontsize=7, ncol=2)
        fig.tight_layout()
        path = out_dir / f"potentials_{name}.png"
        fig.savefig(path, **_SAVE_KWARGS)
        plt.close(fig)
        written.append(path)
    return written


def plot_controls(run_dir, out_dir) -> Path:
    """Control-input time series for the actuated neurons, one figure."""
    run_dir, out_dir = Path(run_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = load_control_table(run_dir / "control.csv")
    series = _series_by_neuron(table, "i_control")

    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for i in sorted(series):
        ts, xs = series[i]
        ax.step(ts, xs, where="post", linewidth=1.0, label=f"neuron {i}")
    ax.set_xlabel("time (ms)")
    ax.set_ylabel("control current (mV)")
    ax.set_title("control inputs")
    if series:
        ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    path = out_dir / "control_inputs.png"
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path
