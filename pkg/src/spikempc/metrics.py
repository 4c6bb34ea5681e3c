"""Firing-count bookkeeping and the dominance objective.

Counting convention: a neuron counts one fire for every step k with
t_a <= k*dt < t_b whose firing mask is set.  Intervals are half-open so the
two evaluation windows share no boundary step and nothing is double-counted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError
from .model import ModulePartition, Trace


def firing_count(
    trace: Trace, module: Iterable[int], interval: Sequence[float]
) -> int:
    """Total fires of the given neurons over the half-open interval [t_a, t_b) ms."""
    t_a, t_b = float(interval[0]), float(interval[1])
    extent = trace.n_steps * trace.dt
    if not (0.0 <= t_a <= t_b <= extent):
        raise ConfigurationError(
            f"interval [{t_a}, {t_b}) outside trace extent [0, {extent})"
        )
    idx = np.asarray(sorted(int(i) for i in module), dtype=np.intp)
    if idx.size and not (0 <= idx[0] and idx[-1] < trace.n):
        raise ConfigurationError("module index outside the trace's neuron range")
    times = np.arange(trace.n_steps) * trace.dt
    rows = (times >= t_a) & (times < t_b)
    if not rows.any() or idx.size == 0:
        return 0
    return int(trace.fired[rows][:, idx].sum())


def objective_value(f_m1_i1: int, f_m2_i1: int, f_m1_i2: int, f_m2_i2: int) -> int:
    """Dominance objective: (m1 - m2 over interval 1) + (m2 - m1 over interval 2)."""
    return (f_m1_i1 - f_m2_i1) + (f_m2_i2 - f_m1_i2)


@dataclass(frozen=True)
class FiringCountReport:
    """Per-module counts over both intervals, the objective, and dominance ratios.

    ``ratios`` holds (target count / other count) per interval: module1 over
    module2 in the first window, module2 over module1 in the second; None when
    the denominator is zero.
    """

    counts: dict[str, tuple[int, int]]  # module name -> (interval1, interval2)
    objective: int
    ratios: tuple[float | None, float | None]
    intervals_ms: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self) -> None:
        m1 = self.counts["module1"]
        m2 = self.counts["module2"]
        if self.objective != objective_value(m1[0], m2[0], m1[1], m2[1]):
            raise ConfigurationError("stored objective disagrees with the raw counts")


def build_report(
    trace: Trace, partition: ModulePartition, t_switch: float, t_end: float
) -> FiringCountReport:
    """Count fires per module over [0, t_switch) and [t_switch, t_end)."""
    first = (0.0, float(t_switch))
    second = (float(t_switch), float(t_end))
    counts = {
        name: (
            firing_count(trace, idx, first),
            firing_count(trace, idx, second),
        )
        for name, idx in (
            ("control", partition.control),
            ("module1", partition.module1),
            ("module2", partition.module2),
        )
    }
    m1, m2 = counts["module1"], counts["module2"]
    ratios = (
        m1[0] / m2[0] if m2[0] > 0 else None,
        m2[1] / m1[1] if m1[1] > 0 else None,
    )
    return FiringCountReport(
        counts=counts,
        objective=objective_value(m1[0], m2[0], m1[1], m2[1]),
        ratios=ratios,
        intervals_ms=(first, second),
    )


def _span(indices: tuple[int, ...]) -> str:
    if not indices:
        return "empty"
    lo, hi = indices[0], indices[-1]
    if indices == tuple(range(lo, hi + 1)):
        return f"{lo}-{hi}"
    return ",".join(str(i) for i in indices)


def format_table(report: FiringCountReport, partition: ModulePartition) -> str:
    """Render the per-module fire counts in a two-interval table."""
    (a0, a1), (b0, b1) = report.intervals_ms
    head_1 = f"{a0:g} <= t < {a1:g}"
    head_2 = f"{b0:g} <= t < {b1:g}"
    rows = [
        ("module1", _span(partition.module1)),
        ("module2", _span(partition.module2)),
    ]
    label_w = max(len(f"{name} ({span})") for name, span in rows)
    lines = [f"{'':{label_w}}  {head_1:>14}  {head_2:>14}"]
    for name, span in rows:
        c1, c2 = report.counts[name]
        lines.append(f"{f'{name} ({span})':{label_w}}  {c1:>14}  {c2:>14}")
    lines.append(f"objective: {report.objective}")
    return "\n".join(lines)
