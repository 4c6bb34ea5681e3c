"""End-to-end experiment orchestration shared by the CLI and the test suite.

One experiment: build (or accept) a network, warm it up, run the closed loop,
run the zero-control baseline from the same initial state, count fires, and
write trace.csv / control.csv / report.json plus the baseline trace.  The
report echoes the fully resolved configuration so a run can be audited and
reproduced from its output directory alone.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, config_as_dict
from .errors import ConfigurationError
from .metrics import FiringCountReport, build_report
from .model import NetworkGraph, NetworkState, Trace, simulate
from .mpc import RunResult, run_control
from .netgen import generate_network
from .reporting import (
    emit_controls,
    emit_report,
    emit_trace,
    load_controls,
    load_report,
    load_trace,
)
from .rng import Stream, substream
from .warmup import initialize


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    config: ExperimentConfig
    graph: NetworkGraph
    state0: NetworkState
    controlled: RunResult
    baseline_trace: Trace
    controlled_report: FiringCountReport
    baseline_report: FiringCountReport
    no_control: bool
    total_seconds: float

    @property
    def improvement(self) -> int:
        return self.controlled_report.objective - self.baseline_report.objective


def run_experiment(
    config: ExperimentConfig,
    *,
    graph: NetworkGraph | None = None,
    no_control: bool = False,
    verbose: bool = False,
) -> ExperimentResult:
    """Run one controlled experiment plus its zero-control baseline."""
    if graph is None:
        graph = generate_network(config.network)
    elif graph.n != config.network.n:
        raise ConfigurationError(
            f"supplied network has n={graph.n}, config says n={config.network.n}"
        )
    params = config.model
    tic = time.perf_counter()
    state0 = initialize(
        graph, params, config.init, substream(config.seed, Stream.WARMUP)
    )
    steps = config.mpc.total_steps(params.dt)
    baseline_trace = simulate(state0, np.zeros((steps, graph.n)), graph, params)

    if no_control:
        controlled = RunResult(trace=baseline_trace, histories=[], step_seconds=[])
    else:
        controlled = run_control(
            graph, params, state0, config.mpc, config.optimizer, verbose=verbose
        )
    total = time.perf_counter() - tic

    t_switch, t_end = config.mpc.t_switch, config.mpc.t_end
    return ExperimentResult(
        config=config,
        graph=graph,
        state0=state0,
        controlled=controlled,
        baseline_trace=baseline_trace,
        controlled_report=build_report(
            controlled.trace, graph.partition, t_switch, t_end
        ),
        baseline_report=build_report(
            baseline_trace, graph.partition, t_switch, t_end
        ),
        no_control=no_control,
        total_seconds=total,
    )


def _report_section(report: FiringCountReport) -> dict:
    return {
        "counts": {name: list(pair) for name, pair in report.counts.items()},
        "objective": report.objective,
        "ratios": list(report.ratios),
    }


def report_json(result: ExperimentResult, preset: str | None = None) -> dict:
    graph = result.graph
    inhibitory = [i for i, flag in enumerate(graph.inhibitory_mask) if flag]
    return {
        "preset": preset,
        "seed": result.config.seed,
        "no_control": result.no_control,
        "config": config_as_dict(result.config),
        "network": {
            "n": graph.n,
            "edge_count": len(graph.edges),
            "inhibitory": inhibitory,
            "partition": {
                "control": list(graph.partition.control),
                "module1": list(graph.partition.module1),
                "module2": list(graph.partition.module2),
            },
        },
        "intervals_ms": [
            list(result.controlled_report.intervals_ms[0]),
            list(result.controlled_report.intervals_ms[1]),
        ],
        "controlled": _report_section(result.controlled_report),
        "baseline": _report_section(result.baseline_report),
        "objective_improvement": result.improvement,
        "timing": {
            "per_step_seconds": list(result.controlled.step_seconds),
            "total_seconds": result.total_seconds,
        },
    }


def write_outputs(
    result: ExperimentResult, out_dir, preset: str | None = None
) -> dict[str, Path]:
    """Emit trace.csv, control.csv, report.json, baseline_trace.csv into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    threshold = result.config.model.firing_threshold
    paths = {
        "trace": out / "trace.csv",
        "control": out / "control.csv",
        "report": out / "report.json",
        "baseline_trace": out / "baseline_trace.csv",
    }
    emit_trace(result.controlled.trace, paths["trace"], threshold)
    emit_controls(
        result.controlled.trace, paths["control"], result.graph.partition.control
    )
    emit_trace(result.baseline_trace, paths["baseline_trace"], threshold)
    emit_report(report_json(result, preset), paths["report"])
    return paths


def validate_outputs(paths: dict[str, Path], result: ExperimentResult) -> None:
    """Reload everything just written and cross-check it against the live run."""
    reloaded = load_trace(paths["trace"], controls_path=paths["control"])
    if reloaded.n_steps != result.controlled.trace.n_steps:
        raise ConfigurationError("reloaded trace has the wrong step count")
    if not np.array_equal(reloaded.v, result.controlled.trace.v):
        raise ConfigurationError("reloaded potentials differ from the run")
    if not np.array_equal(reloaded.control, result.controlled.trace.control):
        raise ConfigurationError("reloaded controls differ from the run")
    report = load_report(paths["report"])
    recomputed = build_report(
        reloaded,
        result.graph.partition,
        result.config.mpc.t_switch,
        result.config.mpc.t_end,
    )
    if report["controlled"]["objective"] != recomputed.objective:
        raise ConfigurationError(
            "report objective does not match a recomputation from trace.csv"
        )
