"""Receding-horizon closed loop around the rollout optimizer.

Each plant step: observe the full state, optimize a fixed-length plan starting
at the current time (warm-started from the previous solution, shifted by one),
apply only the plan's first row to the plant, advance, repeat.  The plant and
the prediction model are the same transition function, so feeding the applied
row back through the model reproduces the plant state exactly.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ContractViolation
from .model import NetworkGraph, NetworkState, NeuronParams, Trace, step_network
from .optimizer import OptimizerSettings, candidate_plans, optimize_multi_start
from .unfolding import ControlPlan


@dataclass(frozen=True)
class MpcConfig:
    """Horizon length, phase switch time, end time (ms), and warm-start toggle."""

    horizon: int = 10
    t_switch: float = 10.0
    t_end: float = 20.0
    warm_start: bool = True

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        if not 0.0 < self.t_switch < self.t_end:
            raise ConfigurationError(
                f"need 0 < t_switch < t_end, got {self.t_switch}, {self.t_end}"
            )

    def switch_step(self, dt: float) -> int:
        return int(round(self.t_switch / dt))

    def total_steps(self, dt: float) -> int:
        return int(round(self.t_end / dt))


@dataclass(frozen=True, eq=False)
class MpcStepResult:
    applied: np.ndarray     # full-width control row actually sent to the plant
    state: NetworkState     # plant state after the step
    fired: np.ndarray       # firing mask at the pre-step state
    plan: ControlPlan       # optimized plan whose row 0 was applied
    history: np.ndarray     # optimizer cost history for this step


def mpc_step(
    plant_state: NetworkState,
    graph: NetworkGraph,
    params: NeuronParams,
    cfg: MpcConfig,
    opt: OptimizerSettings,
    k: int,
    prev_plan: ControlPlan | None = None,
) -> MpcStepResult:
    """Optimize from the observed state at step k and apply the first input row."""
    if k >= cfg.total_steps(params.dt):
        raise ContractViolation(
            f"step {k} is at or past t_end={cfg.t_end} (dt={params.dt})"
        )
    width = graph.partition.control_idx.size
    warm_plan = prev_plan.shifted() if (cfg.warm_start and prev_plan is not None) else None
    schedule = opt.schedule(cfg.horizon)
    if schedule.iterations_per_increment == 0:
        # optimizer disabled: apply the warm-started (or zero) plan untouched
        starts = [warm_plan if warm_plan is not None else ControlPlan.zeros(cfg.horizon, width)]
    else:
        starts = candidate_plans(
            cfg.horizon, width, k, cfg.switch_step(params.dt),
            opt.multi_start_levels, warm_plan, graph,
        )
    result = optimize_multi_start(
        plant_state,
        graph,
        params,
        start_time=k,
        switch_step=cfg.switch_step(params.dt),
        schedule=schedule,
        starts=starts,
        adam_factory=opt.fresh_adam,
        clip=opt.clip,
    )
    applied = np.zeros(graph.n)
    applied[graph.partition.control_idx] = result.plan.values[0]
    new_state, mask = step_network(plant_state, applied, graph, params)
    return MpcStepResult(
        applied=applied, state=new_state, fired=mask, plan=result.plan,
        history=result.history,
    )


@dataclass(frozen=True, eq=False)
class RunResult:
    trace: Trace
    histories: list[np.ndarray]  # one optimizer cost history per plant step
    step_seconds: list[float]    # wall-clock time of each plant step


def run_control(
    graph: NetworkGraph,
    params: NeuronParams,
    state0: NetworkState,
    cfg: MpcConfig,
    opt: OptimizerSettings,
    *,
    verbose: bool = False,
) -> RunResult:
    """Run the closed loop from time 0 until t_end."""
    steps = cfg.total_steps(params.dt)
    n = graph.n
    v = np.empty((steps + 1, n))
    u = np.empty((steps + 1, n))
    fired = np.empty((steps, n), dtype=bool)
    control = np.zeros((steps, n))
    v[0], u[0] = state0.v, state0.u

    state = state0
    prev_plan: ControlPlan | None = None
    histories: list[np.ndarray] = []
    seconds: list[float] = []
    for k in range(steps):
        tic = time.perf_counter()
        step = mpc_step(state, graph, params, cfg, opt, k, prev_plan)
        seconds.append(time.perf_counter() - tic)
        control[k] = step.applied
        fired[k] = step.fired
        v[k + 1], u[k + 1] = step.state.v, step.state.u
        state, prev_plan = step.state, step.plan
        histories.append(step.history)
        if verbose:
            print(
                f"step {k:3d}: cost {step.history[-1]:12.4f}  "
                f"fired {int(np.sum(step.fired))}  ({seconds[-1]:.2f}s)",
                file=sys.stderr,
            )

    trace = Trace(v=v, u=u, fired=fired, control=control, dt=params.dt)
    return RunResult(trace=trace, histories=histories, step_seconds=seconds)
