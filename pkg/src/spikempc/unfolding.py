"""Differentiable multi-step rollout of the network and its control gradient.

A rollout unrolls the state transition over a fixed horizon, treating the
control currents of the actuated neurons as free parameters, and accumulates a
phase-dependent stage cost.  Before the switching step the cost drives module 1
toward threshold while damping potential movement in module 2; afterwards the
roles swap.

Gradients are computed by a purpose-built reverse pass over the recorded
rollout rather than a generic autodiff engine; the computation structure is
small and fixed, and this keeps results bit-reproducible.  Differentiation
conventions:

* the Euler/reset branch taken at each step is frozen as recorded;
* firing indicators in the cost are constants (no gradient through them);
* the reset branch has no current term, so it passes no gradient to controls;
* |x| differentiates to sign(x), with subgradient 0 at x = 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ContractViolation
from .model import (
    ModulePartition,
    NetworkGraph,
    NetworkState,
    NeuronParams,
    _advance,
    internal_currents,
    synapse_activation,
    synaptic_weights,
)


class CostPhase(enum.Enum):
    """Which module the stage cost is currently promoting."""

    PROMOTE_MODULE1 = 1
    PROMOTE_MODULE2 = 2


def phase_for_step(step: int, switch_step: int) -> CostPhase:
    """Module 1 is promoted strictly before the switching step, module 2 from it on."""
    return CostPhase.PROMOTE_MODULE1 if step < switch_step else CostPhase.PROMOTE_MODULE2


@dataclass(frozen=True)
class ControlPlan:
    """Horizon-length matrix of control currents, one column per actuated neuron."""

    values: np.ndarray  # (T, |control set|)

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ConfigurationError(f"plan must be 2-d, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ConfigurationError("plan contains non-finite entries")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def horizon(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @staticmethod
    def zeros(horizon: int, width: int) -> "ControlPlan":
        return ControlPlan(np.zeros((horizon, width)))

    def shifted(self) -> "ControlPlan":
        """Drop the first row and append a zero row (receding-horizon warm start)."""
        return ControlPlan(np.vstack([self.values[1:], np.zeros((1, self.width))]))


@dataclass(frozen=True, eq=False)
class RolloutTape:
    """Everything needed to replay a rollout in reverse: states, branches, synapses."""

    start_time: int
    switch_step: int
    v: np.ndarray            # (T+1, n)
    u: np.ndarray            # (T+1, n)
    fired: np.ndarray        # (T, n) bool; reset-branch selectors and cost indicators
    synapse: np.ndarray      # (T, n) activation of each source at each step
    stage_costs: np.ndarray  # (T,)
    control_width: int

    @property
    def horizon(self) -> int:
        return self.fired.shape[0]

    @property
    def n(self) -> int:
        return self.v.shape[1]

    @property
    def cost(self) -> float:
        return float(np.sum(self.stage_costs))


def _stage_terms(
    v_k: np.ndarray,
    v_k1: np.ndarray,
    mask_k: np.ndarray,
    phase: CostPhase,
    partition: ModulePartition,
    params: NeuronParams,
) -> float:
    dv = v_k1 - v_k
    if phase is CostPhase.PROMOTE_MODULE1:
        promote, suppress = partition.module1_idx, partition.module2_idx
    else:
        promote, suppress = partition.module2_idx, partition.module1_idx
    gap = (params.firing_threshold - params.c) - dv[promote]
    quiet = float(np.sum(gap[~mask_k[promote]]))
    still = float(np.sum(np.abs(dv[suppress])))
    return quiet + still


def stage_cost(
    state_k: NetworkState,
    state_k1: NetworkState,
    mask_k: np.ndarray,
    phase: CostPhase,
    partition: ModulePartition,
    params: NeuronParams,
) -> float:
    """One stage of the rollout cost.

    Promoted module: sum over its not-yet-fired neurons of
    (threshold - c) - (v[k+1] - v[k]), pushing potentials upward.  Suppressed
    module: sum of |v[k+1] - v[k]|, damping any movement.  Firing indicators
    come from ``mask_k`` and are treated as constants.
    """
    return _stage_terms(state_k.v, state_k1.v, np.asarray(mask_k), phase, partition, params)


def unfold_forward(
    state0: NetworkState,
    plan: ControlPlan,
    graph: NetworkGraph,
    params: NeuronParams,
    start_time: int,
    switch_step: int,
) -> tuple[RolloutTape, float]:
    """Roll the model forward over the plan's horizon and accumulate the cost.

    ``start_time`` is the absolute step index of the rollout's first stage;
    each stage picks its phase from its own absolute time, so a horizon that
    straddles the switching step mixes phases.
    """
    t_hor = plan.horizon
    if t_hor < 1:
        raise ConfigurationError("plan horizon must be at least 1")
    ctrl = graph.partition.control_idx
    if plan.width != ctrl.size:
        raise ConfigurationError(
            f"plan width {plan.width} != control set size {ctrl.size}"
        )
    if state0.n != graph.n:
        raise ConfigurationError("state and graph disagree on neuron count")

    n = graph.n
    weights = synaptic_weights(graph, params)
    adjacency = graph.adjacency
    v = np.empty((t_hor + 1, n))
    u = np.empty((t_hor + 1, n))
    fired = np.empty((t_hor, n), dtype=bool)
    synapse = np.empty((t_hor, n))
    stage = np.empty(t_hor)
    v[0], u[0] = state0.v, state0.u

    for step in range(t_hor):
        vk, uk = v[step], u[step]
        mask = vk >= params.firing_threshold
        act = synapse_activation(vk, params)
        i_total = adjacency @ (act * weights)
        i_total[ctrl] += plan.values[step]
        v[step + 1], u[step + 1] = _advance(vk, uk, i_total, params)
        fired[step] = mask
        synapse[step] = act
        phase = phase_for_step(start_time + step, switch_step)
        stage[step] = _stage_terms(vk, v[step + 1], mask, phase, graph.partition, params)

    tape = RolloutTape(
        start_time=start_time,
        switch_step=switch_step,
        v=v,
        u=u,
        fired=fired,
        synapse=synapse,
        stage_costs=stage,
        control_width=plan.width,
    )
    return tape, tape.cost


def grad_plan(
    tape: RolloutTape, graph: NetworkGraph, params: NeuronParams
) -> np.ndarray:
    """Exact reverse-mode derivative of the rollout cost w.r.t. every plan entry."""
    if tape.n != graph.n:
        raise ContractViolation(
            f"tape has {tape.n} neurons but graph has {graph.n}"
        )
    ctrl = graph.partition.control_idx
    if tape.control_width != ctrl.size:
        raise ContractViolation(
            f"tape plan width {tape.control_width} != control set size {ctrl.size}"
        )

    t_hor, n = tape.fired.shape
    dt = params.dt
    weights = synaptic_weights(graph, params)
    adj_t = graph.adjacency.T
    grad = np.zeros((t_hor, ctrl.size))
    gv = np.zeros(n)
    gu = np.zeros(n)

    for step in range(t_hor - 1, -1, -1):
        vk = tape.v[step]
        dv = tape.v[step + 1] - vk
        alive = ~tape.fired[step]
        phase = phase_for_step(tape.start_time + step, tape.switch_step)
        if phase is CostPhase.PROMOTE_MODULE1:
            promote, suppress = graph.partition.module1_idx, graph.partition.module2_idx
        else:
            promote, suppress = graph.partition.module2_idx, graph.partition.module1_idx

        # stage-cost sensitivities to v[step+1] (into gv now) and to v[step] (later)
        s_next = np.zeros(n)
        s_cur = np.zeros(n)
        live = alive[promote].astype(np.float64)
        s_next[promote] = -live
        s_cur[promote] = live
        sgn = np.sign(dv[suppress])
        s_next[suppress] = sgn
        s_cur[suppress] = -sgn
        gv = gv + s_next

        # transition backprop; the reset branch passes v through untouched and
        # blocks both the current and the recovery coupling
        g_current = gv * np.where(alive, dt, 0.0)
        grad[step] = g_current[ctrl]
        if params.hard_synapse:
            syn_back = np.zeros(n)
        else:
            act = tape.synapse[step]
            syn_back = (adj_t @ g_current) * (weights * params.sigma * act * (1.0 - act))
        gv_prev = (
            gv * np.where(alive, 1.0 + (0.08 * vk + 5.0) * dt, 1.0)
            + gu * np.where(alive, params.a * params.b * dt, 0.0)
            + syn_back
            + s_cur
        )
        gu_prev = gv * np.where(alive, -dt, 0.0) + gu * np.where(
            alive, 1.0 - params.a * dt, 1.0
        )
        gv, gu = gv_prev, gu_prev

    return grad


def finite_diff_grad(
    state0: NetworkState,
    plan: ControlPlan,
    graph: NetworkGraph,
    params: NeuronParams,
    start_time: int,
    switch_step: int,
    h: float = 1e-3,
) -> np.ndarray:
    """Central-difference gradient of the rollout cost, entry by entry.

    Independent of the reverse pass; used as its oracle.
    """
    if h <= 0:
        raise ConfigurationError("finite-difference step must be positive")
    base = plan.values
    grad = np.zeros_like(base)
    for step in range(base.shape[0]):
        for col in range(base.shape[1]):
            up = base.copy()
            up[step, col] += h
            down = base.copy()
            down[step, col] -= h
            _, c_up = unfold_forward(
                state0, ControlPlan(up), graph, params, start_time, switch_step
            )
            _, c_down = unfold_forward(
                state0, ControlPlan(down), graph, params, start_time, switch_step
            )
            grad[step, col] = (c_up - c_down) / (2.0 * h)
    return grad
