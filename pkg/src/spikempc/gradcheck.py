"""Seeded comparison of the reverse-pass gradient against central differences.

Each sample jitters the supplied operating state, draws a random plan over a
short rollout horizon, and skips the sample when its trajectory comes too
close to a nonsmooth point: any reachable potential within 1 mV of the firing
threshold, or a module neuron's per-step potential change within 1e-6 of zero
(the kink of the absolute-value cost term).  Surviving samples must match
central differences at h to the configured relative tolerance.

Rollout horizons are kept short (2-3 steps) on purpose.  The model's spike
onset amplifies perturbations by up to ~8x per step, so over long rollouts the
difference quotient's truncation error swamps the comparison at h = 1e-3 even
on branch-free trajectories; short lags keep the oracle in its asymptotic
regime while still exercising every path of the reverse pass (synaptic
chains, both cost phases, frozen reset branches).  Entries where both
gradients sit below ``denom_floor`` count as agreeing zeros: with costs of
magnitude ~1e3 a double-precision difference quotient cannot resolve below
~1e-9 absolute, and the floor stays five orders of magnitude above that.

The same sampling can run with the hard-step synapse, where the useful result
is the opposite one: the fraction of control-entry gradients that are exactly
zero, demonstrating why the smoothed coupling is needed at all.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .model import NetworkGraph, NetworkState, NeuronParams
from .rng import Stream, substream
from .unfolding import ControlPlan, finite_diff_grad, grad_plan, unfold_forward
from .warmup import InitConfig, initialize


@dataclass(frozen=True)
class GradCheckSettings:
    samples: int = 100
    h: float = 1e-3
    rel_tol: float = 1e-4
    horizons: tuple[int, ...] = (2, 3)
    plan_low: float = 0.0
    plan_high: float = 20.0
    # the battery kicks the network harder than the experiment warm-up so
    # rollouts actually reach the sigmoid's responsive band
    state_warmup_high: float = 18.0
    state_jitter_v: float = 2.0
    state_jitter_u: float = 0.5
    boundary_margin_mv: float = 1.0
    kink_margin: float = 1e-6
    denom_floor: float = 1e-4
    max_excluded_fraction: float = 0.5
    pathology_horizon: int = 10


@dataclass(frozen=True)
class GradCheckResult:
    samples: int
    excluded: int
    checked: int
    live_entries: int
    max_rel_error: float
    failures: int

    @property
    def excluded_fraction(self) -> float:
        return self.excluded / self.samples if self.samples else 0.0

    def passed(self, settings: GradCheckSettings) -> bool:
        return (
            self.failures == 0
            and self.checked > 0
            and self.live_entries > 0
            and self.max_rel_error <= settings.rel_tol
            and self.excluded_fraction <= settings.max_excluded_fraction
        )


def _near_boundary(tape, graph: NetworkGraph, params: NeuronParams,
                   settings: GradCheckSettings) -> bool:
    # states 1..T are the perturbable ones; state 0 is fixed by the caller
    reachable = tape.v[1:]
    if np.any(np.abs(reachable - params.firing_threshold) < settings.boundary_margin_mv):
        return True
    modules = np.concatenate(
        [graph.partition.module1_idx, graph.partition.module2_idx]
    )
    dv = np.diff(tape.v, axis=0)[:, modules]
    return bool(np.any(np.abs(dv) < settings.kink_margin))


def relative_errors(
    reference: np.ndarray, candidate: np.ndarray, denom_floor: float
) -> np.ndarray:
    """Entrywise |a - b| / max(|a|, |b|); zero where both sides are below the floor."""
    denom = np.maximum(np.abs(reference), np.abs(candidate))
    err = np.zeros_like(denom)
    live = denom >= denom_floor
    err[live] = np.abs(reference - candidate)[live] / denom[live]
    return err


def _sample(
    rng: np.random.Generator,
    index: int,
    base_state: NetworkState,
    width: int,
    total_steps: int,
    settings: GradCheckSettings,
    horizon: int | None = None,
) -> tuple[NetworkState, ControlPlan, int]:
    t_hor = horizon if horizon is not None else settings.horizons[index % len(settings.horizons)]
    plan = ControlPlan(
        rng.uniform(settings.plan_low, settings.plan_high, size=(t_hor, width))
    )
    state = NetworkState(
        v=base_state.v + rng.uniform(-settings.state_jitter_v, settings.state_jitter_v,
                                     size=base_state.n),
        u=base_state.u + rng.uniform(-settings.state_jitter_u, settings.state_jitter_u,
                                     size=base_state.n),
    )
    start_time = (3 * index) % max(total_steps, 1)  # mixes both cost phases
    return state, plan, start_time


def _battery_state(
    graph: NetworkGraph, params: NeuronParams, seed: int,
    settings: GradCheckSettings,
) -> NetworkState:
    kick = InitConfig(current_low=0.0, current_high=settings.state_warmup_high)
    return initialize(graph, params, kick, substream(seed, Stream.GRADCHECK))


def run_gradient_check(
    graph: NetworkGraph,
    params: NeuronParams,
    switch_step: int,
    total_steps: int,
    seed: int,
    settings: GradCheckSettings = GradCheckSettings(),
) -> GradCheckResult:
    """Compare reverse-pass and finite-difference gradients on seeded random samples."""
    base_state = _battery_state(graph, params, seed, settings)
    width = graph.partition.control_idx.size
    excluded = 0
    checked = 0
    live_entries = 0
    failures = 0
    max_err = 0.0
    for s in range(settings.samples):
        rng = substream(seed, Stream.GRADCHECK, index=s + 1)
        state0, plan, start_time = _sample(
            rng, s, base_state, width, total_steps, settings
        )
        tape, _ = unfold_forward(state0, plan, graph, params, start_time, switch_step)
        if _near_boundary(tape, graph, params, settings):
            excluded += 1
            continue
        analytic = grad_plan(tape, graph, params)
        numeric = finite_diff_grad(
            state0, plan, graph, params, start_time, switch_step, h=settings.h
        )
        errs = relative_errors(numeric, analytic, settings.denom_floor)
        worst = float(errs.max()) if errs.size else 0.0
        max_err = max(max_err, worst)
        if worst > settings.rel_tol:
            failures += 1
        live_entries += int(
            np.sum(np.maximum(np.abs(numeric), np.abs(analytic)) >= settings.denom_floor)
        )
        checked += 1
    return GradCheckResult(
        samples=settings.samples, excluded=excluded, checked=checked,
        live_entries=live_entries, max_rel_error=max_err, failures=failures,
    )


@dataclass(frozen=True)
class PathologyResult:
    samples: int
    total_entries: int
    zero_entries: int

    @property
    def zero_fraction(self) -> float:
        return self.zero_entries / self.total_entries if self.total_entries else 0.0


def run_zero_gradient_demo(
    graph: NetworkGraph,
    params: NeuronParams,
    switch_step: int,
    total_steps: int,
    seed: int,
    settings: GradCheckSettings = GradCheckSettings(),
) -> PathologyResult:
    """Gradient census under the hard-step synapse: how many entries are exactly 0."""
    hard = replace(params, hard_synapse=True)
    base_state = _battery_state(graph, params, seed, settings)
    width = graph.partition.control_idx.size
    total = 0
    zeros = 0
    for s in range(settings.samples):
        rng = substream(seed, Stream.GRADCHECK, index=s + 1)
        state0, plan, start_time = _sample(
            rng, s, base_state, width, total_steps, settings,
            horizon=settings.pathology_horizon,
        )
        tape, _ = unfold_forward(state0, plan, graph, hard, start_time, switch_step)
        grad = grad_plan(tape, graph, hard)
        total += grad.size
        zeros += int(np.sum(grad == 0.0))
    return PathologyResult(samples=settings.samples, total_entries=total, zero_entries=zeros)
