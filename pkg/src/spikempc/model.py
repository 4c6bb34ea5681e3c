"""Discrete-time Izhikevich network dynamics with spike reset and sigmoid synapses.

This is the single state-transition shared by the simulated plant and the
controller's prediction rollouts: explicit Euler on the two-variable Izhikevich
equations while a neuron sits below threshold, and a fixed reset jump on any
step where the potential has reached threshold.  Synaptic coupling is additive;
each in-neighbor contributes its sigmoid-squashed potential times a signed
magnitude (positive for excitatory sources, negative for inhibitory ones), so
currents stay differentiable through firing events.

Update order within one step is synchronous: firing flags and internal currents
are evaluated on the incoming state for every neuron before any neuron advances.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.special import expit

from .errors import ConfigurationError, ContractViolation


class NeuronKind(enum.Enum):
    """Whether a neuron's activity injects positive or negative current downstream."""

    EXCITATORY = "excitatory"
    INHIBITORY = "inhibitory"


@dataclass(frozen=True)
class NeuronParams:
    """Neuron constants plus the shared synapse and discretization settings.

    Defaults are the fast-spiking regime used throughout: a=0.1, b=0.2, c=-65,
    d=2, synaptic magnitudes +15 mV (excitatory) and -3 mV (inhibitory),
    sigmoid steepness 0.38 around a 20 mV center, and a 1 ms step.

    ``hard_synapse`` swaps the sigmoid for a hard step at the sigmoid center.
    It exists to demonstrate the zero-gradient failure of non-smoothed
    coupling and is off by default.
    """

    a: float = 0.1
    b: float = 0.2
    c: float = -65.0
    d: float = 2.0
    i_ex: float = 15.0
    i_in: float = -3.0
    sigma: float = 0.38
    firing_threshold: float = 30.0
    sigmoid_center: float = 20.0
    dt: float = 1.0
    hard_synapse: bool = False

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.sigma <= 0:
            raise ConfigurationError(f"sigma must be positive, got {self.sigma}")
        if self.i_ex <= 0:
            raise ConfigurationError(f"i_ex must be positive, got {self.i_ex}")
        if self.i_in >= 0:
            raise ConfigurationError(f"i_in must be negative, got {self.i_in}")


def _index_tuple(values: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(int(i) for i in values))


@dataclass(frozen=True)
class ModulePartition:
    """Disjoint split of neuron indices into the actuated set and two target modules."""

    control: tuple[int, ...]
    module1: tuple[int, ...]
    module2: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "control", _index_tuple(self.control))
        object.__setattr__(self, "module1", _index_tuple(self.module1))
        object.__setattr__(self, "module2", _index_tuple(self.module2))
        total = len(self.control) + len(self.module1) + len(self.module2)
        merged = set(self.control) | set(self.module1) | set(self.module2)
        if len(merged) != total:
            raise ConfigurationError("partition sets must be pairwise disjoint")

    @property
    def n(self) -> int:
        return len(self.control) + len(self.module1) + len(self.module2)

    @cached_property
    def control_idx(self) -> np.ndarray:
        return np.asarray(self.control, dtype=np.intp)

    @cached_property
    def module1_idx(self) -> np.ndarray:
        return np.asarray(self.module1, dtype=np.intp)

    @cached_property
    def module2_idx(self) -> np.ndarray:
        return np.asarray(self.module2, dtype=np.intp)

    @cached_property
    def non_control_idx(self) -> np.ndarray:
        return np.asarray(sorted(set(self.module1) | set(self.module2)), dtype=np.intp)


@dataclass(frozen=True)
class NetworkGraph:
    """Directed connectivity with per-neuron kind labels and a module partition.

    An edge ``(j, i)`` means j is an in-neighbor of i: when j is active, i
    receives current from it.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    kinds: tuple[NeuronKind, ...]
    partition: ModulePartition

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "edges", frozenset((int(j), int(i)) for j, i in self.edges)
        )
        object.__setattr__(self, "kinds", tuple(self.kinds))
        if len(self.kinds) != self.n:
            raise ConfigurationError(
                f"expected {self.n} neuron kinds, got {len(self.kinds)}"
            )
        for j, i in self.edges:
            if j == i:
                raise ConfigurationError(f"self-loop on neuron {i} is not allowed")
            if not (0 <= j < self.n and 0 <= i < self.n):
                raise ConfigurationError(f"edge ({j}, {i}) outside 0..{self.n - 1}")
        covered = (
            set(self.partition.control)
            | set(self.partition.module1)
            | set(self.partition.module2)
        )
        if covered != set(range(self.n)):
            raise ConfigurationError("partition must cover every neuron exactly once")

    def in_neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(sorted(j for j, k in self.edges if k == i))

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense in-adjacency: ``adjacency[i, j] == 1.0`` iff edge j -> i exists."""
        a = np.zeros((self.n, self.n))
        for j, i in self.edges:
            a[i, j] = 1.0
        a.setflags(write=False)
        return a

    @cached_property
    def inhibitory_mask(self) -> np.ndarray:
        mask = np.asarray([k is NeuronKind.INHIBITORY for k in self.kinds])
        mask.setflags(write=False)
        return mask


@dataclass(frozen=True, eq=False)
class NetworkState:
    """Membrane potentials and recovery variables of every neuron at one step."""

    v: np.ndarray
    u: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.v, dtype=np.float64)
        u = np.array(self.u, dtype=np.float64)
        if v.shape != u.shape or v.ndim != 1:
            raise ConfigurationError(
                f"state vectors must be 1-d and equal length, got {v.shape} / {u.shape}"
            )
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(u))):
            raise ConfigurationError("state contains non-finite values")
        v.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "u", u)

    @property
    def n(self) -> int:
        return self.v.shape[0]


@dataclass(frozen=True, eq=False)
class Trace:
    """Time-indexed record of a rollout: K+1 states, K firing masks, K control rows."""

    v: np.ndarray        # (K+1, n)
    u: np.ndarray        # (K+1, n)
    fired: np.ndarray    # (K, n) bool
    control: np.ndarray  # (K, n)
    dt: float

    def __post_init__(self) -> None:
        for name in ("v", "u", "fired", "control"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        k = self.fired.shape[0]
        if self.v.shape != self.u.shape or self.v.shape[0] != k + 1:
            raise ConfigurationError("trace arrays have inconsistent step counts")
        if self.control.shape != self.fired.shape:
            raise ConfigurationError("trace control/fired shapes differ")

    @property
    def n_steps(self) -> int:
        return self.fired.shape[0]

    @property
    def n(self) -> int:
        return self.v.shape[1]

    def state(self, k: int) -> NetworkState:
        return NetworkState(v=self.v[k], u=self.u[k])


def soft_threshold(v, params: NeuronParams):
    """Sigmoid squashing of a presynaptic potential into (0, 1).

    Strictly increasing, 0.5 at the sigmoid center, and symmetric about it.
    Accepts scalars or arrays.
    """
    return expit(params.sigma * (np.asarray(v, dtype=np.float64) - params.sigmoid_center))


def synapse_activation(v, params: NeuronParams):
    """Per-source activation used in synaptic currents; sigmoid or hard step."""
    if params.hard_synapse:
        return (np.asarray(v, dtype=np.float64) >= params.sigmoid_center).astype(np.float64)
    return soft_threshold(v, params)


def synaptic_weights(graph: NetworkGraph, params: NeuronParams) -> np.ndarray:
    """Signed per-source magnitude: i_ex for excitatory neurons, i_in for inhibitory."""
    return np.where(graph.inhibitory_mask, params.i_in, params.i_ex)


def internal_current(
    state: NetworkState, graph: NetworkGraph, i: int, params: NeuronParams
) -> float:
    """Summed synaptic current into neuron i from its in-neighbors."""
    if not 0 <= i < graph.n:
        raise ConfigurationError(f"neuron index {i} outside 0..{graph.n - 1}")
    act = synapse_activation(state.v, params) * synaptic_weights(graph, params)
    return float(graph.adjacency[i] @ act)


def internal_currents(
    v: np.ndarray, graph: NetworkGraph, params: NeuronParams
) -> np.ndarray:
    """Synaptic currents into all neurons at once, from one potential vector."""
    return graph.adjacency @ (synapse_activation(v, params) * synaptic_weights(graph, params))


def firing_mask(state: NetworkState, params: NeuronParams) -> np.ndarray:
    """Boolean per-neuron firing indicator: potential at or above threshold."""
    return state.v >= params.firing_threshold


def step_neuron(
    v: float, u: float, i_total: float, params: NeuronParams
) -> tuple[float, float]:
    """Advance a single neuron one step.

    Below threshold: Euler update of both variables with the given total
    current.  At or above threshold: the reset branch, v - (threshold - c) and
    u + d, which ignores the input current entirely.  The reset subtracts a
    fixed amount rather than clamping, so an overshooting potential lands
    above c.
    """
    if v < params.firing_threshold:
        v_next = v + (0.04 * v * v + 5.0 * v + 140.0 - u + i_total) * params.dt
        u_next = u + params.a * (params.b * v - u) * params.dt
    else:
        v_next = v - (params.firing_threshold - params.c)
        u_next = u + params.d
    return v_next, u_next


def _advance(
    v: np.ndarray, u: np.ndarray, i_total: np.ndarray, params: NeuronParams
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized step_neuron over the whole network; callers supply i_total."""
    fired = v >= params.firing_threshold
    v_next = np.where(
        fired,
        v - (params.firing_threshold - params.c),
        v + (0.04 * v * v + 5.0 * v + 140.0 - u + i_total) * params.dt,
    )
    u_next = np.where(
        fired,
        u + params.d,
        u + params.a * (params.b * v - u) * params.dt,
    )
    return v_next, u_next


def _check_control_row(
    control: np.ndarray, graph: NetworkGraph, enforce: bool
) -> np.ndarray:
    control = np.asarray(control, dtype=np.float64)
    if control.shape != (graph.n,):
        raise ConfigurationError(
            f"control row must have length {graph.n}, got shape {control.shape}"
        )
    if enforce:
        outside = np.setdiff1d(
            np.arange(graph.n), graph.partition.control_idx, assume_unique=True
        )
        if outside.size and np.any(control[outside] != 0.0):
            bad = outside[np.nonzero(control[outside])[0][0]]
            raise ContractViolation(
                f"nonzero control on neuron {bad}, which is not in the control set"
            )
    return control


def step_network(
    state: NetworkState,
    control: np.ndarray,
    graph: NetworkGraph,
    params: NeuronParams,
    *,
    disturbance: np.ndarray | None = None,
    enforce_control_set: bool = True,
) -> tuple[NetworkState, np.ndarray]:
    """Advance the whole network one step; returns the new state and the firing mask.

    The mask reports firing at the *incoming* state (the same predicate that
    selects the reset branch).  ``disturbance`` is an optional extra current
    channel, always zero in the experiments here.  ``enforce_control_set=False``
    lifts the zero-control-outside-the-control-set contract; only the warm-up
    procedure is entitled to do that.
    """
    if state.n != graph.n:
        raise ConfigurationError(f"state has {state.n} neurons, graph has {graph.n}")
    control = _check_control_row(control, graph, enforce_control_set)
    i_total = control + internal_currents(state.v, graph, params)
    if disturbance is not None:
        w = np.asarray(disturbance, dtype=np.float64)
        if w.shape != (graph.n,):
            raise ConfigurationError("disturbance must match the neuron count")
        i_total = i_total + w
    mask = firing_mask(state, params)
    v_next, u_next = _advance(state.v, state.u, i_total, params)
    return NetworkState(v=v_next, u=u_next), mask


def simulate(
    initial: NetworkState,
    controls: np.ndarray,
    graph: NetworkGraph,
    params: NeuronParams,
    *,
    enforce_control_set: bool = True,
) -> Trace:
    """Iterate step_network over a (K, n) array of control rows."""
    controls = np.asarray(controls, dtype=np.float64)
    if controls.ndim != 2 or controls.shape[1] != graph.n:
        raise ConfigurationError(
            f"controls must be (steps, {graph.n}), got shape {controls.shape}"
        )
    k_steps = controls.shape[0]
    v = np.empty((k_steps + 1, graph.n))
    u = np.empty((k_steps + 1, graph.n))
    fired = np.empty((k_steps, graph.n), dtype=bool)
    v[0], u[0] = initial.v, initial.u
    state = initial
    for k in range(k_steps):
        state, mask = step_network(
            state, controls[k], graph, params, enforce_control_set=enforce_control_set
        )
        fired[k] = mask
        v[k + 1], u[k + 1] = state.v, state.u
    return Trace(v=v, u=u, fired=fired, control=controls.copy(), dt=params.dt)
