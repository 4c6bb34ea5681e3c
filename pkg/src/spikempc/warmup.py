"""Initial-state preparation: rest everything, then kick with random current.

Potentials start at the reset value c and recovery variables at zero; a
uniformly random current is then injected into every neuron for a fixed number
of steps.  The injection goes through the ordinary control channel but is
exempt from the control-set restriction, which only binds during the
controlled run itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .model import NetworkGraph, NetworkState, NeuronParams, simulate


@dataclass(frozen=True)
class InitConfig:
    """Warm-up length and the bounds of the per-neuron, per-step random current.

    The default upper bound keeps the kicked network below its recurrent
    ignition point: modules start perturbed but not self-sustaining, which is
    the regime where their firing dominance is actually controllable.
    """

    warmup_steps: int = 10
    current_low: float = 0.0
    current_high: float = 4.0

    def __post_init__(self) -> None:
        if self.warmup_steps < 0:
            raise ConfigurationError("warmup_steps must be >= 0")
        if self.current_low > self.current_high:
            raise ConfigurationError(
                f"current bounds inverted: [{self.current_low}, {self.current_high}]"
            )


def initialize(
    graph: NetworkGraph,
    params: NeuronParams,
    cfg: InitConfig,
    rng: np.random.Generator,
) -> NetworkState:
    """Produce the experiment's initial state; deterministic per generator state."""
    rest = NetworkState(v=np.full(graph.n, params.c), u=np.zeros(graph.n))
    if cfg.warmup_steps == 0:
        return rest
    currents = rng.uniform(
        cfg.current_low, cfg.current_high, size=(cfg.warmup_steps, graph.n)
    )
    trace = simulate(rest, currents, graph, params, enforce_control_set=False)
    return trace.state(cfg.warmup_steps)
