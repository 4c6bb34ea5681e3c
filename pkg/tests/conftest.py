import numpy as np
import pytest

from spikempc.model import (
    ModulePartition,
    NetworkGraph,
    NetworkState,
    NeuronKind,
    NeuronParams,
)

EXC = NeuronKind.EXCITATORY
INH = NeuronKind.INHIBITORY


@pytest.fixture
def params():
    """Fast-spiking defaults: a=0.1, b=0.2, c=-65, d=2, dt=1 ms."""
    return NeuronParams()


@pytest.fixture
def single_neuron():
    """One isolated neuron, actuated."""
    return NetworkGraph(
        n=1,
        edges=frozenset(),
        kinds=(EXC,),
        partition=ModulePartition(control=(0,), module1=(), module2=()),
    )


@pytest.fixture
def chain_graph():
    """Neuron 0 (control, excitatory) feeding neuron 1 (module1)."""
    return NetworkGraph(
        n=2,
        edges=frozenset({(0, 1)}),
        kinds=(EXC, EXC),
        partition=ModulePartition(control=(0,), module1=(1,), module2=()),
    )


@pytest.fixture
def triangle_graph():
    """Three neurons, one per partition role, with mixed kinds."""
    return NetworkGraph(
        n=3,
        edges=frozenset({(0, 1), (0, 2), (2, 1)}),
        kinds=(EXC, EXC, INH),
        partition=ModulePartition(control=(0,), module1=(1,), module2=(2,)),
    )


def rest_state(graph, params, v_offset=0.0, u_value=0.0):
    return NetworkState(
        v=np.full(graph.n, params.c + v_offset), u=np.full(graph.n, u_value)
    )


@pytest.fixture
def rest():
    return rest_state
