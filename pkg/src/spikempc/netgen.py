"""Seeded stochastic block model construction and the network file format.

Graphs have three contiguous index blocks (control, module1, module2).  Each
ordered pair (j -> i) with j != i becomes an edge independently, with the
within-block probability when both endpoints share a block and the
between-block probability otherwise.  Kinds are sampled so that
round(inhibitory_fraction * n) neurons are inhibitory, unless an explicit
index list pins them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, FileFormatError
from .model import ModulePartition, NetworkGraph, NeuronKind
from .rng import Stream, substream


@dataclass(frozen=True)
class SbmConfig:
    """Block-model settings; fully determines a graph together with the seed."""

    n: int
    sizes: tuple[int, int, int]
    p_within: float
    p_between: float
    inhibitory_fraction: float = 0.2
    seed: int = 0
    inhibitory_indices: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if len(self.sizes) != 3 or any(s <= 0 for s in self.sizes):
            raise ConfigurationError(f"need three positive module sizes, got {self.sizes}")
        if sum(self.sizes) != self.n:
            raise ConfigurationError(
                f"module sizes {self.sizes} do not sum to n={self.n}"
            )
        for name in ("p_within", "p_between", "inhibitory_fraction"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"{name}={p} outside [0, 1]")
        if self.inhibitory_indices is not None:
            idx = tuple(sorted(int(i) for i in self.inhibitory_indices))
            if len(set(idx)) != len(idx):
                raise ConfigurationError("duplicate inhibitory indices")
            if idx and not (0 <= idx[0] and idx[-1] < self.n):
                raise ConfigurationError("inhibitory index outside 0..n-1")
            object.__setattr__(self, "inhibitory_indices", idx)

    def partition(self) -> ModulePartition:
        c, m1, m2 = self.sizes
        return ModulePartition(
            control=tuple(range(c)),
            module1=tuple(range(c, c + m1)),
            module2=tuple(range(c + m1, c + m1 + m2)),
        )


def generate_network(cfg: SbmConfig) -> NetworkGraph:
    """Sample a graph from the block model; deterministic for a given config."""
    n = cfg.n
    block = np.repeat(np.arange(3), cfg.sizes)
    prob = np.where(block[:, None] == block[None, :], cfg.p_within, cfg.p_between)
    np.fill_diagonal(prob, 0.0)

    draws = substream(cfg.seed, Stream.EDGES).random((n, n))  # draws[j, i] for j -> i
    adj = draws < prob
    edges = frozenset((int(j), int(i)) for j, i in zip(*np.nonzero(adj)))

    if cfg.inhibitory_indices is not None:
        inhibitory = set(cfg.inhibitory_indices)
    else:
        count = int(round(cfg.inhibitory_fraction * n))
        chosen = substream(cfg.seed, Stream.KINDS).choice(n, size=count, replace=False)
        inhibitory = {int(i) for i in chosen}
    kinds = tuple(
        NeuronKind.INHIBITORY if i in inhibitory else NeuronKind.EXCITATORY
        for i in range(n)
    )
    return NetworkGraph(n=n, edges=edges, kinds=kinds, partition=cfg.partition())


def _block_sizes(graph: NetworkGraph) -> tuple[int, int, int]:
    p = graph.partition
    c, m1, m2 = len(p.control), len(p.module1), len(p.module2)
    expected = ModulePartition(
        control=tuple(range(c)),
        module1=tuple(range(c, c + m1)),
        module2=tuple(range(c + m1, c + m1 + m2)),
    )
    if (p.control, p.module1, p.module2) != (
        expected.control,
        expected.module1,
        expected.module2,
    ):
        raise ConfigurationError(
            "network file format only supports contiguous partition blocks"
        )
    return c, m1, m2


def save_network(graph: NetworkGraph, path) -> None:
    """Write the plain-text edge-list format (see load_network)."""
    c, m1, m2 = _block_sizes(graph)
    inhibitory = [i for i, k in enumerate(graph.kinds) if k is NeuronKind.INHIBITORY]
    lines = [
        f"n={graph.n}",
        f"partition={c},{m1},{m2}",
        "inhibitory=" + ",".join(str(i) for i in inhibitory),
    ]
    lines.extend(f"{j} {i}" for j, i in sorted(graph.edges))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_network(path) -> NetworkGraph:
    """Parse a network file.

    Format: header lines ``n=<int>``, ``partition=<c>,<m1>,<m2>`` and
    ``inhibitory=<comma-separated indices>`` followed by one ``j i`` pair per
    line (source, target).  Round-trips losslessly with save_network.
    """
    with open(path, "r", encoding="ascii") as fh:
        raw = fh.read().splitlines()

    def fail(lineno: int, msg: str):
        raise FileFormatError(f"{path}:{lineno}: {msg}")

    if len(raw) < 3:
        fail(len(raw), "expected three header lines")
    if not raw[0].startswith("n="):
        fail(1, f"expected 'n=<int>', got {raw[0]!r}")
    try:
        n = int(raw[0][2:])
    except ValueError:
        fail(1, f"bad neuron count {raw[0][2:]!r}")
    if not raw[1].startswith("partition="):
        fail(2, f"expected 'partition=<c>,<m1>,<m2>', got {raw[1]!r}")
    try:
        sizes = tuple(int(s) for s in raw[1][len("partition="):].split(","))
    except ValueError:
        fail(2, f"bad partition sizes {raw[1]!r}")
    if len(sizes) != 3:
        fail(2, f"expected three partition sizes, got {len(sizes)}")
    if sum(sizes) != n:
        fail(2, f"partition sizes {sizes} do not sum to n={n}")
    if not raw[2].startswith("inhibitory="):
        fail(3, f"expected 'inhibitory=...', got {raw[2]!r}")
    body = raw[2][len("inhibitory="):].strip()
    try:
        inhibitory = {int(s) for s in body.split(",")} if body else set()
    except ValueError:
        fail(3, f"bad inhibitory index list {body!r}")
    for i in inhibitory:
        if not 0 <= i < n:
            fail(3, f"inhibitory index {i} outside 0..{n - 1}")

    edges = set()
    for lineno, line in enumerate(raw[3:], start=4):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            fail(lineno, f"expected 'j i' edge pair, got {line!r}")
        try:
            j, i = int(parts[0]), int(parts[1])
        except ValueError:
            fail(lineno, f"non-integer edge endpoint in {line!r}")
        if j == i:
            fail(lineno, f"self-loop on neuron {i}")
        if not (0 <= j < n and 0 <= i < n):
            fail(lineno, f"edge ({j}, {i}) references neuron outside 0..{n - 1}")
        edges.add((j, i))

    c, m1, m2 = sizes
    kinds = tuple(
        NeuronKind.INHIBITORY if i in inhibitory else NeuronKind.EXCITATORY
        for i in range(n)
    )
    partition = ModulePartition(
        control=tuple(range(c)),
        module1=tuple(range(c, c + m1)),
        module2=tuple(range(c + m1, c + m1 + m2)),
    )
    return NetworkGraph(n=n, edges=frozenset(edges), kinds=kinds, partition=partition)
