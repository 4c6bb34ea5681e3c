import math

import numpy as np
import pytest

from spikempc.errors import ConfigurationError, FileFormatError
from spikempc.model import NeuronKind
from spikempc.netgen import SbmConfig, generate_network, load_network, save_network


def n15_config(seed=0, **overrides):
    base = dict(
        n=15, sizes=(5, 5, 5), p_within=0.5, p_between=0.125,
        inhibitory_fraction=0.2, seed=seed,
    )
    base.update(overrides)
    return SbmConfig(**base)


class TestConfigValidation:
    def test_sizes_must_sum(self):
        with pytest.raises(ConfigurationError):
            n15_config(sizes=(5, 5, 6))

    @pytest.mark.parametrize("key", ["p_within", "p_between", "inhibitory_fraction"])
    def test_probability_bounds(self, key):
        with pytest.raises(ConfigurationError):
            n15_config(**{key: 1.5})

    def test_inhibitory_indices_bounds(self):
        with pytest.raises(ConfigurationError):
            n15_config(inhibitory_indices=(20,))

    def test_inhibitory_indices_unique(self):
        with pytest.raises(ConfigurationError):
            n15_config(inhibitory_indices=(1, 1))


class TestGenerate:
    def test_zero_probability_gives_empty_graph(self):
        graph = generate_network(n15_config(p_within=0.0, p_between=0.0))
        assert graph.edges == frozenset()

    def test_probability_one_gives_complete_digraph(self):
        cfg = SbmConfig(n=3, sizes=(1, 1, 1), p_within=1.0, p_between=1.0, seed=4)
        graph = generate_network(cfg)
        assert len(graph.edges) == 6
        assert all(j != i for j, i in graph.edges)

    def test_deterministic_per_seed(self):
        a = generate_network(n15_config(seed=11))
        b = generate_network(n15_config(seed=11))
        assert a == b
        c = generate_network(n15_config(seed=12))
        assert a != c

    def test_partition_blocks_are_contiguous(self):
        graph = generate_network(n15_config())
        assert graph.partition.control == tuple(range(5))
        assert graph.partition.module1 == tuple(range(5, 10))
        assert graph.partition.module2 == tuple(range(10, 15))

    def test_inhibitory_count_exact(self):
        for seed in range(20):
            graph = generate_network(n15_config(seed=seed))
            count = sum(k is NeuronKind.INHIBITORY for k in graph.kinds)
            assert count == round(0.2 * 15) == 3

    def test_explicit_inhibitory_indices(self):
        graph = generate_network(n15_config(inhibitory_indices=(6, 9, 13)))
        inhibitory = {i for i, k in enumerate(graph.kinds) if k is NeuronKind.INHIBITORY}
        assert inhibitory == {6, 9, 13}

    def test_kind_choice_does_not_perturb_edges(self):
        # separate sub-streams: pinning kinds must leave the edge draw unchanged
        sampled = generate_network(n15_config(seed=3))
        pinned = generate_network(n15_config(seed=3, inhibitory_indices=(0, 1, 2)))
        assert sampled.edges == pinned.edges

    def test_within_module_edge_mean_matches_binomial(self):
        # ordered pairs per module: 5*4 = 20, expectation 10 at p = 1/2
        trials = 10000
        total = 0
        for seed in range(trials):
            graph = generate_network(n15_config(seed=seed, p_between=0.0))
            total += len(graph.edges)
        mean_per_module = total / (3 * trials)
        se = math.sqrt(20 * 0.5 * 0.5 / (3 * trials))
        assert abs(mean_per_module - 10.0) <= 3 * se

    def test_between_module_edge_mean_matches_binomial(self):
        # ordered cross-module pairs: 15*14 - 3*20 = 150, expectation 150/8
        trials = 4000
        total = 0
        for seed in range(trials):
            graph = generate_network(n15_config(seed=seed, p_within=0.0))
            total += len(graph.edges)
        mean = total / trials
        se = math.sqrt(150 * 0.125 * 0.875 / trials)
        assert abs(mean - 150 / 8) <= 3 * se


class TestNetworkFile:
    def test_round_trip_identity(self, tmp_path):
        graph = generate_network(n15_config(seed=7, inhibitory_indices=(6, 9, 13)))
        path = tmp_path / "net.txt"
        save_network(graph, path)
        assert load_network(path) == graph

    def test_save_is_byte_deterministic(self, tmp_path):
        graph = generate_network(n15_config(seed=7))
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        save_network(graph, p1)
        save_network(graph, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_self_loop_rejected_with_line_number(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("n=2\npartition=1,1,0\ninhibitory=\n1 1\n")
        with pytest.raises(FileFormatError, match=r":4:"):
            load_network(path)

    def test_out_of_range_index_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("n=2\npartition=1,1,0\ninhibitory=\n0 5\n")
        with pytest.raises(FileFormatError, match="outside"):
            load_network(path)

    def test_malformed_header_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("neurons=2\npartition=1,1,0\ninhibitory=\n")
        with pytest.raises(FileFormatError, match=r":1:"):
            load_network(path)

    def test_partition_sum_checked(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("n=4\npartition=1,1,1\ninhibitory=\n")
        with pytest.raises(FileFormatError, match="sum"):
            load_network(path)
