import numpy as np
import pytest

from spikempc.errors import FileFormatError
from spikempc.model import Trace
from spikempc.netgen import SbmConfig, generate_network
from spikempc.reporting import (
    emit_controls,
    emit_report,
    emit_trace,
    load_controls,
    load_report,
    load_trace,
)
from spikempc.rng import Stream, substream
from spikempc.warmup import InitConfig, initialize
from spikempc.model import simulate


def sample_trace(seed=4, steps=6):
    cfg = SbmConfig(
        n=6, sizes=(2, 2, 2), p_within=0.7, p_between=0.3,
        inhibitory_fraction=0.2, seed=seed,
    )
    graph = generate_network(cfg)
    from spikempc.model import NeuronParams

    params = NeuronParams()
    state = initialize(graph, params, InitConfig(current_high=14.0),
                       substream(seed, Stream.WARMUP))
    controls = np.zeros((steps, graph.n))
    controls[:, list(graph.partition.control)] = np.linspace(
        0, 12, steps * 2
    ).reshape(steps, 2)
    trace = simulate(state, controls, graph, params)
    return trace, graph


class TestTraceRoundTrip:
    def test_identity(self, tmp_path):
        trace, graph = sample_trace()
        tp, cp = tmp_path / "trace.csv", tmp_path / "control.csv"
        emit_trace(trace, tp)
        emit_controls(trace, cp, graph.partition.control)
        back = load_trace(tp, controls_path=cp)
        assert back.dt == trace.dt
        assert np.array_equal(back.v, trace.v)
        assert np.array_equal(back.u, trace.u)
        assert np.array_equal(back.fired, trace.fired)
        assert np.array_equal(back.control, trace.control)

    def test_row_counts(self, tmp_path):
        trace, graph = sample_trace(steps=5)
        tp, cp = tmp_path / "trace.csv", tmp_path / "control.csv"
        emit_trace(trace, tp)
        emit_controls(trace, cp, graph.partition.control)
        trace_lines = tp.read_text().splitlines()
        control_lines = cp.read_text().splitlines()
        assert len(trace_lines) == 1 + (5 + 1) * graph.n
        assert len(control_lines) == 1 + 5 * len(graph.partition.control)

    def test_empty_trace_header_only(self, tmp_path):
        empty = Trace(
            v=np.zeros((1, 0)), u=np.zeros((1, 0)),
            fired=np.zeros((0, 0), dtype=bool), control=np.zeros((0, 0)), dt=1.0,
        )
        path = tmp_path / "trace.csv"
        emit_trace(empty, path)
        assert path.read_text() == "time_ms,neuron_id,v,u,fired\n"

    def test_byte_determinism(self, tmp_path):
        trace, graph = sample_trace()
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_trace(trace, p1)
        emit_trace(trace, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_header_names_expectation(self, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text("time,neuron,v,u,fired\n")
        with pytest.raises(FileFormatError, match="header"):
            load_trace(path)

    def test_malformed_row_rejected(self, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text("time_ms,neuron_id,v,u,fired\n0.0,0,not_a_number,0.0,0\n")
        with pytest.raises(FileFormatError, match="malformed"):
            load_trace(path)

    def test_control_row_out_of_range(self, tmp_path):
        path = tmp_path / "control.csv"
        path.write_text("time_ms,neuron_id,i_control\n9.0,0,1.0\n")
        with pytest.raises(FileFormatError, match="out of range"):
            load_controls(path, n=2, n_steps=3, dt=1.0)


class TestReportJson:
    def test_round_trip(self, tmp_path):
        payload = {"a": 1, "nested": {"x": [1, 2, 3]}, "f": 0.125}
        path = tmp_path / "report.json"
        emit_report(payload, path)
        assert load_report(path) == payload

    def test_non_finite_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report({"bad": float("inf")}, tmp_path / "report.json")
