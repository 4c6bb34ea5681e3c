import numpy as np
import pytest

from spikempc.errors import ConfigurationError
from spikempc.metrics import (
    FiringCountReport,
    build_report,
    firing_count,
    format_table,
    objective_value,
)
from spikempc.model import ModulePartition, Trace


def trace_from_fired(fired, dt=1.0):
    fired = np.asarray(fired, dtype=bool)
    k, n = fired.shape
    # synthesize potentials consistent with the masks (30 when fired)
    v = np.full((k + 1, n), -65.0)
    v[:k][fired] = 30.0
    return Trace(v=v, u=np.zeros((k + 1, n)), fired=fired, control=np.zeros((k, n)), dt=dt)


PART = ModulePartition(control=(0,), module1=(1,), module2=(2,))


class TestFiringCount:
    def test_silent_trace_counts_zero(self):
        trace = trace_from_fired(np.zeros((10, 3)))
        assert firing_count(trace, (0, 1, 2), (0.0, 10.0)) == 0

    def test_counts_are_per_step_per_neuron(self):
        fired = np.zeros((4, 3), dtype=bool)
        fired[0, 1] = fired[1, 1] = fired[2, 2] = True
        trace = trace_from_fired(fired)
        assert firing_count(trace, (1,), (0.0, 4.0)) == 2
        assert firing_count(trace, (1, 2), (0.0, 4.0)) == 3

    def test_half_open_interval_excludes_right_edge(self):
        fired = np.zeros((20, 3), dtype=bool)
        fired[10, 1] = True  # fires exactly at the switch time
        trace = trace_from_fired(fired)
        assert firing_count(trace, (1,), (0.0, 10.0)) == 0
        assert firing_count(trace, (1,), (10.0, 20.0)) == 1

    def test_out_of_range_interval_rejected(self):
        trace = trace_from_fired(np.zeros((5, 3)))
        with pytest.raises(ConfigurationError):
            firing_count(trace, (0,), (0.0, 6.0))
        with pytest.raises(ConfigurationError):
            firing_count(trace, (0,), (-1.0, 3.0))

    def test_empty_module_counts_zero(self):
        trace = trace_from_fired(np.ones((5, 3)))
        assert firing_count(trace, (), (0.0, 5.0)) == 0


class TestObjective:
    def test_reference_arithmetic(self):
        # counts 8/2 then 4/16 give (8-2) + (16-4) = 18
        assert objective_value(8, 2, 4, 16) == 18

    def test_report_self_consistency_enforced(self):
        with pytest.raises(ConfigurationError):
            FiringCountReport(
                counts={"control": (0, 0), "module1": (8, 4), "module2": (2, 16)},
                objective=17,  # wrong on purpose
                ratios=(4.0, 4.0),
                intervals_ms=((0.0, 10.0), (10.0, 20.0)),
            )


class TestBuildReport:
    def test_counts_and_ratios(self):
        fired = np.zeros((20, 3), dtype=bool)
        fired[2, 1] = fired[4, 1] = True          # module1 in first window
        fired[3, 2] = True                        # module2 in first window
        fired[12, 2] = fired[14, 2] = True        # module2 in second window
        trace = trace_from_fired(fired)
        report = build_report(trace, PART, 10.0, 20.0)
        assert report.counts["module1"] == (2, 0)
        assert report.counts["module2"] == (1, 2)
        assert report.objective == (2 - 1) + (2 - 0)
        assert report.ratios[0] == pytest.approx(2.0)
        assert report.ratios[1] is None  # module1 silent in the second window

    def test_table_layout_contains_counts(self):
        fired = np.zeros((20, 3), dtype=bool)
        fired[1, 1] = True
        trace = trace_from_fired(fired)
        report = build_report(trace, PART, 10.0, 20.0)
        table = format_table(report, PART)
        assert "module1" in table and "module2" in table
        assert "objective:" in table
