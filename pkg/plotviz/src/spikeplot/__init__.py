"""Figure rendering for spikempc run directories."""

from .io import SchemaError, load_control_table, load_run_report, load_trace_table
from .render import plot_controls, plot_traces

__version__ = "0.1.0"
