"""Control of modular spiking networks by gradient descent through unrolled dynamics.

The package simulates discrete-time Izhikevich networks with sigmoid synaptic
coupling, and designs control currents for one module via receding-horizon
optimization: the dynamics are unrolled over a prediction horizon, the control
inputs are treated as free parameters, and an exact reverse pass supplies their
gradients.
"""

from .config import (
    ExperimentConfig,
    OutputSettings,
    default_config,
    load_config,
    preset_config,
    save_config,
)
from .errors import (
    ConfigurationError,
    ContractViolation,
    FileFormatError,
    SpikeMpcError,
)
from .gradcheck import (
    GradCheckSettings,
    run_gradient_check,
    run_zero_gradient_demo,
)
from .harness import ExperimentResult, run_experiment, report_json, write_outputs
from .metrics import FiringCountReport, build_report, firing_count, objective_value
from .model import (
    ModulePartition,
    NetworkGraph,
    NetworkState,
    NeuronKind,
    NeuronParams,
    Trace,
    firing_mask,
    internal_current,
    simulate,
    soft_threshold,
    step_network,
    step_neuron,
)
from .mpc import MpcConfig, RunResult, mpc_step, run_control
from .netgen import SbmConfig, generate_network, load_network, save_network
from .optimizer import (
    AdamState,
    OptimizerSettings,
    TrainSchedule,
    adam_step,
    candidate_plans,
    masked_adam_update,
    optimize_horizon,
    optimize_multi_start,
)
from .rng import Stream, substream
from .unfolding import (
    ControlPlan,
    CostPhase,
    RolloutTape,
    finite_diff_grad,
    grad_plan,
    stage_cost,
    unfold_forward,
)
from .warmup import InitConfig, initialize

__version__ = "0.1.0"
