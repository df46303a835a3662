"""Deep Q-learning formation controllers for simulated point-mass UAVs.

One shared agent is trained on a single simulated vehicle tracking randomized
time-varying formations, then deployed as independent per-UAV instances on
held-out formations, including dynamically infeasible ones.
"""

from .agent import (
    AgentConfig,
    NotReadyError,
    compute_return,
    compute_target,
    q_values,
    select_action,
    train_step,
)
from .dynamics import (
    Accel,
    Action,
    InvalidStateError,
    N_ACTIONS,
    UavState,
    action_to_accel,
    step,
)
from .environment import (
    EnvConfig,
    EpisodeFinishedError,
    FormationEnv,
    SensorMode,
    StepResult,
    normalize_reward,
    observe,
    raw_reward,
)
from .formation import (
    FormationFormatError,
    FormationKind,
    FormationSpec,
    Goal,
    figure8,
    fixed_offsets,
    goal_position,
    lissajous,
    load_formation,
    sample_training_formation,
    save_formation,
    star,
    test_set,
    translating_polygon,
)
from .harness import (
    ConfigError,
    EpisodeMetrics,
    EvalSummary,
    RunConfig,
    evaluate,
    make_run_config,
    parse_config_file,
    random_baseline,
    read_metrics_csv,
    train,
    write_metrics_csv,
)
from .network import (
    ModelFormatError,
    NumericalFailureError,
    OptimizerState,
    QNetwork,
    forward,
    init_network,
    load_model,
    loss_and_grads,
    rmsprop_update,
    save_model,
)
from .plotting import PlotInputError, export_plot_data
from .replay import InsufficientDataError, ReplayMemory, Transition
from .smoothing import savitzky_golay

__version__ = "0.1.0"
