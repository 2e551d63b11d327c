"""Revenue-optimal data pricing: market semantics, step price curves, grid
discretizations, offline optimizers, and online learners with a seeded
experiment harness.
"""

from ._kernels import backend_name
from .market import (
    MarketInstance,
    StepCurve,
    TypeDistribution,
    ValuationCurve,
    buyer_demand,
    demand_matrix,
    expected_revenue,
    purchase_set,
)
from .valuations import (
    PowerLawSpec,
    measure_constants,
    measure_instance_constants,
    power_law_curve,
    random_monotone_curve,
)
from .steps import (
    CapExceededError,
    count_m_steps,
    curve_at,
    enumerate_m_steps,
    m_step_reduce,
)
from .grids import (
    DegenerateGridError,
    GridParams,
    PriceSpace,
    build_space,
    build_value_grid,
    diminishing_data_grid,
    monotone_count_bound,
    smooth_data_grid,
    space_demand_tables,
)
from .offline import best_in_space, brute_force_opt
from .ucb import GIVEAWAY, UcbLearner
from .ftpl import FtplLearner, default_theta, sample_perturbations
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .harness import (
    RoundRecord,
    RunResult,
    adversary_sequence,
    read_trace,
    run_adversarial,
    run_stochastic,
    run_sweep,
    run_trial,
    write_outputs,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "MarketInstance",
    "StepCurve",
    "TypeDistribution",
    "ValuationCurve",
    "buyer_demand",
    "demand_matrix",
    "expected_revenue",
    "purchase_set",
    "PowerLawSpec",
    "measure_constants",
    "measure_instance_constants",
    "power_law_curve",
    "random_monotone_curve",
    "CapExceededError",
    "count_m_steps",
    "curve_at",
    "enumerate_m_steps",
    "m_step_reduce",
    "DegenerateGridError",
    "GridParams",
    "PriceSpace",
    "build_space",
    "build_value_grid",
    "diminishing_data_grid",
    "monotone_count_bound",
    "smooth_data_grid",
    "space_demand_tables",
    "best_in_space",
    "brute_force_opt",
    "GIVEAWAY",
    "UcbLearner",
    "FtplLearner",
    "default_theta",
    "sample_perturbations",
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "RoundRecord",
    "RunResult",
    "adversary_sequence",
    "read_trace",
    "run_adversarial",
    "run_stochastic",
    "run_sweep",
    "run_trial",
    "write_outputs",
    "__version__",
]
