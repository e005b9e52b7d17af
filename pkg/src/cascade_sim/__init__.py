"""Bankruptcy cascade simulator on coupled credit ratings."""

__version__ = "0.1.0"

from .errors import ConfigError, ContractViolationError, InvalidParameterError
from .model import (
    EconomyState,
    ModelParams,
    N_GRADES,
    RATING_TOP,
    apply_spin,
    conditional_distribution,
    panic_field_active,
    sample_coupling_matrix,
)
from .engine import (
    EnsembleResult,
    RealizationResult,
    advance_time_step,
    init_state,
    run_ensemble,
    run_realization,
)
from .analysis import (
    AggregateStats,
    RescuePoint,
    SusceptibilityEstimate,
    SweepPoint,
    SweepTable,
    aggregate,
    branch_fraction,
    final_defaults,
    rescue_benefit,
    susceptibility,
    sweep,
)
from .meanfield import (
    BasinCell,
    BasinGrid,
    FixedPointResult,
    MeanFieldParams,
    MeanFieldPoint,
    basin_map,
    mf_fixed_point,
    mf_step,
)
from .config import RunConfig, apply_overrides, parse_config, to_model_params
