"""Byzantine-resilient decentralized TD(lambda) simulator."""

from ._core import (
    ByrdtdError,
    MrpModel,
    NetworkTopology,
    check_connectivity,
    complete_topology,
    consensus_error,
    degree_of_unsaturation,
    erdos_renyi_topology,
    is_ergodic,
    load_model,
    mean_aggregate,
    model_from_text,
    preset_topology,
    random_mrp,
    reward_variation,
    run_config,
    sandwich,
    squared_bellman_error,
    stationary_distribution,
    steady_state,
    trimmed_aggregate,
    value_function,
)

__all__ = [
    "ByrdtdError",
    "MrpModel",
    "NetworkTopology",
    "check_connectivity",
    "complete_topology",
    "consensus_error",
    "degree_of_unsaturation",
    "erdos_renyi_topology",
    "is_ergodic",
    "load_model",
    "mean_aggregate",
    "model_from_text",
    "preset_topology",
    "random_mrp",
    "reward_variation",
    "run_config",
    "sandwich",
    "squared_bellman_error",
    "stationary_distribution",
    "steady_state",
    "trimmed_aggregate",
    "value_function",
]
