"""QAOA for MaxCut on a dense state-vector simulator.

Submodules: ``sim`` (simulator), ``graphs`` (instances and exact oracle),
``qaoa`` (ansatz and adjoint gradients), ``gw`` (Goemans-Williamson
baseline), ``trainer`` (Adam batch training), ``compiler`` (all-to-all and
linear swap-network circuits) and ``cli``.
"""

from .errors import CapacityError, ParseError, ValidationError
from .graphs import CutResult, Graph, brute_force_maxcut, cut_value, sample_erdos_renyi
from .gw import GWResult, gw_maxcut
from .qaoa import Protocol, batch_expected_cut, evolve, expected_cut, gradient
from .trainer import TrainConfig, TrainRecord, evaluate, init_protocol, train

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CutResult",
    "GWResult",
    "Graph",
    "ParseError",
    "Protocol",
    "TrainConfig",
    "TrainRecord",
    "ValidationError",
    "batch_expected_cut",
    "brute_force_maxcut",
    "cut_value",
    "evaluate",
    "evolve",
    "expected_cut",
    "gradient",
    "gw_maxcut",
    "init_protocol",
    "sample_erdos_renyi",
    "train",
]
