"""Exact constriction and dilation analysis for imprecise probabilities on
finite state spaces."""

__version__ = "0.1.0"

from .core import CredalSet, Event, Measure, Partition, ProbInterval, StateSpace, mixture, validate_partition
from .capacity import MassFunction, SetFunction, belief_from_mass, core_vertices, mobius_transform
from .updating import TransferFunction, UpdateChain, forget, update
from .analysis import Verdict, classify_partition, classify_uniform

__all__ = [
    "CredalSet",
    "Event",
    "MassFunction",
    "Measure",
    "Partition",
    "ProbInterval",
    "SetFunction",
    "StateSpace",
    "TransferFunction",
    "UpdateChain",
    "Verdict",
    "belief_from_mass",
    "classify_partition",
    "classify_uniform",
    "core_vertices",
    "forget",
    "mixture",
    "mobius_transform",
    "update",
    "validate_partition",
]
