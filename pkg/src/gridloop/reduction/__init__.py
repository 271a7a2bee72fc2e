"""Reduced microgrid model: network gain, fleet assembly, NR responses."""

from gridloop.reduction.assembly import (
    FloatingIslandError,
    MgModel,
    UnstableModelError,
    assemble,
    build_mg_model,
    network_gain,
    output_gains,
    stack_voltage_jacobians,
)
from gridloop.reduction.nr import NrResponse, nr_response

__all__ = [
    "FloatingIslandError",
    "MgModel",
    "NrResponse",
    "UnstableModelError",
    "assemble",
    "build_mg_model",
    "network_gain",
    "nr_response",
    "output_gains",
    "stack_voltage_jacobians",
]
