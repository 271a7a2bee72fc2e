"""Switchable network model: admittance assembly, power flow, fixtures."""

from gridloop.netmodel.admittance import (
    build_admittance,
    complex_admittance,
    to_real_blocks,
)
from gridloop.netmodel.injection import delta_injection
from gridloop.netmodel.io import (
    Fixture,
    FixtureControl,
    FixtureFormatError,
    builtin_fixture_path,
    load_fixture,
    save_fixture,
)
from gridloop.netmodel.powerflow import (
    energized_components,
    solve_operating_point,
    total_load_at_nominal,
)
from gridloop.netmodel.types import (
    AdmittanceBlock,
    CapacityError,
    ConvergenceError,
    DeltaInjection,
    DgSpec,
    Line,
    NetworkTopology,
    OperatingPoint,
    PowerFlowError,
    SwitchState,
)

__all__ = [
    "AdmittanceBlock",
    "CapacityError",
    "ConvergenceError",
    "DeltaInjection",
    "DgSpec",
    "Fixture",
    "FixtureControl",
    "FixtureFormatError",
    "Line",
    "NetworkTopology",
    "OperatingPoint",
    "PowerFlowError",
    "SwitchState",
    "build_admittance",
    "builtin_fixture_path",
    "complex_admittance",
    "delta_injection",
    "energized_components",
    "load_fixture",
    "save_fixture",
    "solve_operating_point",
    "total_load_at_nominal",
]
