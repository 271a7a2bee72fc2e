"""Frequency-regulation loops, feedforward synthesis, and robustness."""

from gridloop.control.types import FleetShares, FrConfig
from gridloop.control.loop import (
    ClosedLoop,
    closed_loop,
    conventional_loop,
    coverage_tf,
    feedback_tfs,
    sfc_pi_tf,
)
from gridloop.control.ffc import (
    ControllerSet,
    NonMinimumPhaseError,
    controllers_from_json,
    controllers_to_json,
    ffc_synthesize,
)
from gridloop.control.delay import (
    DelayEnvelope,
    delay_envelope,
    delay_factor_exact,
    delay_factor_rational,
    envelope_norms,
    max_delay,
)
from gridloop.control.robustness import (
    RobustnessReport,
    error_robustness,
    perturbed_estimates,
)
from gridloop.control.presets import (
    aggregate_cfg,
    aggregate_device_params,
    aggregate_plants,
    aggregate_shares,
)

__all__ = [
    "FleetShares",
    "FrConfig",
    "ClosedLoop",
    "closed_loop",
    "conventional_loop",
    "coverage_tf",
    "feedback_tfs",
    "sfc_pi_tf",
    "ControllerSet",
    "NonMinimumPhaseError",
    "ffc_synthesize",
    "controllers_to_json",
    "controllers_from_json",
    "DelayEnvelope",
    "delay_envelope",
    "delay_factor_exact",
    "delay_factor_rational",
    "envelope_norms",
    "max_delay",
    "RobustnessReport",
    "error_robustness",
    "perturbed_estimates",
    "aggregate_cfg",
    "aggregate_shares",
    "aggregate_plants",
    "aggregate_device_params",
]
