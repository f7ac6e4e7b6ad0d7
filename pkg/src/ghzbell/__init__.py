"""Multiphoton GHZ-encoded Bell measurement, lossy teleportation and Steane telecorrection."""

__version__ = "0.1.0"

from .bell_device import BellKind, BsOutcome, OutcomeKind, build_bs_device, classify_clicks, exact_outcome_table
from .ghz import (
    CORRECTIONS,
    BranchState,
    ImpossibleOutcome,
    LogicalQubit,
    classify_logical,
    expand_logical_bell,
    measure_logical_bell,
    success_probability,
    teleport,
)
from .loss import LossChannel, LossEvent, bm_failure_prob, qubit_loss_prob, sample_loss
from .schemes import CurvePoint, SchemeId, emit_curves
from .steane import STEANE, DecoderFailure, SteaneCode, decode_with_erasures
from .telecorrection import (
    ErrorRates,
    NoThresholdFound,
    TelecorrectionConfig,
    ThresholdResult,
    find_threshold,
    physical_rates,
    simulate_level,
)

__all__ = [
    "BellKind",
    "BranchState",
    "BsOutcome",
    "CORRECTIONS",
    "CurvePoint",
    "DecoderFailure",
    "ErrorRates",
    "ImpossibleOutcome",
    "LogicalQubit",
    "LossChannel",
    "LossEvent",
    "NoThresholdFound",
    "OutcomeKind",
    "STEANE",
    "SchemeId",
    "SteaneCode",
    "TelecorrectionConfig",
    "ThresholdResult",
    "bm_failure_prob",
    "build_bs_device",
    "classify_clicks",
    "classify_logical",
    "decode_with_erasures",
    "emit_curves",
    "exact_outcome_table",
    "expand_logical_bell",
    "find_threshold",
    "measure_logical_bell",
    "physical_rates",
    "qubit_loss_prob",
    "sample_loss",
    "simulate_level",
    "success_probability",
    "teleport",
]
