"""Structured attention-memory engine for multi-prompt autoregressive rollout."""

from .anchors import AnchorConfig, AnchorStore, SegmentAnchor
from .bridge import BridgeMemory, HeadGates, HeadSummaries
from .engine import (
    BlockTrace,
    BudgetReport,
    EngineConfig,
    HeadReadSet,
    MemoryEngine,
    ReadSet,
    budget_report,
)
from .errors import (
    ConfigurationError,
    DegenerateTangentError,
    EngineStateError,
    StreamMemError,
)
from .rng import STREAM_VERSION, DeterministicStream
from .simulate import ComparisonReport, SimConfig, compare_fixed_vs_adaptive, run
from .vectors import (
    TransitionSignal,
    cosine,
    motion_tangent,
    project_motion_neutral_exact,
    project_motion_neutral_stabilized,
    prompt_delta,
    qp_projection_oracle,
    switch_strength,
)
from .verify import VerificationReport, run_verification
from .window import PhaseState, PromptSchedule, WindowConfig, phase_state

__version__ = "0.1.0"

__all__ = [
    "AnchorConfig",
    "AnchorStore",
    "BlockTrace",
    "BridgeMemory",
    "BudgetReport",
    "ComparisonReport",
    "ConfigurationError",
    "DegenerateTangentError",
    "DeterministicStream",
    "EngineConfig",
    "EngineStateError",
    "HeadGates",
    "HeadReadSet",
    "HeadSummaries",
    "MemoryEngine",
    "PhaseState",
    "PromptSchedule",
    "ReadSet",
    "STREAM_VERSION",
    "SegmentAnchor",
    "SimConfig",
    "StreamMemError",
    "TransitionSignal",
    "VerificationReport",
    "WindowConfig",
    "budget_report",
    "compare_fixed_vs_adaptive",
    "cosine",
    "motion_tangent",
    "phase_state",
    "project_motion_neutral_exact",
    "project_motion_neutral_stabilized",
    "prompt_delta",
    "qp_projection_oracle",
    "run",
    "run_verification",
    "switch_strength",
]
