"""Transient semantic bridge written into memory at prompt switches.

At a boundary, per-head gates blend the motion-neutral prompt transition
into the cached recent and sink summaries.  The resulting pair of bridge
entries is read alongside the rest of memory and then decays (or expires)
block by block according to the injection schedule until pruned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .vectors import cosine

INJECTION_SCHEDULES = ("one_shot", "constant", "decayed")


@dataclass(frozen=True)
class HeadSummaries:
    """Cached context for one head: recent-frame mean and sink mean."""

    recent: np.ndarray
    sink: np.ndarray
    layer_index: int
    head_index: int


@dataclass(frozen=True)
class HeadGates:
    g_recent: float
    g_sink: float


@dataclass(frozen=True)
class BridgeMemory:
    bridge_sink: np.ndarray
    bridge_recent: np.ndarray
    scale: float
    age_blocks: int
    schedule: str


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def _gate(summary: np.ndarray, delta_perp: np.ndarray, rho: float) -> float:
    # inner clip keeps only aligned context; outer clamp keeps the
    # interpolation convex when rho exceeds 1
    return _clamp01(rho * _clamp01(cosine(summary, delta_perp)))


def head_gates(summaries: HeadSummaries, delta_perp: np.ndarray, rho: float) -> HeadGates:
    """Bounded head-wise gates from clipped cosine alignment times rho."""
    if not 0.0 <= rho <= 2.0:
        raise ConfigurationError("rho must be in [0, 2]", field="rho")
    return HeadGates(
        g_recent=_gate(summaries.recent, delta_perp, rho),
        g_sink=_gate(summaries.sink, delta_perp, rho),
    )


def build_bridge(
    summaries: HeadSummaries,
    delta_perp: np.ndarray,
    gates: HeadGates,
    schedule: str,
) -> BridgeMemory:
    """Gate-interpolated bridge pair at full strength (scale 1, age 0)."""
    if schedule not in INJECTION_SCHEDULES:
        raise ConfigurationError(
            f"schedule must be one of {INJECTION_SCHEDULES}", field="bridge_schedule"
        )
    b_r = (1.0 - gates.g_recent) * summaries.recent + gates.g_recent * delta_perp
    b_s = (1.0 - gates.g_sink) * summaries.sink + gates.g_sink * delta_perp
    return BridgeMemory(
        bridge_sink=b_s, bridge_recent=b_r, scale=1.0, age_blocks=0, schedule=schedule
    )


def advance_bridge(bridge: BridgeMemory, lam: float) -> BridgeMemory:
    """One block of aging: decay, hold, or expire depending on the schedule."""
    if not 0.0 <= lam <= 1.0:
        raise ConfigurationError("bridge_lambda must be in [0, 1]", field="bridge_lambda")
    age = bridge.age_blocks + 1
    if bridge.schedule == "decayed":
        return BridgeMemory(
            bridge_sink=lam * bridge.bridge_sink,
            bridge_recent=lam * bridge.bridge_recent,
            scale=bridge.scale * lam,
            age_blocks=age,
            schedule=bridge.schedule,
        )
    if bridge.schedule == "one_shot":
        return BridgeMemory(
            bridge_sink=np.zeros_like(bridge.bridge_sink),
            bridge_recent=np.zeros_like(bridge.bridge_recent),
            scale=0.0,
            age_blocks=age,
            schedule=bridge.schedule,
        )
    return replace(bridge, age_blocks=age)


def bridge_norm(bridge: Optional[BridgeMemory]) -> float:
    """Norm of the stacked pair [B_s; B_r]; 0 for an absent bridge."""
    if bridge is None:
        return 0.0
    return math.sqrt(
        float(np.dot(bridge.bridge_sink, bridge.bridge_sink))
        + float(np.dot(bridge.bridge_recent, bridge.bridge_recent))
    )


def prune_bridge(
    bridge: BridgeMemory, norm_tol: float, initial_norm: float
) -> Optional[BridgeMemory]:
    """Drop the bridge once its norm falls below norm_tol of injection-time norm."""
    if norm_tol <= 0:
        raise ConfigurationError("norm_tol must be positive", field="bridge_prune_tol")
    if bridge_norm(bridge) < norm_tol * initial_norm:
        return None
    return bridge
