"""Phase-adaptive temporal window sizing.

A rollout is divided into prompt segments by switch boundaries.  Near a
boundary the effective read window expands to its maximum; deep inside a
stable segment it contracts toward the minimum.  The shape is driven by two
exponentials: a post-switch decay of the segment age and a pre-switch
expansion as the next boundary approaches.  All operations here are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigurationError

PHASE_UNITS = ("frames", "blocks")


@dataclass(frozen=True)
class PromptSchedule:
    """Switch boundaries over a fixed-length rollout.

    ``boundaries`` are the first frames of segments 1..n; segment 0 starts
    at frame 0 implicitly.
    """

    boundaries: tuple[int, ...]
    total_frames: int

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(int(b) for b in self.boundaries))
        if self.total_frames < 1:
            raise ConfigurationError("total_frames must be positive", field="total_frames")
        prev = 0
        for b in self.boundaries:
            if b <= prev:
                raise ConfigurationError(
                    "boundaries must be strictly ascending and positive", field="boundaries"
                )
            prev = b
        if self.boundaries and self.boundaries[-1] >= self.total_frames:
            raise ConfigurationError(
                "boundaries must lie inside (0, total_frames)", field="boundaries"
            )

    @property
    def segment_count(self) -> int:
        return len(self.boundaries) + 1

    @property
    def segment_starts(self) -> tuple[int, ...]:
        return (0,) + self.boundaries

    def scaled_to(self, total_frames: int) -> "PromptSchedule":
        """Proportionally rescale the boundaries to a new rollout length."""
        if total_frames < 1:
            raise ConfigurationError("total_frames must be positive", field="total_frames")
        scaled = tuple(
            int(math.floor(b * total_frames / self.total_frames + 0.5))
            for b in self.boundaries
        )
        return PromptSchedule(boundaries=scaled, total_frames=total_frames)


@dataclass(frozen=True)
class WindowConfig:
    w_min: int = 7
    w_max: int = 12
    tau_post: float = 18.0
    tau_pre: float = 9.0
    phase_unit: str = "frames"

    def __post_init__(self):
        if self.w_min < 1 or self.w_max < 1:
            raise ConfigurationError("window bounds must be positive", field="w_min")
        if self.w_min > self.w_max:
            raise ConfigurationError("w_min must not exceed w_max", field="w_min")
        if self.tau_post <= 0:
            raise ConfigurationError("tau_post must be positive", field="tau_post")
        if self.tau_pre <= 0:
            raise ConfigurationError("tau_pre must be positive", field="tau_pre")
        if self.phase_unit not in PHASE_UNITS:
            raise ConfigurationError(
                f"phase_unit must be one of {PHASE_UNITS}", field="phase_unit"
            )


@dataclass(frozen=True)
class PhaseState:
    """Everything the engine needs to know about frame t's prompt phase."""

    t: int
    segment_index: int
    age: int
    distance: Optional[int]
    w_post: float
    w_pre: float
    w: float
    window: int


def segment_of(schedule: PromptSchedule, t: int) -> tuple[int, int, Optional[int]]:
    """Locate frame t: (segment index, segment start, next boundary or None).

    A boundary frame belongs to the segment it opens (age 0 there).
    """
    if t < 0 or t >= schedule.total_frames:
        raise ConfigurationError(
            f"frame {t} outside [0, {schedule.total_frames})", field="t"
        )
    starts = schedule.segment_starts
    seg = 0
    for i, s in enumerate(starts):
        if t >= s:
            seg = i
        else:
            break
    nxt = starts[seg + 1] if seg + 1 < len(starts) else None
    return seg, starts[seg], nxt


def phase_weight(
    age: int, distance: Optional[int], cfg: WindowConfig
) -> tuple[float, float, float]:
    """Post-switch and pre-switch factors and their max."""
    w_post = math.exp(-age / cfg.tau_post)
    w_pre = 0.0 if distance is None else math.exp(-distance / cfg.tau_pre)
    return w_post, w_pre, max(w_post, w_pre)


def window_size(w: float, cfg: WindowConfig) -> int:
    """Map a phase weight in [0, 1] to a whole-frame window, rounding half up."""
    raw = cfg.w_min + (cfg.w_max - cfg.w_min) * w
    return min(max(int(math.floor(raw + 0.5)), cfg.w_min), cfg.w_max)


def phase_state(
    schedule: PromptSchedule, t: int, cfg: WindowConfig, frames_per_block: int = 1
) -> PhaseState:
    """Full phase picture for frame t.

    With ``phase_unit == "blocks"`` the age and distance are converted from
    frames to whole blocks (age rounds down, distance rounds up) before the
    exponentials; the default frames unit leaves them untouched.
    """
    seg, start, nxt = segment_of(schedule, t)
    age = max(0, t - start)
    distance = None if nxt is None else max(0, nxt - t)
    if cfg.phase_unit == "blocks":
        if frames_per_block < 1:
            raise ConfigurationError(
                "frames_per_block must be positive", field="frames_per_block"
            )
        age = age // frames_per_block
        if distance is not None:
            distance = -(-distance // frames_per_block)
    w_post, w_pre, w = phase_weight(age, distance, cfg)
    return PhaseState(
        t=t,
        segment_index=seg,
        age=age,
        distance=distance,
        w_post=w_post,
        w_pre=w_pre,
        w=w,
        window=window_size(w, cfg),
    )
