"""Segment anchors: compact per-head summaries of completed prompt segments.

When a segment ends, the recent value cache is summarized, mixed with the
segment's prompt signature, and retained in a bounded FIFO so long-range
context survives the rolling local window.  Anchors are immutable once
stored; a static injection scale is applied at read time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, EngineStateError


@dataclass(frozen=True)
class AnchorConfig:
    alpha: float = 0.35
    recent_frames: int = 6
    max_anchors: int = 4
    injection_scale: float = 0.8

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError("alpha must be in [0, 1]", field="alpha")
        if self.recent_frames < 1:
            raise ConfigurationError("recent_frames must be positive", field="recent_frames")
        if self.max_anchors < 1:
            raise ConfigurationError("max_anchors must be positive", field="max_anchors")
        if not 0.0 <= self.injection_scale <= 1.0:
            raise ConfigurationError(
                "injection_scale must be in [0, 1]", field="injection_scale"
            )


@dataclass(frozen=True)
class SegmentAnchor:
    vector: np.ndarray
    segment_index: int
    injection_scale: float


def summarize_recent(frame_values: Sequence[np.ndarray], r_anchor: int) -> np.ndarray:
    """Mean of the last min(r_anchor, available) per-frame vectors."""
    if len(frame_values) == 0:
        raise ConfigurationError("cannot summarize an empty frame sequence")
    if r_anchor < 1:
        raise ConfigurationError("r_anchor must be positive", field="recent_frames")
    tail = frame_values[-r_anchor:]
    return np.mean(np.stack(tail), axis=0)


def make_anchor(
    u: np.ndarray, p: np.ndarray, cfg: AnchorConfig, segment_index: int
) -> SegmentAnchor:
    """Convex mix (1 - alpha)*u + alpha*p of cache summary and signature."""
    if u.shape != p.shape:
        raise ConfigurationError(
            f"make_anchor: dimension mismatch {u.shape} vs {p.shape}"
        )
    vector = (1.0 - cfg.alpha) * u + cfg.alpha * p
    return SegmentAnchor(
        vector=vector, segment_index=segment_index, injection_scale=cfg.injection_scale
    )


class AnchorStore:
    """Bounded FIFO of anchors for one (layer, head) slot."""

    def __init__(self, max_anchors: int):
        if max_anchors < 1:
            raise ConfigurationError("max_anchors must be positive", field="max_anchors")
        self._max = max_anchors
        self._anchors: list[SegmentAnchor] = []

    def __len__(self) -> int:
        return len(self._anchors)

    def push(self, anchor: SegmentAnchor) -> None:
        if self._anchors and anchor.segment_index <= self._anchors[-1].segment_index:
            raise EngineStateError(
                f"anchor segment {anchor.segment_index} not after "
                f"{self._anchors[-1].segment_index}"
            )
        self._anchors.append(anchor)
        if len(self._anchors) > self._max:
            del self._anchors[0]

    def segments(self) -> tuple[int, ...]:
        return tuple(a.segment_index for a in self._anchors)

    def view(self) -> tuple[SegmentAnchor, ...]:
        """Anchors in ascending segment order, vectors pre-scaled for reads."""
        return tuple(
            SegmentAnchor(
                vector=a.injection_scale * a.vector,
                segment_index=a.segment_index,
                injection_scale=a.injection_scale,
            )
            for a in self._anchors
        )
