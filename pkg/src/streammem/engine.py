"""Structured attention-memory engine for multi-prompt autoregressive rollout.

Memory per (layer, head) has four regions: a persistent sink holding the
first frames of the stream, a rolling local ring with fixed physical
capacity, a pair of transient bridge slots written at prompt switches, and
a bounded store of segment anchors.  ``step_block`` advances the rollout by
one block: it handles any segment switch (anchor the finished segment,
inject the bridge), assembles the read set under the phase-adaptive window,
appends the new frames, ages the bridge, and emits a trace row.

One engine instance is a single-writer state machine; calls to step_block
must be externally serialized.  Distinct instances are fully independent.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .anchors import AnchorConfig, AnchorStore, SegmentAnchor, make_anchor, summarize_recent
from .bridge import (
    INJECTION_SCHEDULES,
    BridgeMemory,
    HeadGates,
    HeadSummaries,
    advance_bridge,
    bridge_norm,
    build_bridge,
    head_gates,
    prune_bridge,
)
from .errors import ConfigurationError, EngineStateError
from .vectors import (
    TransitionSignal,
    project_motion_neutral_stabilized,
    prompt_delta,
    switch_strength,
)
from .window import PhaseState, PromptSchedule, WindowConfig, phase_state

BRIDGE_SCHEDULES = INJECTION_SCHEDULES + ("off",)


@dataclass(frozen=True)
class EngineConfig:
    layers: int = 2
    heads: int = 4
    value_dim: int = 16
    frames_per_block: int = 3
    sink_frames: int = 3
    window: WindowConfig = field(default_factory=WindowConfig)
    anchors: AnchorConfig = field(default_factory=AnchorConfig)
    bridge_lambda: float = 0.85
    bridge_schedule: str = "decayed"
    eps_stabilized: float = 1e-6
    tokens_per_frame: int = 1
    bridge_prune_tol: float = 1e-3

    def __post_init__(self):
        for name in ("layers", "heads", "value_dim", "frames_per_block",
                     "sink_frames", "tokens_per_frame"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive", field=name)
        if not 0.0 <= self.bridge_lambda <= 1.0:
            raise ConfigurationError("bridge_lambda must be in [0, 1]", field="bridge_lambda")
        if self.bridge_schedule not in BRIDGE_SCHEDULES:
            raise ConfigurationError(
                f"bridge_schedule must be one of {BRIDGE_SCHEDULES}",
                field="bridge_schedule",
            )
        if self.eps_stabilized <= 0:
            raise ConfigurationError("eps_stabilized must be positive", field="eps_stabilized")
        if self.bridge_prune_tol <= 0:
            raise ConfigurationError(
                "bridge_prune_tol must be positive", field="bridge_prune_tol"
            )


@dataclass(frozen=True)
class HeadReadSet:
    """Entries one head reads for a block, grouped by memory region."""

    sink: tuple[np.ndarray, ...]
    anchors: tuple[np.ndarray, ...]
    bridge: tuple[np.ndarray, ...]
    local: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class ReadSet:
    heads: dict[tuple[int, int], HeadReadSet]
    budget: int


@dataclass(frozen=True)
class BlockTrace:
    block_index: int
    first_frame: int
    segment_index: int
    age: int
    distance: Optional[int]
    window: int
    read_budget: int
    bridge_norm: float
    switch_flag: bool
    anchors_count: int


@dataclass(frozen=True)
class InjectionRecord:
    """Debug snapshot of one head's switch processing (test accessor)."""

    signal: TransitionSignal
    summaries: HeadSummaries
    gates: HeadGates
    bridge: Optional[BridgeMemory]


class _HeadState:
    __slots__ = ("sink", "local", "bridge", "bridge_initial_norm", "anchors",
                 "prev_block_mean", "last_block_mean")

    def __init__(self, w_max: int, max_anchors: int):
        self.sink: list[np.ndarray] = []
        self.local: deque[tuple[int, np.ndarray]] = deque(maxlen=w_max)
        self.bridge: Optional[BridgeMemory] = None
        self.bridge_initial_norm = 0.0
        self.anchors = AnchorStore(max_anchors)
        self.prev_block_mean: Optional[np.ndarray] = None
        self.last_block_mean: Optional[np.ndarray] = None

    def frames_in_order(self) -> list[np.ndarray]:
        return self.sink + [v for _, v in self.local]

    def stored_frame_count(self) -> int:
        return len(self.sink) + len(self.local)


class MemoryEngine:
    def __init__(
        self,
        cfg: EngineConfig,
        schedule: PromptSchedule,
        prompt_signatures,
    ):
        self.cfg = cfg
        self.schedule = schedule
        sigs = np.asarray(prompt_signatures, dtype=np.float64)
        expected = (cfg.layers, cfg.heads, schedule.segment_count, cfg.value_dim)
        if sigs.shape != expected:
            raise ConfigurationError(
                f"prompt_signatures shape {sigs.shape} does not match "
                f"(layers, heads, segments, value_dim) = {expected}",
                field="prompt_signatures",
            )
        if not np.all(np.isfinite(sigs)):
            raise ConfigurationError(
                "prompt_signatures contain non-finite values", field="prompt_signatures"
            )
        self.signatures = sigs.copy()
        self._heads = {
            (l, h): _HeadState(cfg.window.w_max, cfg.anchors.max_anchors)
            for l in range(cfg.layers)
            for h in range(cfg.heads)
        }
        self._next_frame = 0
        self._block_index = 0
        self._segment = 0
        self._traces: list[BlockTrace] = []
        self._last_injection: dict[tuple[int, int], InjectionRecord] = {}

    # -- accessors ---------------------------------------------------------

    @property
    def traces(self) -> tuple[BlockTrace, ...]:
        return tuple(self._traces)

    @property
    def blocks_expected(self) -> int:
        return -(-self.schedule.total_frames // self.cfg.frames_per_block)

    @property
    def done(self) -> bool:
        return self._next_frame >= self.schedule.total_frames

    def stored_frame_count(self, layer: int, head: int) -> int:
        return self._heads[(layer, head)].stored_frame_count()

    def bridge_state(self, layer: int, head: int) -> Optional[BridgeMemory]:
        return self._heads[(layer, head)].bridge

    def last_injection(self, layer: int, head: int) -> Optional[InjectionRecord]:
        return self._last_injection.get((layer, head))

    # -- switch handling ---------------------------------------------------

    def _finalize_segment(self, finished: int) -> None:
        cfg = self.cfg
        for (l, h), state in self._heads.items():
            frames = state.frames_in_order()
            if not frames:
                continue
            u = summarize_recent(frames, cfg.anchors.recent_frames)
            anchor = make_anchor(u, self.signatures[l, h, finished], cfg.anchors, finished)
            state.anchors.push(anchor)

    def _inject(self, new_segment: int) -> None:
        cfg = self.cfg
        for (l, h), state in self._heads.items():
            prev_sig = self.signatures[l, h, new_segment - 1]
            curr_sig = self.signatures[l, h, new_segment]
            delta = prompt_delta(prev_sig, curr_sig)
            rho = switch_strength(prev_sig, curr_sig)
            if state.last_block_mean is not None and state.prev_block_mean is not None:
                tangent = state.last_block_mean - state.prev_block_mean
            else:
                tangent = np.zeros(cfg.value_dim)
            # eps scales with the tangent's energy so stabilization strength
            # is magnitude-invariant; absolute fallback for a zero tangent
            mean_sq = float(np.dot(tangent, tangent)) / cfg.value_dim
            eps = cfg.eps_stabilized * mean_sq if mean_sq > 0.0 else cfg.eps_stabilized
            delta_perp = project_motion_neutral_stabilized(delta, tangent, eps)

            frames = state.frames_in_order()
            recent = (
                summarize_recent(frames, cfg.frames_per_block)
                if frames
                else np.zeros(cfg.value_dim)
            )
            sink = (
                np.mean(np.stack(state.sink), axis=0)
                if state.sink
                else np.zeros(cfg.value_dim)
            )
            summaries = HeadSummaries(recent=recent, sink=sink, layer_index=l, head_index=h)
            gates = head_gates(summaries, delta_perp, rho)
            if not state.sink:
                gates = HeadGates(g_recent=gates.g_recent, g_sink=0.0)

            if cfg.bridge_schedule == "off":
                state.bridge = None
                state.bridge_initial_norm = 0.0
            else:
                state.bridge = build_bridge(summaries, delta_perp, gates, cfg.bridge_schedule)
                state.bridge_initial_norm = bridge_norm(state.bridge)
            signal = TransitionSignal(
                delta=delta, delta_perp=delta_perp, strength=rho, tangent=tangent
            )
            self._last_injection[(l, h)] = InjectionRecord(
                signal=signal, summaries=summaries, gates=gates, bridge=state.bridge
            )

    # -- main step ----------------------------------------------------------

    def step_block(self, block_values) -> tuple[ReadSet, BlockTrace]:
        cfg = self.cfg
        if self.done:
            raise EngineStateError(
                f"rollout finished at frame {self.schedule.total_frames}"
            )
        t0 = self._next_frame
        frames_now = min(cfg.frames_per_block, self.schedule.total_frames - t0)
        arr = np.asarray(block_values, dtype=np.float64)
        expected = (cfg.layers, cfg.heads, frames_now, cfg.value_dim)
        if arr.shape != expected:
            raise ConfigurationError(
                f"block_values shape {arr.shape} does not match {expected}",
                field="block_values",
            )
        if not np.all(np.isfinite(arr)):
            raise ConfigurationError(
                "block_values contain non-finite values", field="block_values"
            )

        ps: PhaseState = phase_state(self.schedule, t0, cfg.window, cfg.frames_per_block)
        switched = ps.segment_index > self._segment
        if switched:
            for seg in range(self._segment + 1, ps.segment_index + 1):
                self._finalize_segment(seg - 1)
                self._inject(seg)
            self._segment = ps.segment_index

        read = self._assemble_read_set(ps)
        norm_at_read = self._total_bridge_norm()
        anchors_count = len(next(iter(self._heads.values())).anchors)

        self._append_frames(arr, t0, frames_now)
        self._age_bridges()

        trace = BlockTrace(
            block_index=self._block_index,
            first_frame=t0,
            segment_index=ps.segment_index,
            age=ps.age,
            distance=ps.distance,
            window=ps.window,
            read_budget=read.budget,
            bridge_norm=norm_at_read,
            switch_flag=switched,
            anchors_count=anchors_count,
        )
        self._traces.append(trace)
        self._block_index += 1
        self._next_frame += frames_now
        return read, trace

    def _assemble_read_set(self, ps: PhaseState) -> ReadSet:
        cfg = self.cfg
        heads: dict[tuple[int, int], HeadReadSet] = {}
        budget = 0
        for key, state in self._heads.items():
            local_read = min(ps.window, len(state.local))
            local = tuple(v.copy() for _, v in list(state.local)[len(state.local) - local_read:])
            sink = tuple(v.copy() for v in state.sink)
            anchors = tuple(a.vector for a in state.anchors.view())
            if state.bridge is not None:
                bridge = (state.bridge.bridge_sink.copy(), state.bridge.bridge_recent.copy())
            else:
                bridge = ()
            heads[key] = HeadReadSet(sink=sink, anchors=anchors, bridge=bridge, local=local)
            budget += (
                cfg.tokens_per_frame * (len(sink) + len(local))
                + len(bridge)
                + len(anchors)
            )
        return ReadSet(heads=heads, budget=budget)

    def _total_bridge_norm(self) -> float:
        total = 0.0
        for state in self._heads.values():
            n = bridge_norm(state.bridge)
            total += n * n
        return float(np.sqrt(total))

    def _append_frames(self, arr: np.ndarray, t0: int, frames_now: int) -> None:
        cfg = self.cfg
        for (l, h), state in self._heads.items():
            for f in range(frames_now):
                vec = arr[l, h, f].copy()
                if len(state.sink) < cfg.sink_frames:
                    state.sink.append(vec)
                else:
                    state.local.append((t0 + f, vec))
            block_mean = np.mean(arr[l, h], axis=0)
            state.prev_block_mean = state.last_block_mean
            state.last_block_mean = block_mean

    def _age_bridges(self) -> None:
        cfg = self.cfg
        for state in self._heads.values():
            if state.bridge is None:
                continue
            advanced = advance_bridge(state.bridge, cfg.bridge_lambda)
            state.bridge = prune_bridge(
                advanced, cfg.bridge_prune_tol, state.bridge_initial_norm
            )


@dataclass(frozen=True)
class BudgetReport:
    blocks: int
    mean_read_budget: float
    min_read_budget: int
    max_read_budget: int
    mean_window: float
    segment_mean_budgets: dict[int, float]


def budget_report(traces) -> BudgetReport:
    traces = list(traces)
    if not traces:
        raise ConfigurationError("budget_report needs at least one trace")
    budgets = [t.read_budget for t in traces]
    segments: dict[int, list[int]] = {}
    for t in traces:
        segments.setdefault(t.segment_index, []).append(t.read_budget)
    return BudgetReport(
        blocks=len(traces),
        mean_read_budget=sum(budgets) / len(budgets),
        min_read_budget=min(budgets),
        max_read_budget=max(budgets),
        mean_window=sum(t.window for t in traces) / len(traces),
        segment_mean_budgets={s: sum(v) / len(v) for s, v in sorted(segments.items())},
    )
