"""Deterministic synthetic rollout harness.

Stands in for the generation backbone: produces seeded prompt signatures
with a controllable switch strength, unit-norm random-walk value streams,
and drives the engine end to end.  Every output is a pure function of
(seed, config); the generator algorithm is named by ``rng.STREAM_VERSION``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .engine import BlockTrace, BudgetReport, EngineConfig, MemoryEngine, budget_report
from .errors import ConfigurationError
from .rng import DeterministicStream
from .window import PromptSchedule

DEFAULT_SCHEDULE = PromptSchedule(boundaries=(40, 80, 120, 160, 200), total_frames=240)


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    engine: EngineConfig = field(default_factory=EngineConfig)
    schedule: PromptSchedule = field(default_factory=lambda: DEFAULT_SCHEDULE)
    drift_sigma: float = 0.05
    signature_separation: float = 1.0

    def __post_init__(self):
        if self.drift_sigma <= 0:
            raise ConfigurationError("drift_sigma must be positive", field="drift_sigma")
        if not 0.0 <= self.signature_separation <= 2.0:
            raise ConfigurationError(
                "signature_separation must be in [0, 2]", field="signature_separation"
            )


def synth_prompt_signatures(
    seed: int, segments: int, layers: int, heads: int, dim: int, separation: float
) -> np.ndarray:
    """Unit-norm signatures with switch_strength ~ separation between neighbors.

    Consecutive signatures are built by spherical interpolation: step away
    from the previous signature by angle arccos(1 - separation) toward a
    random orthogonal direction.  separation == 0 repeats the previous
    signature bitwise.
    """
    if min(segments, layers, heads, dim) < 1:
        raise ConfigurationError("segments, layers, heads, dim must be positive")
    if not 0.0 <= separation <= 2.0:
        raise ConfigurationError(
            "separation must be in [0, 2]", field="signature_separation"
        )
    if separation > 0.0 and dim < 2:
        raise ConfigurationError(
            "separation > 0 needs value_dim >= 2 to rotate away from the "
            "previous signature",
            field="signature_separation",
        )
    theta = math.acos(min(max(1.0 - separation, -1.0), 1.0))
    out = np.empty((layers, heads, segments, dim))
    for l in range(layers):
        for h in range(heads):
            stream = DeterministicStream(seed, "signatures", l, h)
            p = stream.unit_vector(dim)
            out[l, h, 0] = p
            for m in range(1, segments):
                if separation == 0.0:
                    out[l, h, m] = p
                    continue
                q = stream.unit_vector(dim)
                q = q - float(np.dot(q, p)) * p
                qn = float(np.linalg.norm(q))
                while qn < 1e-9:
                    q = stream.unit_vector(dim)
                    q = q - float(np.dot(q, p)) * p
                    qn = float(np.linalg.norm(q))
                p = math.cos(theta) * p + math.sin(theta) * (q / qn)
                p = p / float(np.linalg.norm(p))
                out[l, h, m] = p
    return out


def synth_value_stream(
    seed: int, layers: int, heads: int, total_frames: int, dim: int, sigma: float
) -> np.ndarray:
    """Per-head unit-norm random walks v_t = normalize(v_{t-1} + sigma*g_t)."""
    if sigma <= 0:
        raise ConfigurationError("sigma must be positive", field="drift_sigma")
    out = np.empty((layers, heads, total_frames, dim))
    for l in range(layers):
        for h in range(heads):
            stream = DeterministicStream(seed, "values", l, h)
            v = stream.unit_vector(dim)
            out[l, h, 0] = v
            for t in range(1, total_frames):
                step = v + sigma * stream.normals(dim)
                norm = float(np.linalg.norm(step))
                while norm == 0.0:
                    step = v + sigma * stream.normals(dim)
                    norm = float(np.linalg.norm(step))
                v = step / norm
                out[l, h, t] = v
    return out


@dataclass(frozen=True)
class SimResult:
    traces: tuple[BlockTrace, ...]
    report: BudgetReport
    signatures: np.ndarray
    stream: np.ndarray


def run(sim: SimConfig) -> SimResult:
    """Full rollout at the configured schedule; returns traces and report."""
    cfg, schedule = sim.engine, sim.schedule
    signatures = synth_prompt_signatures(
        sim.seed, schedule.segment_count, cfg.layers, cfg.heads, cfg.value_dim,
        sim.signature_separation,
    )
    stream = synth_value_stream(
        sim.seed, cfg.layers, cfg.heads, schedule.total_frames, cfg.value_dim,
        sim.drift_sigma,
    )
    engine = MemoryEngine(cfg, schedule, signatures)
    _drive(engine, stream)
    traces = engine.traces
    return SimResult(
        traces=traces, report=budget_report(traces), signatures=signatures, stream=stream
    )


def _drive(engine: MemoryEngine, stream: np.ndarray) -> list[int]:
    """Step the engine over the whole stream; returns per-block local reads."""
    b = engine.cfg.frames_per_block
    total = engine.schedule.total_frames
    local_reads = []
    t = 0
    while t < total:
        frames = min(b, total - t)
        read, _ = engine.step_block(stream[:, :, t:t + frames, :])
        local_reads.append(sum(len(h.local) for h in read.heads.values()))
        t += frames
    return local_reads


@dataclass(frozen=True)
class ComparisonReport:
    adaptive_mean_budget: float
    fixed_mean_budget: float
    savings_ratio: float
    adaptive_segment_means: dict[int, float]
    fixed_segment_means: dict[int, float]
    boundary_window_maxima: tuple[int, ...]
    adaptive_local_read_total: int
    fixed_local_read_total: int
    local_savings_ratio: float


def compare_fixed_vs_adaptive(sim: SimConfig) -> ComparisonReport:
    """Run adaptive and fixed-window engines on bit-identical streams.

    The fixed reference pins the window at w_max; both engines consume the
    same signatures and value stream, so any budget difference comes from
    the window policy alone.
    """
    cfg, schedule = sim.engine, sim.schedule
    signatures = synth_prompt_signatures(
        sim.seed, schedule.segment_count, cfg.layers, cfg.heads, cfg.value_dim,
        sim.signature_separation,
    )
    stream = synth_value_stream(
        sim.seed, cfg.layers, cfg.heads, schedule.total_frames, cfg.value_dim,
        sim.drift_sigma,
    )
    fixed_cfg = replace(cfg, window=replace(cfg.window, w_min=cfg.window.w_max))

    adaptive = MemoryEngine(cfg, schedule, signatures)
    adaptive_locals = _drive(adaptive, stream)
    fixed = MemoryEngine(fixed_cfg, schedule, signatures)
    fixed_locals = _drive(fixed, stream)

    a_report = budget_report(adaptive.traces)
    f_report = budget_report(fixed.traces)

    maxima = []
    for seg in range(1, schedule.segment_count):
        windows = [t.window for t in adaptive.traces if t.segment_index == seg]
        if windows:
            maxima.append(max(t.window for t in adaptive.traces
                              if t.segment_index == seg and t.switch_flag))
    a_local, f_local = sum(adaptive_locals), sum(fixed_locals)
    return ComparisonReport(
        adaptive_mean_budget=a_report.mean_read_budget,
        fixed_mean_budget=f_report.mean_read_budget,
        savings_ratio=1.0 - a_report.mean_read_budget / f_report.mean_read_budget,
        adaptive_segment_means=a_report.segment_mean_budgets,
        fixed_segment_means=f_report.segment_mean_budgets,
        boundary_window_maxima=tuple(maxima),
        adaptive_local_read_total=a_local,
        fixed_local_read_total=f_local,
        local_savings_ratio=(1.0 - a_local / f_local) if f_local else 0.0,
    )
