"""HTTP service wrapping the memory engine.

Engines live in process memory behind opaque ids; step calls on one engine
are serialized by a per-engine lock.  Domain errors surface as structured
JSON bodies {code, message, field} with 400 for configuration problems,
404 for unknown engines, and 409 for state violations.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import replace

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..config import parse_sim_config
from ..engine import BlockTrace, MemoryEngine, budget_report
from ..errors import ConfigurationError, EngineStateError
from ..rng import STREAM_VERSION
from ..simulate import compare_fixed_vs_adaptive, run
from ..verify import run_verification
from ..window import phase_state
from .models import (
    BufferPayload,
    BudgetReportModel,
    CheckModel,
    CompareRequest,
    CompareResponse,
    EngineCreateRequest,
    EngineCreateResponse,
    ReadCounts,
    ScheduleRequest,
    ScheduleResponse,
    ScheduleRow,
    SimulateRequest,
    SimulateResponse,
    StepRequest,
    StepResponse,
    TraceRow,
    TracesResponse,
    VerifyRequest,
    VerifyResponse,
    VersionResponse,
)


class _EngineSession:
    def __init__(self, engine: MemoryEngine):
        self.engine = engine
        self.lock = threading.Lock()


def _to_array(buffer: BufferPayload) -> np.ndarray:
    return np.array(buffer.data, dtype=np.float64).reshape(buffer.shape)


def _to_buffer(arr: np.ndarray) -> BufferPayload:
    return BufferPayload(shape=list(arr.shape), data=arr.ravel().tolist())


def _trace_row(t: BlockTrace) -> TraceRow:
    return TraceRow(
        block_index=t.block_index,
        first_frame=t.first_frame,
        segment_index=t.segment_index,
        age=t.age,
        distance=t.distance,
        window=t.window,
        read_budget=t.read_budget,
        bridge_norm=t.bridge_norm,
        switch_flag=t.switch_flag,
        anchors_count=t.anchors_count,
    )


def _report_model(report) -> BudgetReportModel:
    return BudgetReportModel(
        blocks=report.blocks,
        mean_read_budget=report.mean_read_budget,
        min_read_budget=report.min_read_budget,
        max_read_budget=report.max_read_budget,
        mean_window=report.mean_window,
        segment_mean_budgets=report.segment_mean_budgets,
    )


def _apply_overrides(sim, seed=None, injection=None, separation=None, fixed_window=False):
    if seed is not None:
        sim = replace(sim, seed=seed)
    if separation is not None:
        sim = replace(sim, signature_separation=separation)
    if injection is not None:
        sim = replace(sim, engine=replace(sim.engine, bridge_schedule=injection))
    if fixed_window:
        window = replace(sim.engine.window, w_min=sim.engine.window.w_max)
        sim = replace(sim, engine=replace(sim.engine, window=window))
    return sim


def create_app() -> FastAPI:
    app = FastAPI(title="streammem", version=__version__)
    sessions: dict[str, _EngineSession] = {}
    registry_lock = threading.Lock()

    @app.exception_handler(ConfigurationError)
    async def configuration_error(request: Request, exc: ConfigurationError):
        return JSONResponse(
            status_code=400,
            content={"code": "configuration", "message": str(exc), "field": exc.field},
        )

    @app.exception_handler(EngineStateError)
    async def state_error(request: Request, exc: EngineStateError):
        return JSONResponse(
            status_code=409,
            content={"code": "engine_state", "message": str(exc), "field": None},
        )

    def get_session(engine_id: str) -> _EngineSession:
        with registry_lock:
            session = sessions.get(engine_id)
        if session is None:
            raise EngineNotFound(engine_id)
        return session

    class EngineNotFound(Exception):
        def __init__(self, engine_id: str):
            self.engine_id = engine_id

    @app.exception_handler(EngineNotFound)
    async def not_found(request: Request, exc: EngineNotFound):
        return JSONResponse(
            status_code=404,
            content={
                "code": "not_found",
                "message": f"no engine {exc.engine_id}",
                "field": "engine_id",
            },
        )

    @app.get("/version", response_model=VersionResponse)
    def version():
        return VersionResponse(
            name="streammem", version=__version__, stream_version=STREAM_VERSION
        )

    @app.post("/engines", response_model=EngineCreateResponse)
    def create_engine(req: EngineCreateRequest):
        sim = parse_sim_config(req.config)
        signatures = _to_array(req.signatures)
        engine = MemoryEngine(sim.engine, sim.schedule, signatures)
        engine_id = uuid.uuid4().hex
        with registry_lock:
            sessions[engine_id] = _EngineSession(engine)
        return EngineCreateResponse(
            engine_id=engine_id,
            blocks_expected=engine.blocks_expected,
            segment_count=sim.schedule.segment_count,
        )

    @app.post("/engines/{engine_id}/step", response_model=StepResponse)
    def step_engine(engine_id: str, req: StepRequest):
        session = get_session(engine_id)
        with session.lock:
            read, trace = session.engine.step_block(_to_array(req.block_values))
        counts = ReadCounts(
            sink_frames=sum(len(h.sink) for h in read.heads.values()),
            local_frames=sum(len(h.local) for h in read.heads.values()),
            bridge_entries=sum(len(h.bridge) for h in read.heads.values()),
            anchor_entries=sum(len(h.anchors) for h in read.heads.values()),
            budget=read.budget,
        )
        return StepResponse(trace=_trace_row(trace), read_counts=counts)

    @app.get("/engines/{engine_id}/traces", response_model=TracesResponse)
    def engine_traces(engine_id: str):
        session = get_session(engine_id)
        with session.lock:
            rows = [_trace_row(t) for t in session.engine.traces]
        return TracesResponse(rows=rows)

    @app.get("/engines/{engine_id}/report", response_model=BudgetReportModel)
    def engine_report(engine_id: str):
        session = get_session(engine_id)
        with session.lock:
            report = budget_report(session.engine.traces)
        return _report_model(report)

    @app.delete("/engines/{engine_id}")
    def delete_engine(engine_id: str):
        with registry_lock:
            if engine_id not in sessions:
                raise EngineNotFound(engine_id)
            del sessions[engine_id]
        return {"deleted": True}

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest):
        sim = _apply_overrides(
            parse_sim_config(req.config),
            seed=req.seed,
            injection=req.injection,
            separation=req.separation,
            fixed_window=req.fixed_window,
        )
        result = run(sim)
        return SimulateResponse(
            report=_report_model(result.report),
            rows=[_trace_row(t) for t in result.traces] if req.include_rows else None,
            signatures=_to_buffer(result.signatures) if req.include_stream else None,
            stream=_to_buffer(result.stream) if req.include_stream else None,
        )

    @app.post("/simulate/compare", response_model=CompareResponse)
    def simulate_compare(req: CompareRequest):
        sim = _apply_overrides(parse_sim_config(req.config), seed=req.seed)
        report = compare_fixed_vs_adaptive(sim)
        return CompareResponse(
            adaptive_mean_budget=report.adaptive_mean_budget,
            fixed_mean_budget=report.fixed_mean_budget,
            savings_ratio=report.savings_ratio,
            adaptive_segment_means=report.adaptive_segment_means,
            fixed_segment_means=report.fixed_segment_means,
            boundary_window_maxima=list(report.boundary_window_maxima),
            adaptive_local_read_total=report.adaptive_local_read_total,
            fixed_local_read_total=report.fixed_local_read_total,
            local_savings_ratio=report.local_savings_ratio,
        )

    @app.post("/schedule", response_model=ScheduleResponse)
    def schedule_table(req: ScheduleRequest):
        sim = parse_sim_config(req.config)
        rows = []
        for t in range(sim.schedule.total_frames):
            ps = phase_state(
                sim.schedule, t, sim.engine.window, sim.engine.frames_per_block
            )
            rows.append(
                ScheduleRow(
                    t=ps.t,
                    segment=ps.segment_index,
                    age=ps.age,
                    distance=ps.distance,
                    w_post=ps.w_post,
                    w_pre=ps.w_pre,
                    w=ps.w,
                    window=ps.window,
                )
            )
        return ScheduleResponse(rows=rows)

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest):
        report = run_verification(cases=req.cases, seed=req.seed, dims=req.dims)
        return VerifyResponse(
            passed=report.passed,
            checks=[
                CheckModel(
                    name=c.name,
                    cases=c.cases,
                    failures=list(c.failures),
                    max_error=c.max_error,
                    passed=c.passed,
                )
                for c in report.checks
            ],
        )

    return app
