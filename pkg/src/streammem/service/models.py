"""Request and response schemas for the HTTP service."""

from __future__ import annotations

import math
from typing import Any, Optional

from pydantic import BaseModel, Field, model_validator


class BufferPayload(BaseModel):
    """Row-major double-precision buffer with an explicit shape."""

    shape: list[int]
    data: list[float]

    @model_validator(mode="after")
    def check_size(self):
        if not self.shape or any(d < 1 for d in self.shape):
            raise ValueError("shape must be non-empty positive dimensions")
        if math.prod(self.shape) != len(self.data):
            raise ValueError(
                f"shape {self.shape} implies {math.prod(self.shape)} elements, "
                f"got {len(self.data)}"
            )
        return self


class EngineCreateRequest(BaseModel):
    config: Optional[dict[str, Any]] = None
    signatures: BufferPayload


class EngineCreateResponse(BaseModel):
    engine_id: str
    blocks_expected: int
    segment_count: int


class StepRequest(BaseModel):
    block_values: BufferPayload


class TraceRow(BaseModel):
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


class ReadCounts(BaseModel):
    sink_frames: int
    local_frames: int
    bridge_entries: int
    anchor_entries: int
    budget: int


class StepResponse(BaseModel):
    trace: TraceRow
    read_counts: ReadCounts


class TracesResponse(BaseModel):
    rows: list[TraceRow]


class BudgetReportModel(BaseModel):
    blocks: int
    mean_read_budget: float
    min_read_budget: int
    max_read_budget: int
    mean_window: float
    segment_mean_budgets: dict[int, float]


class SimulateRequest(BaseModel):
    config: Optional[dict[str, Any]] = None
    seed: Optional[int] = None
    injection: Optional[str] = None
    separation: Optional[float] = None
    fixed_window: bool = False
    include_rows: bool = True
    include_stream: bool = False


class SimulateResponse(BaseModel):
    report: BudgetReportModel
    rows: Optional[list[TraceRow]] = None
    signatures: Optional[BufferPayload] = None
    stream: Optional[BufferPayload] = None


class CompareRequest(BaseModel):
    config: Optional[dict[str, Any]] = None
    seed: Optional[int] = None


class CompareResponse(BaseModel):
    adaptive_mean_budget: float
    fixed_mean_budget: float
    savings_ratio: float
    adaptive_segment_means: dict[int, float]
    fixed_segment_means: dict[int, float]
    boundary_window_maxima: list[int]
    adaptive_local_read_total: int
    fixed_local_read_total: int
    local_savings_ratio: float


class ScheduleRequest(BaseModel):
    config: Optional[dict[str, Any]] = None


class ScheduleRow(BaseModel):
    t: int
    segment: int
    age: int
    distance: Optional[int]
    w_post: float
    w_pre: float
    w: float
    window: int


class ScheduleResponse(BaseModel):
    rows: list[ScheduleRow]


class VerifyRequest(BaseModel):
    cases: int = Field(default=100)
    seed: int = 0
    dims: list[int] = Field(default=[2, 3, 8, 32])


class CheckModel(BaseModel):
    name: str
    cases: int
    failures: list[str]
    max_error: float
    passed: bool


class VerifyResponse(BaseModel):
    passed: bool
    checks: list[CheckModel]


class VersionResponse(BaseModel):
    name: str
    version: str
    stream_version: str
