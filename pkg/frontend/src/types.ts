/** Wire types for the streammem HTTP service (field names match the wire). */

/** Row-major double-precision buffer with an explicit shape. */
export interface BufferPayload {
  shape: number[];
  data: number[];
}

export interface VersionInfo {
  name: string;
  version: string;
  stream_version: string;
}

/** One block of the rollout trace. `distance` is null in the final segment. */
export interface TraceRow {
  block_index: number;
  first_frame: number;
  segment_index: number;
  age: number;
  distance: number | null;
  window: number;
  read_budget: number;
  bridge_norm: number;
  switch_flag: boolean;
  anchors_count: number;
}

export interface ReadCounts {
  sink_frames: number;
  local_frames: number;
  bridge_entries: number;
  anchor_entries: number;
  budget: number;
}

export interface StepResult {
  trace: TraceRow;
  read_counts: ReadCounts;
}

export interface BudgetReport {
  blocks: number;
  mean_read_budget: number;
  min_read_budget: number;
  max_read_budget: number;
  mean_window: number;
  segment_mean_budgets: Record<string, number>;
}

export interface EngineInfo {
  engine_id: string;
  blocks_expected: number;
  segment_count: number;
}

/** Config document in the same shape as the YAML config file. */
export type SimConfigDocument = Record<string, unknown>;

export type InjectionSchedule = "one_shot" | "constant" | "decayed" | "off";

export interface SimulateOptions {
  config?: SimConfigDocument | null;
  seed?: number;
  injection?: InjectionSchedule;
  separation?: number;
  fixed_window?: boolean;
  include_rows?: boolean;
  include_stream?: boolean;
}

export interface SimulateResult {
  report: BudgetReport;
  rows?: TraceRow[] | null;
  signatures?: BufferPayload | null;
  stream?: BufferPayload | null;
}

export interface CompareOptions {
  config?: SimConfigDocument | null;
  seed?: number;
}

export interface CompareResult {
  adaptive_mean_budget: number;
  fixed_mean_budget: number;
  savings_ratio: number;
  adaptive_segment_means: Record<string, number>;
  fixed_segment_means: Record<string, number>;
  boundary_window_maxima: number[];
  adaptive_local_read_total: number;
  fixed_local_read_total: number;
  local_savings_ratio: number;
}

/** One frame of the phase-adaptive window table. */
export interface ScheduleRow {
  t: number;
  segment: number;
  age: number;
  distance: number | null;
  w_post: number;
  w_pre: number;
  w: number;
  window: number;
}

export interface VerifyOptions {
  cases?: number;
  seed?: number;
  dims?: number[];
}

export interface VerifyCheck {
  name: string;
  cases: number;
  failures: string[];
  max_error: number;
  passed: boolean;
}

export interface VerifyResult {
  passed: boolean;
  checks: VerifyCheck[];
}
