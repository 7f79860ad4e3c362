import { checkBuffer, sliceFrames } from "./buffers.js";
import { ServiceError, toServiceError } from "./errors.js";
import type {
  BudgetReport,
  BufferPayload,
  CompareOptions,
  CompareResult,
  EngineInfo,
  ScheduleRow,
  SimConfigDocument,
  SimulateOptions,
  SimulateResult,
  StepResult,
  TraceRow,
  VerifyOptions,
  VerifyResult,
  VersionInfo,
} from "./types.js";

/** Service version this client's wire types were written against. */
export const SUPPORTED_SERVER_VERSION = "0.1.0";

type FetchLike = typeof fetch;

export class StreammemClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl: FetchLike = fetch) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl;
  }

  /** @internal shared transport used by EngineSession as well */
  async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const payload: unknown = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw toServiceError(response.status, payload);
    }
    return payload as T;
  }

  version(): Promise<VersionInfo> {
    return this.request("GET", "/version");
  }

  /** Fetch the server version and reject mismatched wire formats. */
  async assertCompatible(): Promise<VersionInfo> {
    const info = await this.version();
    if (info.version !== SUPPORTED_SERVER_VERSION) {
      throw new ServiceError(
        0,
        `server ${info.name} ${info.version} does not match supported version ${SUPPORTED_SERVER_VERSION}`,
        "version_mismatch",
      );
    }
    return info;
  }

  /** Create an engine from a config document and a [layers, heads, segments, dim]
   * prompt-signature buffer. */
  async createEngine(
    signatures: BufferPayload,
    config?: SimConfigDocument | null,
  ): Promise<EngineSession> {
    checkBuffer(signatures);
    const info = await this.request<EngineInfo>("POST", "/engines", {
      config: config ?? null,
      signatures,
    });
    return new EngineSession(this, info);
  }

  simulate(options: SimulateOptions = {}): Promise<SimulateResult> {
    return this.request("POST", "/simulate", options);
  }

  compare(options: CompareOptions = {}): Promise<CompareResult> {
    return this.request("POST", "/simulate/compare", options);
  }

  async schedule(config?: SimConfigDocument | null): Promise<ScheduleRow[]> {
    const response = await this.request<{ rows: ScheduleRow[] }>("POST", "/schedule", {
      config: config ?? null,
    });
    return response.rows;
  }

  verify(options: VerifyOptions = {}): Promise<VerifyResult> {
    return this.request("POST", "/verify", options);
  }
}

/** Handle to one server-side engine; step calls must stay sequential. */
export class EngineSession {
  readonly id: string;
  readonly blocksExpected: number;
  readonly segmentCount: number;
  private closed = false;

  constructor(private readonly client: StreammemClient, info: EngineInfo) {
    this.id = info.engine_id;
    this.blocksExpected = info.blocks_expected;
    this.segmentCount = info.segment_count;
  }

  /** Advance one block with a [layers, heads, frames, dim] value buffer. */
  step(blockValues: BufferPayload): Promise<StepResult> {
    checkBuffer(blockValues);
    return this.client.request("POST", `/engines/${this.id}/step`, {
      block_values: blockValues,
    });
  }

  /** Drive the engine over a whole [layers, heads, frames, dim] stream,
   * `framesPerBlock` frames at a time; returns the trace rows in order. */
  async run(stream: BufferPayload, framesPerBlock: number): Promise<TraceRow[]> {
    checkBuffer(stream);
    const frames = stream.shape[2];
    if (stream.shape.length !== 4 || frames === undefined) {
      throw new ServiceError(0, "stream buffer must be rank 4", "client");
    }
    const rows: TraceRow[] = [];
    for (let t = 0; t < frames; t += framesPerBlock) {
      const count = Math.min(framesPerBlock, frames - t);
      const result = await this.step(sliceFrames(stream, t, count));
      rows.push(result.trace);
    }
    return rows;
  }

  async traces(): Promise<TraceRow[]> {
    const response = await this.client.request<{ rows: TraceRow[] }>(
      "GET",
      `/engines/${this.id}/traces`,
    );
    return response.rows;
  }

  report(): Promise<BudgetReport> {
    return this.client.request("GET", `/engines/${this.id}/report`);
  }

  async close(): Promise<void> {
    if (!this.closed) {
      await this.client.request("DELETE", `/engines/${this.id}`);
      this.closed = true;
    }
  }
}
