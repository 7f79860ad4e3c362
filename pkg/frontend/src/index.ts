export { checkBuffer, elementCount, makeBuffer, sliceFrames } from "./buffers.js";
export {
  EngineSession,
  StreammemClient,
  SUPPORTED_SERVER_VERSION,
} from "./client.js";
export { BufferShapeError, ServiceError, toServiceError } from "./errors.js";
export type {
  BudgetReport,
  BufferPayload,
  CompareOptions,
  CompareResult,
  EngineInfo,
  InjectionSchedule,
  ReadCounts,
  ScheduleRow,
  SimConfigDocument,
  SimulateOptions,
  SimulateResult,
  StepResult,
  TraceRow,
  VerifyCheck,
  VerifyOptions,
  VerifyResult,
  VersionInfo,
} from "./types.js";

export const CLIENT_VERSION = "0.1.0";
