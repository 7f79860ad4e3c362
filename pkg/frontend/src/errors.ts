/** Client-side rejection of a malformed buffer payload. */
export class BufferShapeError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "BufferShapeError";
  }
}

/** Error response from the service, carrying the HTTP status and, when the
 * service provided them, its error code and the offending field. */
export class ServiceError extends Error {
  readonly status: number;
  readonly code?: string;
  readonly field?: string | null;

  constructor(status: number, message: string, code?: string, field?: string | null) {
    super(message);
    this.name = "ServiceError";
    this.status = status;
    this.code = code;
    this.field = field;
  }
}

/** Build a ServiceError from a non-2xx response body.
 *
 * The service reports domain errors as {code, message, field} and request
 * validation errors (422) as FastAPI's {detail: [...]}.
 */
export function toServiceError(status: number, payload: unknown): ServiceError {
  if (payload !== null && typeof payload === "object") {
    const body = payload as Record<string, unknown>;
    if (typeof body.message === "string") {
      return new ServiceError(
        status,
        body.message,
        typeof body.code === "string" ? body.code : undefined,
        typeof body.field === "string" ? body.field : null,
      );
    }
    if ("detail" in body) {
      return new ServiceError(status, JSON.stringify(body.detail), "validation");
    }
  }
  return new ServiceError(status, `request failed with status ${status}`);
}
