import { BufferShapeError } from "./errors.js";
import type { BufferPayload } from "./types.js";

export function elementCount(shape: number[]): number {
  return shape.reduce((acc, dim) => acc * dim, 1);
}

/** Validate a buffer payload; returns it unchanged for chaining. */
export function checkBuffer(buffer: BufferPayload): BufferPayload {
  const { shape, data } = buffer;
  if (shape.length === 0 || shape.some((d) => !Number.isInteger(d) || d < 1)) {
    throw new BufferShapeError(
      `shape must be non-empty positive integers, got [${shape.join(", ")}]`,
    );
  }
  const expected = elementCount(shape);
  if (expected !== data.length) {
    throw new BufferShapeError(
      `shape [${shape.join(", ")}] implies ${expected} elements, got ${data.length}`,
    );
  }
  return buffer;
}

export function makeBuffer(shape: number[], data: number[]): BufferPayload {
  return checkBuffer({ shape: [...shape], data });
}

/** Slice frames [t0, t0 + count) out of a [layers, heads, frames, dim] buffer.
 *
 * This is how a value stream exported by POST /simulate is cut into
 * per-block payloads for POST /engines/{id}/step.
 */
export function sliceFrames(buffer: BufferPayload, t0: number, count: number): BufferPayload {
  checkBuffer(buffer);
  if (buffer.shape.length !== 4) {
    throw new BufferShapeError(
      `expected a [layers, heads, frames, dim] buffer, got rank ${buffer.shape.length}`,
    );
  }
  const [layers, heads, frames, dim] = buffer.shape as [number, number, number, number];
  if (!Number.isInteger(t0) || !Number.isInteger(count) || t0 < 0 || count < 1 || t0 + count > frames) {
    throw new BufferShapeError(
      `frame slice [${t0}, ${t0 + count}) out of range for ${frames} frames`,
    );
  }
  const out = new Array<number>(layers * heads * count * dim);
  let write = 0;
  for (let l = 0; l < layers; l++) {
    for (let h = 0; h < heads; h++) {
      const base = ((l * heads + h) * frames + t0) * dim;
      for (let i = 0; i < count * dim; i++) {
        out[write++] = buffer.data[base + i]!;
      }
    }
  }
  return { shape: [layers, heads, count, dim], data: out };
}
