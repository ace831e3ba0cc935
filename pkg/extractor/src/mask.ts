/** Context removal: keep a box of pixels, flood everything else with a fill value.

Pixel-rect semantics match the downstream toolkit exactly, including its
round-half-to-even edge handling, so a box masks the same pixels on both
sides of the pipeline.
*/

import { ExtractError, type Bbox, type Frame } from './types.js'

/** Round half to even (the rounding the downstream rect computation uses). */
export function roundHalfEven(x: number): number {
  const floor = Math.floor(x)
  const diff = x - floor
  if (diff > 0.5) return floor + 1
  if (diff < 0.5) return floor
  return floor % 2 === 0 ? floor : floor + 1
}

/** Map a real-valued (cx, cy, w, h) box to a clipped integer rect [x1, x2) x [y1, y2). */
export function bboxToPixelRect(
  bbox: Bbox,
  width: number,
  height: number,
): [number, number, number, number] {
  const [cx, cy, w, h] = bbox
  let x1 = roundHalfEven(cx - w / 2)
  let x2 = roundHalfEven(cx + w / 2)
  let y1 = roundHalfEven(cy - h / 2)
  let y2 = roundHalfEven(cy + h / 2)
  x1 = Math.max(0, x1)
  x2 = Math.min(width, x2)
  y1 = Math.max(0, y1)
  y2 = Math.min(height, y2)
  if (x2 <= x1 || y2 <= y1) {
    return [0, 0, 0, 0]
  }
  return [x1, x2, y1, y2]
}

/** Copy the pixels inside `bbox` and set every pixel outside it to `fill`.

A degenerate or fully out-of-frame box yields an all-fill frame.  Output
dimensions always equal input dimensions, and masking twice with the same
box equals masking once.
*/
export function maskContext(frame: Frame, bbox: Bbox, fill = 0): Frame {
  if (!Number.isInteger(fill) || fill < 0 || fill > 255) {
    throw new ExtractError(`fill must be an 8-bit value, got ${fill}`)
  }
  const { width, height, pixels } = frame
  const [x1, x2, y1, y2] = bboxToPixelRect(bbox, width, height)
  const out = new Uint8Array(pixels.length).fill(fill)
  for (let y = y1; y < y2; y++) {
    const row = y * width * 3
    out.set(pixels.subarray(row + x1 * 3, row + x2 * 3), row + x1 * 3)
  }
  return { width, height, pixels: out }
}
