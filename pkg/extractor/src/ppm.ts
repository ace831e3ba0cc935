/** Clip format: one or more binary PPM (P6) frames concatenated in a file.

Each frame is self-describing — `P6`, whitespace-separated width, height,
and maxval (must be 255), one whitespace byte, then width*height*3 raw RGB
bytes — so a clip decodes frame by frame until the buffer is exhausted.
`#` comments are allowed inside the header, as the format permits.
*/

import { readFile } from 'node:fs/promises'

import { ExtractError, type Frame } from './types.js'

const MAXVAL = 255

function isSpace(byte: number): boolean {
  // space, \t, \n, \v, \f, \r
  return byte === 0x20 || (byte >= 0x09 && byte <= 0x0d)
}

/** Skip whitespace and `#`-to-end-of-line comments; return the next offset. */
function skipHeaderFiller(buf: Uint8Array, at: number): number {
  for (;;) {
    while (at < buf.length && isSpace(buf[at]!)) at++
    if (at < buf.length && buf[at] === 0x23 /* # */) {
      while (at < buf.length && buf[at] !== 0x0a) at++
      continue
    }
    return at
  }
}

function readHeaderInt(buf: Uint8Array, at: number, what: string): [number, number] {
  at = skipHeaderFiller(buf, at)
  const start = at
  let value = 0
  while (at < buf.length && buf[at]! >= 0x30 && buf[at]! <= 0x39) {
    value = value * 10 + (buf[at]! - 0x30)
    at++
  }
  if (at === start) {
    throw new ExtractError(`expected ${what} in PPM header at byte ${at}`)
  }
  return [value, at]
}

function decodeFrame(buf: Uint8Array, at: number): [Frame, number] {
  if (at + 2 > buf.length || buf[at] !== 0x50 /* P */ || buf[at + 1] !== 0x36 /* 6 */) {
    throw new ExtractError(`expected 'P6' magic at byte ${at}`)
  }
  at += 2
  let width: number
  let height: number
  let maxval: number
  ;[width, at] = readHeaderInt(buf, at, 'width')
  ;[height, at] = readHeaderInt(buf, at, 'height')
  ;[maxval, at] = readHeaderInt(buf, at, 'maxval')
  if (width <= 0 || height <= 0) {
    throw new ExtractError(`frame dimensions must be positive, got ${width}x${height}`)
  }
  if (maxval !== MAXVAL) {
    throw new ExtractError(`only maxval ${MAXVAL} is supported, got ${maxval}`)
  }
  if (at >= buf.length || !isSpace(buf[at]!)) {
    throw new ExtractError(`expected single whitespace after maxval at byte ${at}`)
  }
  at++
  const size = width * height * 3
  if (at + size > buf.length) {
    throw new ExtractError(
      `truncated pixel data: frame needs ${size} bytes, ${buf.length - at} left`,
    )
  }
  // copy into a plain Uint8Array so Buffer inputs don't leak their subclass
  const pixels = new Uint8Array(buf.subarray(at, at + size))
  return [{ width, height, pixels }, at + size]
}

/** Decode a whole clip buffer into its frames; every byte must be consumed. */
export function decodeClip(buf: Uint8Array): Frame[] {
  const frames: Frame[] = []
  let at = 0
  while (at < buf.length) {
    const [frame, next] = decodeFrame(buf, at)
    frames.push(frame)
    at = next
  }
  if (frames.length === 0) {
    throw new ExtractError('clip holds no frames')
  }
  return frames
}

/** Read and decode a clip file, prefixing errors with the path. */
export async function readClip(path: string): Promise<Frame[]> {
  let buf: Uint8Array
  try {
    buf = await readFile(path)
  } catch (err) {
    throw new ExtractError(`cannot read clip ${path}: ${(err as Error).message}`)
  }
  try {
    return decodeClip(buf)
  } catch (err) {
    throw new ExtractError(`${path}: ${(err as Error).message}`)
  }
}

/** Encode one frame as a P6 blob (the writing half of the clip format). */
export function encodeFrame(frame: Frame): Uint8Array {
  const { width, height, pixels } = frame
  if (pixels.length !== width * height * 3) {
    throw new ExtractError(
      `pixel buffer has ${pixels.length} bytes, expected ${width * height * 3}`,
    )
  }
  const header = new TextEncoder().encode(`P6\n${width} ${height}\n${MAXVAL}\n`)
  const out = new Uint8Array(header.length + pixels.length)
  out.set(header, 0)
  out.set(pixels, header.length)
  return out
}

/** Concatenate frames into a clip blob. */
export function encodeClip(frames: Frame[]): Uint8Array {
  const blobs = frames.map(encodeFrame)
  const total = blobs.reduce((n, b) => n + b.length, 0)
  const out = new Uint8Array(total)
  let at = 0
  for (const blob of blobs) {
    out.set(blob, at)
    at += blob.length
  }
  return out
}
