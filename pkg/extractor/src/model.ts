/** Feature extraction behind a small interface.

The real system runs clips through a pretrained two-stream action-recognition
network.  That network is deliberately out of scope here; what this module
pins down is the contract around it — a fixed-width logits vector computed
deterministically from the frames, with the weights loaded from a local file.

the reference `ProjectionExtractor` keeps the two-stream shape: an appearance
stream pools spatial grayscale structure across frames, a motion stream pools
frame-to-frame differences, and a fixed projection generated from the weights
file's seed maps the pooled statistics to the logits.
*/

import { readFile } from 'node:fs/promises'
import { fileURLToPath } from 'node:url'

import { ExtractError, type Frame } from './types.js'

/** Anything that turns decoded frames into a fixed-width embedding. */
export interface FeatureExtractor {
  readonly dim: number
  infer(frames: Frame[]): Float32Array
}

export interface Weights {
  format: string
  dim: number
  seed: number
}

export const WEIGHTS_FORMAT = 'extractor-weights'

/** The weights file shipped with the package. */
export const DEFAULT_WEIGHTS_PATH = fileURLToPath(new URL('../weights.json', import.meta.url))

export async function loadWeights(path: string): Promise<Weights> {
  let text: string
  try {
    text = await readFile(path, 'utf8')
  } catch (err) {
    throw new ExtractError(`cannot read weights file ${path}: ${(err as Error).message}`)
  }
  let obj: unknown
  try {
    obj = JSON.parse(text)
  } catch (err) {
    throw new ExtractError(`${path}: malformed JSON (${(err as Error).message})`)
  }
  const w = obj as Record<string, unknown>
  if (typeof obj !== 'object' || obj === null || w['format'] !== WEIGHTS_FORMAT) {
    throw new ExtractError(`${path}: not an ${WEIGHTS_FORMAT} file`)
  }
  const dim = w['dim']
  const seed = w['seed']
  if (typeof dim !== 'number' || !Number.isInteger(dim) || dim <= 0) {
    throw new ExtractError(`${path}: dim must be a positive integer`)
  }
  if (typeof seed !== 'number' || !Number.isInteger(seed) || seed < 0) {
    throw new ExtractError(`${path}: seed must be a non-negative integer`)
  }
  return { format: WEIGHTS_FORMAT, dim, seed }
}

// ---------------------------------------------------------------------------
// deterministic projection generation (splitmix64)
// ---------------------------------------------------------------------------

const MASK64 = (1n << 64n) - 1n

/** splitmix64: a tiny, well-mixed generator with a 64-bit state. */
function* splitmix64(seed: number): Generator<number> {
  let state = BigInt(seed) & MASK64
  for (;;) {
    state = (state + 0x9e3779b97f4a7c15n) & MASK64
    let z = state
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64
    z = z ^ (z >> 31n)
    // top 53 bits -> uniform double in [0, 1)
    yield Number(z >> 11n) / 2 ** 53
  }
}

// ---------------------------------------------------------------------------
// pooled clip statistics (the two streams)
// ---------------------------------------------------------------------------

const GRID = 8
/** appearance: 8x8 gray grid + RGB mean/std; motion: 8x8 |Δgray| grid + mean/std */
export const STATS_DIM = GRID * GRID + 6 + GRID * GRID + 2

function grayAt(pixels: Uint8Array, offset: number): number {
  return (pixels[offset]! + pixels[offset + 1]! + pixels[offset + 2]!) / (3 * 255)
}

/** Pool a clip into a fixed-length statistics vector with entries in [-?, 1]. */
export function clipStats(frames: Frame[]): Float64Array {
  if (frames.length === 0) {
    throw new ExtractError('cannot pool an empty clip')
  }
  const { width, height } = frames[0]!
  for (const frame of frames) {
    if (frame.width !== width || frame.height !== height) {
      throw new ExtractError(
        `all frames in a clip must share dimensions: ${width}x${height} vs ` +
          `${frame.width}x${frame.height}`,
      )
    }
  }

  const cells = GRID * GRID
  const appearSum = new Float64Array(cells)
  const motionSum = new Float64Array(cells)
  const cellCount = new Float64Array(cells)
  const channelSum = new Float64Array(3)
  const channelSqSum = new Float64Array(3)
  let diffSum = 0
  let diffSqSum = 0

  for (let t = 0; t < frames.length; t++) {
    const pixels = frames[t]!.pixels
    const prev = t > 0 ? frames[t - 1]!.pixels : null
    for (let y = 0; y < height; y++) {
      const cellRow = Math.floor((y * GRID) / height) * GRID
      for (let x = 0; x < width; x++) {
        const cell = cellRow + Math.floor((x * GRID) / width)
        const offset = (y * width + x) * 3
        const gray = grayAt(pixels, offset)
        appearSum[cell]! += gray
        cellCount[cell]! += 1
        for (let c = 0; c < 3; c++) {
          const v = pixels[offset + c]! / 255
          channelSum[c]! += v
          channelSqSum[c]! += v * v
        }
        if (prev !== null) {
          const diff = Math.abs(gray - grayAt(prev, offset))
          motionSum[cell]! += diff
          diffSum += diff
          diffSqSum += diff * diff
        }
      }
    }
  }

  const stats = new Float64Array(STATS_DIM)
  const nPixels = frames.length * width * height
  const nDiffs = (frames.length - 1) * width * height
  for (let cell = 0; cell < cells; cell++) {
    const count = cellCount[cell]!
    stats[cell] = count > 0 ? appearSum[cell]! / count : 0
  }
  for (let c = 0; c < 3; c++) {
    const mean = channelSum[c]! / nPixels
    stats[cells + c] = mean
    stats[cells + 3 + c] = Math.sqrt(Math.max(0, channelSqSum[c]! / nPixels - mean * mean))
  }
  const motionBase = cells + 6
  for (let cell = 0; cell < cells; cell++) {
    // motion cells see one fewer frame than appearance cells
    const count = (cellCount[cell]! / frames.length) * (frames.length - 1)
    stats[motionBase + cell] = count > 0 ? motionSum[cell]! / count : 0
  }
  if (nDiffs > 0) {
    const mean = diffSum / nDiffs
    stats[motionBase + cells] = mean
    stats[motionBase + cells + 1] = Math.sqrt(Math.max(0, diffSqSum / nDiffs - mean * mean))
  }
  return stats
}

// ---------------------------------------------------------------------------
// the reference extractor
// ---------------------------------------------------------------------------

export class ProjectionExtractor implements FeatureExtractor {
  readonly dim: number
  private readonly projection: Float64Array

  constructor(weights: Weights) {
    this.dim = weights.dim
    const rng = splitmix64(weights.seed)
    const scale = 1 / Math.sqrt(STATS_DIM)
    this.projection = new Float64Array(weights.dim * STATS_DIM)
    for (let i = 0; i < this.projection.length; i++) {
      this.projection[i] = (2 * rng.next().value - 1) * scale
    }
  }

  infer(frames: Frame[]): Float32Array {
    const stats = clipStats(frames)
    const logits = new Float32Array(this.dim)
    for (let k = 0; k < this.dim; k++) {
      let acc = 0
      const row = k * STATS_DIM
      for (let j = 0; j < STATS_DIM; j++) {
        acc += this.projection[row + j]! * stats[j]!
      }
      logits[k] = Math.fround(acc)
    }
    return logits
  }
}
