/** Shared record types and the extraction job contract. */

export const CONTEXT_MODES = ['raw', 'bb', 'vibe'] as const
export type ContextMode = (typeof CONTEXT_MODES)[number]

/** Embedding width the downstream toolkit expects on every line. */
export const LOGITS_DIM = 400

/** An input record or file violates one of the pipeline contracts. */
export class ExtractError extends Error {
  override name = 'ExtractError'
}

/** Box as (cx, cy, w, h) in pixels, matching detections and track rows. */
export type Bbox = readonly [number, number, number, number]

/** One decoded RGB frame, 8 bits per channel, row-major interleaved. */
export interface Frame {
  width: number
  height: number
  /** length === width * height * 3 */
  pixels: Uint8Array
}

/** One clip to embed: which runner, where, and how much context to keep. */
export interface ExtractionJob {
  clipPath: string
  runnerId: string
  rpId: number
  contextMode: ContextMode
  /** Runner-of-interest track (tracks.jsonl); required for bb and vibe modes. */
  tracksPath?: string
}

/** The embedding emitted for one clip, in the downstream file's field names. */
export interface ClipRecord {
  runner: string
  rp: number
  mode: ContextMode
  logits: Float32Array
}

/** One line of tracks.jsonl as the tracker writes it. */
export interface TrackRow {
  frame: number
  id: number
  bbox: Bbox
  source: string
}

export function isContextMode(value: unknown): value is ContextMode {
  return typeof value === 'string' && (CONTEXT_MODES as readonly string[]).includes(value)
}

/** Check a job's own invariants (not the files it points at). */
export function validateJob(job: ExtractionJob): void {
  if (!job.clipPath) {
    throw new ExtractError('job needs a clip path')
  }
  if (!job.runnerId) {
    throw new ExtractError('job needs a non-empty runner id')
  }
  if (!Number.isInteger(job.rpId)) {
    throw new ExtractError(`rp id must be an integer, got ${job.rpId}`)
  }
  if (!isContextMode(job.contextMode)) {
    throw new ExtractError(
      `context mode must be one of ${CONTEXT_MODES.join(', ')}, got '${String(job.contextMode)}'`,
    )
  }
  if (job.contextMode !== 'raw' && !job.tracksPath) {
    throw new ExtractError(`context mode '${job.contextMode}' requires a tracks file`)
  }
}
