/** The extraction pipeline: decode, remove context, infer, append. */

import { existsSync } from 'node:fs'

import { appendRecord } from './io.js'
import { maskContext } from './mask.js'
import {
  DEFAULT_WEIGHTS_PATH,
  ProjectionExtractor,
  loadWeights,
  type FeatureExtractor,
} from './model.js'
import { readClip } from './ppm.js'
import { loadRoiTrack } from './tracks.js'
import {
  ExtractError,
  LOGITS_DIM,
  validateJob,
  type Bbox,
  type ClipRecord,
  type ExtractionJob,
  type Frame,
} from './types.js'

/** Degenerate box: masks to an all-fill frame. */
const NO_BOX: Bbox = [0, 0, 0, 0]

export interface ExtractOptions {
  /** embeddings.jsonl to append to */
  outPath: string
  /** weights file for the bundled extractor (default: the shipped weights) */
  weightsPath?: string
  /** substitute feature extractor; overrides weightsPath */
  extractor?: FeatureExtractor
}

async function applyContextMode(job: ExtractionJob, frames: Frame[]): Promise<Frame[]> {
  if (job.contextMode === 'raw') {
    return frames
  }
  // both masked modes require the track file, but only bb masks here: vibe
  // clips arrive with silhouette masking already rendered into the frames.
  const tracksPath = job.tracksPath!
  if (!existsSync(tracksPath)) {
    throw new ExtractError(`tracks file not found: ${tracksPath}`)
  }
  if (job.contextMode === 'vibe') {
    return frames
  }
  const boxes = await loadRoiTrack(tracksPath)
  let first = Number.POSITIVE_INFINITY
  let last = Number.NEGATIVE_INFINITY
  for (const frame of boxes.keys()) {
    first = Math.min(first, frame)
    last = Math.max(last, frame)
  }
  return frames.map((frame, index) => {
    const bbox = boxes.get(index)
    if (bbox === undefined) {
      if (index < first || index > last) {
        // the tracker emits boxes only while the runner is confirmed; with
        // no runner located, the whole frame is context and gets flooded
        return maskContext(frame, NO_BOX)
      }
      throw new ExtractError(
        `${tracksPath} has a gap at frame ${index}; the tracker emits contiguous coverage`,
      )
    }
    return maskContext(frame, bbox)
  })
}

/** Run one job end to end and append its record to `opts.outPath`. */
export async function extract(job: ExtractionJob, opts: ExtractOptions): Promise<ClipRecord> {
  validateJob(job)
  const frames = await readClip(job.clipPath)
  const prepared = await applyContextMode(job, frames)

  const extractor =
    opts.extractor ?? new ProjectionExtractor(await loadWeights(opts.weightsPath ?? DEFAULT_WEIGHTS_PATH))
  const logits = extractor.infer(prepared)
  if (logits.length !== LOGITS_DIM) {
    throw new ExtractError(
      `extractor produced ${logits.length} logits, the embeddings format needs ${LOGITS_DIM}`,
    )
  }
  for (const v of logits) {
    if (!Number.isFinite(v)) {
      throw new ExtractError('extractor produced non-finite logits')
    }
  }

  const record: ClipRecord = {
    runner: job.runnerId,
    rp: job.rpId,
    mode: job.contextMode,
    logits,
  }
  await appendRecord(opts.outPath, record)
  return record
}
