export {
  CONTEXT_MODES,
  ExtractError,
  LOGITS_DIM,
  isContextMode,
  validateJob,
} from './types.js'
export type { Bbox, ClipRecord, ContextMode, ExtractionJob, Frame, TrackRow } from './types.js'

export { decodeClip, encodeClip, encodeFrame, readClip } from './ppm.js'
export { bboxToPixelRect, maskContext, roundHalfEven } from './mask.js'
export { loadRoiTrack } from './tracks.js'
export type { TrackBoxes } from './tracks.js'
export {
  DEFAULT_WEIGHTS_PATH,
  ProjectionExtractor,
  STATS_DIM,
  WEIGHTS_FORMAT,
  clipStats,
  loadWeights,
} from './model.js'
export type { FeatureExtractor, Weights } from './model.js'
export { appendRecord, renderLine, sig9 } from './io.js'
export { extract } from './extract.js'
export type { ExtractOptions } from './extract.js'
