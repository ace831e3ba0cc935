/** Reader for the tracker's runner-of-interest output (tracks.jsonl). */

import { readFile } from 'node:fs/promises'

import { ExtractError, type Bbox } from './types.js'

/** Per-frame box of the runner of interest. */
export type TrackBoxes = Map<number, Bbox>

function parseRow(obj: unknown, where: string): { frame: number; id: number; bbox: Bbox } {
  if (typeof obj !== 'object' || obj === null) {
    throw new ExtractError(`${where}: track row must be an object`)
  }
  const row = obj as Record<string, unknown>
  for (const key of ['frame', 'id', 'bbox', 'source']) {
    if (!(key in row)) {
      throw new ExtractError(`${where}: missing field '${key}'`)
    }
  }
  const frame = row['frame']
  const id = row['id']
  const bbox = row['bbox']
  if (typeof frame !== 'number' || !Number.isInteger(frame) || frame < 0) {
    throw new ExtractError(`${where}: frame must be a non-negative integer`)
  }
  if (typeof id !== 'number' || !Number.isInteger(id)) {
    throw new ExtractError(`${where}: id must be an integer`)
  }
  if (
    !Array.isArray(bbox) ||
    bbox.length !== 4 ||
    !bbox.every((v) => typeof v === 'number' && Number.isFinite(v))
  ) {
    throw new ExtractError(`${where}: bbox must be 4 finite numbers (cx, cy, w, h)`)
  }
  return { frame, id, bbox: bbox as unknown as Bbox }
}

/** Load a single-runner track file as a frame -> bbox map.

The tracker writes one box per frame for exactly one track id; a file with
several ids is ambiguous about which runner to mask and is rejected.
*/
export async function loadRoiTrack(path: string): Promise<TrackBoxes> {
  let text: string
  try {
    text = await readFile(path, 'utf8')
  } catch (err) {
    throw new ExtractError(`cannot read tracks file ${path}: ${(err as Error).message}`)
  }
  const boxes: TrackBoxes = new Map()
  const ids = new Set<number>()
  const lines = text.split('\n')
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!.trim()
    if (!line) continue
    const where = `${path}:${i + 1}`
    let obj: unknown
    try {
      obj = JSON.parse(line)
    } catch (err) {
      throw new ExtractError(`${where}: malformed JSON (${(err as Error).message})`)
    }
    const { frame, id, bbox } = parseRow(obj, where)
    ids.add(id)
    if (boxes.has(frame)) {
      throw new ExtractError(`${where}: duplicate box for frame ${frame}`)
    }
    boxes.set(frame, bbox)
  }
  if (boxes.size === 0) {
    throw new ExtractError(`tracks file ${path} holds no rows`)
  }
  if (ids.size > 1) {
    throw new ExtractError(
      `tracks file ${path} holds ${ids.size} track ids; expected a single runner-of-interest track`,
    )
  }
  return boxes
}
