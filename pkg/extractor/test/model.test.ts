import { writeFile } from 'node:fs/promises'
import { join } from 'node:path'

import { afterEach, beforeEach, describe, expect, it } from 'vitest'

import {
  DEFAULT_WEIGHTS_PATH,
  LOGITS_DIM,
  ProjectionExtractor,
  STATS_DIM,
  clipStats,
  loadWeights,
} from '../src/index.js'
import { makeFrame, makeTmpDir, movingClip, removeDir } from './helpers.js'

describe('loadWeights', () => {
  let dir: string
  beforeEach(async () => {
    dir = await makeTmpDir()
  })
  afterEach(async () => {
    await removeDir(dir)
  })

  it('loads the shipped weights', async () => {
    const weights = await loadWeights(DEFAULT_WEIGHTS_PATH)
    expect(weights.dim).toBe(LOGITS_DIM)
  })

  it('rejects a missing file', async () => {
    await expect(loadWeights(join(dir, 'absent.json'))).rejects.toThrow(/cannot read/)
  })

  it('rejects a foreign JSON file', async () => {
    const path = join(dir, 'other.json')
    await writeFile(path, JSON.stringify({ hello: 1 }))
    await expect(loadWeights(path)).rejects.toThrow(/not an extractor-weights file/)
  })

  it('rejects a bad dim', async () => {
    const path = join(dir, 'w.json')
    await writeFile(path, JSON.stringify({ format: 'extractor-weights', dim: 0, seed: 1 }))
    await expect(loadWeights(path)).rejects.toThrow(/dim/)
  })

  it('rejects a bad seed', async () => {
    const path = join(dir, 'w.json')
    await writeFile(path, JSON.stringify({ format: 'extractor-weights', dim: 400, seed: -3 }))
    await expect(loadWeights(path)).rejects.toThrow(/seed/)
  })
})

describe('clipStats', () => {
  it('has the documented width and stays finite', () => {
    const stats = clipStats(movingClip(4))
    expect(stats.length).toBe(STATS_DIM)
    expect([...stats].every(Number.isFinite)).toBe(true)
  })

  it('reports zero motion for a static clip', () => {
    const frame = makeFrame(16, 16, (x, y) => [x * 3, y * 5, 77])
    const stats = clipStats([frame, frame, frame])
    const motion = [...stats.slice(70)]
    expect(motion.every((v) => v === 0)).toBe(true)
  })

  it('reports zero motion for a single-frame clip', () => {
    const stats = clipStats(movingClip(1))
    expect([...stats.slice(70)].every((v) => v === 0)).toBe(true)
  })

  it('sees motion in a moving clip', () => {
    const stats = clipStats(movingClip(6))
    const motionMean = stats[STATS_DIM - 2]!
    expect(motionMean).toBeGreaterThan(0)
  })

  it('rejects mixed frame sizes', () => {
    const a = makeFrame(8, 8, () => [0, 0, 0])
    const b = makeFrame(9, 8, () => [0, 0, 0])
    expect(() => clipStats([a, b])).toThrow(/share dimensions/)
  })

  it('handles frames narrower than the pooling grid', () => {
    const tiny = makeFrame(3, 2, (x, y) => [x * 50, y * 90, 10])
    const stats = clipStats([tiny, tiny])
    expect([...stats].every(Number.isFinite)).toBe(true)
  })
})

describe('ProjectionExtractor', () => {
  const weights = { format: 'extractor-weights', dim: LOGITS_DIM, seed: 2177 }

  it('emits the embedding width the pipeline needs', () => {
    const logits = new ProjectionExtractor(weights).infer(movingClip(4))
    expect(logits).toBeInstanceOf(Float32Array)
    expect(logits.length).toBe(LOGITS_DIM)
  })

  it('is deterministic across instances', () => {
    const clip = movingClip(5)
    const a = new ProjectionExtractor(weights).infer(clip)
    const b = new ProjectionExtractor(weights).infer(clip)
    expect(Buffer.from(a.buffer).equals(Buffer.from(b.buffer))).toBe(true)
  })

  it('changes with the seed', () => {
    const clip = movingClip(5)
    const a = new ProjectionExtractor(weights).infer(clip)
    const b = new ProjectionExtractor({ ...weights, seed: 999 }).infer(clip)
    expect(Buffer.from(a.buffer).equals(Buffer.from(b.buffer))).toBe(false)
  })

  it('distinguishes a static clip from a moving one', () => {
    const extractor = new ProjectionExtractor(weights)
    const still = makeFrame(32, 24, (x, y) => [(x * 7) % 256, (y * 11) % 256, 90])
    const a = extractor.infer([still, still, still])
    const b = extractor.infer(movingClip(3))
    expect(Buffer.from(a.buffer).equals(Buffer.from(b.buffer))).toBe(false)
  })
})
