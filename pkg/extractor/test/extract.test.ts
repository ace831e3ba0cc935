import { readFile, writeFile } from 'node:fs/promises'
import { join } from 'node:path'

import { afterEach, beforeEach, describe, expect, it } from 'vitest'

import { LOGITS_DIM, extract, renderLine, sig9, type ExtractionJob } from '../src/index.js'
import { makeTmpDir, movingClip, removeDir, writeClip, writeTrack } from './helpers.js'

const N_FRAMES = 6

describe('extract', () => {
  let dir: string
  let clipPath: string
  let tracksPath: string
  let outPath: string

  beforeEach(async () => {
    dir = await makeTmpDir()
    clipPath = join(dir, 'clip.ppm')
    tracksPath = join(dir, 'tracks.jsonl')
    outPath = join(dir, 'embeddings.jsonl')
    await writeClip(clipPath, movingClip(N_FRAMES))
    await writeTrack(tracksPath, N_FRAMES, (frame) => [5 + frame, 12, 6, 8])
  })
  afterEach(async () => {
    await removeDir(dir)
  })

  function job(overrides: Partial<ExtractionJob> = {}): ExtractionJob {
    return {
      clipPath,
      runnerId: 'r001',
      rpId: 3,
      contextMode: 'raw',
      ...overrides,
    }
  }

  it('appends one parseable line per job', async () => {
    const record = await extract(job(), { outPath })
    expect(record.logits.length).toBe(LOGITS_DIM)
    const lines = (await readFile(outPath, 'utf8')).trim().split('\n')
    expect(lines).toHaveLength(1)
    const obj = JSON.parse(lines[0]!)
    expect(obj.runner).toBe('r001')
    expect(obj.rp).toBe(3)
    expect(obj.mode).toBe('raw')
    expect(obj.logits).toHaveLength(LOGITS_DIM)
  })

  it('keeps earlier lines intact when appending', async () => {
    await extract(job(), { outPath })
    const before = await readFile(outPath, 'utf8')
    await extract(job({ runnerId: 'r002' }), { outPath })
    const after = await readFile(outPath, 'utf8')
    expect(after.startsWith(before)).toBe(true)
    expect(after.trim().split('\n')).toHaveLength(2)
  })

  it('rejects a duplicate (runner, rp, mode) key', async () => {
    await extract(job(), { outPath })
    await expect(extract(job(), { outPath })).rejects.toThrow(/already holds/)
    // same runner at a different rp is fine
    await extract(job({ rpId: 4 }), { outPath })
  })

  it('requires a tracks file for bb mode', async () => {
    await expect(extract(job({ contextMode: 'bb' }), { outPath })).rejects.toThrow(
      /requires a tracks file/,
    )
  })

  it('requires a tracks file for vibe mode', async () => {
    await expect(extract(job({ contextMode: 'vibe' }), { outPath })).rejects.toThrow(
      /requires a tracks file/,
    )
  })

  it('fails cleanly when the tracks file is missing on disk', async () => {
    const missing = join(dir, 'absent.jsonl')
    await expect(
      extract(job({ contextMode: 'bb', tracksPath: missing }), { outPath }),
    ).rejects.toThrow(/tracks file not found/)
  })

  it('floods frames before the track confirms and after it ends', async () => {
    // boxes only for the middle frames, the way a tracker that needs a few
    // hits to confirm would emit them
    const partial = join(dir, 'partial.jsonl')
    const rows = [2, 3, 4].map((frame) =>
      JSON.stringify({ frame, id: 1, bbox: [5 + frame, 12, 6, 8], source: 'match' }),
    )
    await writeFile(partial, rows.join('\n') + '\n')
    const full = await extract(job({ contextMode: 'bb', tracksPath }), { outPath })
    const trimmed = await extract(
      job({ runnerId: 'r055', contextMode: 'bb', tracksPath: partial }),
      { outPath },
    )
    // the flooded lead-in/lead-out frames must actually change the embedding
    expect(Buffer.from(full.logits.buffer).equals(Buffer.from(trimmed.logits.buffer))).toBe(false)
  })

  it('rejects a gap inside the covered span', async () => {
    const gappy = join(dir, 'gappy.jsonl')
    const rows = [0, 1, 3, 4, 5].map((frame) =>
      JSON.stringify({ frame, id: 1, bbox: [5 + frame, 12, 6, 8], source: 'match' }),
    )
    await writeFile(gappy, rows.join('\n') + '\n')
    await expect(
      extract(job({ contextMode: 'bb', tracksPath: gappy }), { outPath }),
    ).rejects.toThrow(/gap at frame 2/)
  })

  it('masking changes the embedding', async () => {
    const raw = await extract(job(), { outPath })
    const bb = await extract(job({ contextMode: 'bb', tracksPath }), { outPath })
    expect(Buffer.from(raw.logits.buffer).equals(Buffer.from(bb.logits.buffer))).toBe(false)
  })

  it('vibe mode embeds the frames as they come', async () => {
    const raw = await extract(job(), { outPath })
    const vibe = await extract(job({ contextMode: 'vibe', tracksPath }), { outPath })
    // same pixels in, same logits out: vibe clips are pre-masked externally
    expect(Buffer.from(raw.logits.buffer).equals(Buffer.from(vibe.logits.buffer))).toBe(true)
  })

  it('fails cleanly on a missing clip', async () => {
    await expect(extract(job({ clipPath: join(dir, 'absent.ppm') }), { outPath })).rejects.toThrow(
      /cannot read clip/,
    )
  })

  it('fails cleanly on an undecodable clip', async () => {
    const bad = join(dir, 'bad.ppm')
    await writeFile(bad, 'this is not a clip')
    await expect(extract(job({ clipPath: bad }), { outPath })).rejects.toThrow(/expected 'P6'/)
  })

  it('rejects an invalid job before touching any file', async () => {
    await expect(extract(job({ runnerId: '' }), { outPath })).rejects.toThrow(/runner id/)
    await expect(extract(job({ rpId: 2.5 }), { outPath })).rejects.toThrow(/integer/)
  })

  it('serializes concurrent appends without corrupting the file', async () => {
    const jobs = Array.from({ length: 8 }, (_, i) => job({ runnerId: `r${100 + i}` }))
    await Promise.all(jobs.map((j) => extract(j, { outPath })))
    const lines = (await readFile(outPath, 'utf8')).trim().split('\n')
    expect(lines).toHaveLength(8)
    const runners = new Set(lines.map((l) => JSON.parse(l).runner))
    expect(runners.size).toBe(8)
  })
})

describe('renderLine', () => {
  it('writes compact JSON with 9-significant-digit floats', () => {
    const logits = new Float32Array(LOGITS_DIM)
    logits[0] = Math.fround(1 / 3)
    logits[1] = -2.5
    const line = renderLine({ runner: 'r001', rp: 3, mode: 'raw', logits })
    expect(line.startsWith('{"runner":"r001","rp":3,"mode":"raw","logits":[0.333333343,-2.5,0,')).toBe(
      true,
    )
    expect(line.includes(' ')).toBe(false)
  })

  it('sig9 round-trips float32 values exactly', () => {
    for (const v of [1 / 3, Math.PI, 1e-7, 123456.789, -0.001953125]) {
      const f32 = Math.fround(v)
      expect(Math.fround(sig9(f32))).toBe(f32)
    }
  })
})
