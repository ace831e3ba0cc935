import { execFile } from 'node:child_process'
import { mkdtemp, rm, writeFile } from 'node:fs/promises'
import { tmpdir } from 'node:os'
import { join } from 'node:path'
import { promisify } from 'node:util'

import { encodeClip, type Bbox, type Frame } from '../src/index.js'

export const execFileAsync = promisify(execFile)

/** Build a frame from a per-pixel RGB function. */
export function makeFrame(
  width: number,
  height: number,
  rgb: (x: number, y: number) => [number, number, number],
): Frame {
  const pixels = new Uint8Array(width * height * 3)
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const [r, g, b] = rgb(x, y)
      const at = (y * width + x) * 3
      pixels[at] = r
      pixels[at + 1] = g
      pixels[at + 2] = b
    }
  }
  return { width, height, pixels }
}

/** A deterministic moving-blob clip: a bright square drifting right. */
export function movingClip(frames: number, width = 32, height = 24): Frame[] {
  const out: Frame[] = []
  for (let t = 0; t < frames; t++) {
    const left = 2 + t
    out.push(
      makeFrame(width, height, (x, y) => {
        const inside = x >= left && x < left + 6 && y >= 8 && y < 16
        return inside ? [230, 40, 40] : [(x * 7) % 256, (y * 11) % 256, 90]
      }),
    )
  }
  return out
}

export async function writeClip(path: string, frames: Frame[]): Promise<void> {
  await writeFile(path, encodeClip(frames))
}

/** Write a single-track tracks.jsonl covering frames [0, n). */
export async function writeTrack(
  path: string,
  n: number,
  bboxOf: (frame: number) => Bbox,
): Promise<void> {
  const lines: string[] = []
  for (let frame = 0; frame < n; frame++) {
    const [cx, cy, w, h] = bboxOf(frame)
    lines.push(
      JSON.stringify({ frame, id: 1, bbox: [cx, cy, w, h], source: frame % 5 === 4 ? 'backup' : 'match' }),
    )
  }
  await writeFile(path, lines.join('\n') + '\n')
}

export async function makeTmpDir(): Promise<string> {
  return mkdtemp(join(tmpdir(), 'extractor-test-'))
}

export async function removeDir(dir: string): Promise<void> {
  await rm(dir, { recursive: true, force: true })
}
