/** Writing embeddings.jsonl lines the downstream loader accepts.

Lines are appended under an exclusive file lock so concurrent workers
(one clip per worker) never interleave writes, and a (runner, rp, mode)
key is refused if the file already holds it — the loader treats duplicate
keys as corruption, and an append must never break the file's validity.
*/

import { appendFile, readFile } from 'node:fs/promises'
import { existsSync } from 'node:fs'

import lockfile from 'proper-lockfile'

import { ExtractError, type ClipRecord } from './types.js'

/** Narrow a float to 9 significant decimal digits (float32-lossless). */
export function sig9(value: number): number {
  return Number(value.toPrecision(9))
}

/** Render one embeddings.jsonl line, floats at 9 significant digits. */
export function renderLine(rec: ClipRecord): string {
  const logits = Array.from(rec.logits, (v) => JSON.stringify(sig9(v))).join(',')
  return (
    `{"runner":${JSON.stringify(rec.runner)},` +
    `"rp":${rec.rp},` +
    `"mode":"${rec.mode}",` +
    `"logits":[${logits}]}`
  )
}

function keyOf(runner: string, rp: number, mode: string): string {
  return JSON.stringify([runner, rp, mode])
}

async function existingKeys(path: string): Promise<Set<string>> {
  const keys = new Set<string>()
  if (!existsSync(path)) {
    return keys
  }
  const text = await readFile(path, 'utf8')
  for (const raw of text.split('\n')) {
    const line = raw.trim()
    if (!line) continue
    let obj: Record<string, unknown>
    try {
      obj = JSON.parse(line) as Record<string, unknown>
    } catch {
      throw new ExtractError(`${path} holds a malformed line; refusing to append`)
    }
    keys.add(keyOf(String(obj['runner']), Number(obj['rp']), String(obj['mode'])))
  }
  return keys
}

/** Append one record to `path` under an exclusive lock. */
export async function appendRecord(path: string, rec: ClipRecord): Promise<void> {
  const release = await lockfile.lock(path, {
    realpath: false,
    retries: { retries: 30, factor: 1.3, minTimeout: 10, maxTimeout: 200, randomize: true },
  })
  try {
    const keys = await existingKeys(path)
    if (keys.has(keyOf(rec.runner, rec.rp, rec.mode))) {
      throw new ExtractError(
        `${path} already holds (runner=${rec.runner}, rp=${rec.rp}, mode=${rec.mode})`,
      )
    }
    await appendFile(path, renderLine(rec) + '\n', 'utf8')
  } finally {
    await release()
  }
}
