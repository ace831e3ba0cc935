#!/usr/bin/env node
/** Command line: embed one clip and append the line to an embeddings file. */

import { parseArgs } from 'node:util'

import { extract } from './extract.js'
import { ExtractError, isContextMode, type ExtractionJob } from './types.js'

const USAGE = `usage: clip-extractor --clip <file> --runner <id> --rp <n> --out <embeddings.jsonl>
                      [--mode raw|bb|vibe] [--tracks <tracks.jsonl>] [--weights <file>]

Embeds one clip (a file of concatenated binary PPM frames) and appends the
resulting line to the output file.  bb and vibe modes need the runner-of-
interest track file; bb masks every frame to its track box before inference.`

export async function main(argv: string[]): Promise<number> {
  let parsed
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        clip: { type: 'string' },
        runner: { type: 'string' },
        rp: { type: 'string' },
        mode: { type: 'string', default: 'raw' },
        tracks: { type: 'string' },
        out: { type: 'string' },
        weights: { type: 'string' },
        help: { type: 'boolean', short: 'h' },
      },
    })
  } catch (err) {
    console.error(`error: ${(err as Error).message}`)
    return 1
  }
  const args = parsed.values
  if (args.help) {
    console.log(USAGE)
    return 0
  }

  try {
    for (const required of ['clip', 'runner', 'rp', 'out'] as const) {
      if (!args[required]) {
        throw new ExtractError(`--${required} is required`)
      }
    }
    const rp = Number(args.rp)
    if (!Number.isInteger(rp)) {
      throw new ExtractError(`--rp must be an integer, got '${args.rp}'`)
    }
    if (!isContextMode(args.mode)) {
      throw new ExtractError(`--mode must be raw, bb, or vibe, got '${args.mode}'`)
    }
    const job: ExtractionJob = {
      clipPath: args.clip!,
      runnerId: args.runner!,
      rpId: rp,
      contextMode: args.mode,
      ...(args.tracks !== undefined ? { tracksPath: args.tracks } : {}),
    }
    const record = await extract(job, {
      outPath: args.out!,
      ...(args.weights !== undefined ? { weightsPath: args.weights } : {}),
    })
    console.log(`appended ${record.runner} rp${record.rp} ${record.mode} -> ${args.out}`)
    return 0
  } catch (err) {
    if (err instanceof ExtractError) {
      console.error(`error: ${err.message}`)
      return 1
    }
    throw err
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href
if (invokedDirectly) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(err)
      process.exit(1)
    },
  )
}
