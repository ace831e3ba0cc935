import { describe, expect, it } from 'vitest'

import { bboxToPixelRect, maskContext, roundHalfEven } from '../src/index.js'
import { execFileAsync, makeFrame } from './helpers.js'

describe('roundHalfEven', () => {
  it('matches round-half-to-even on exact halves', () => {
    expect(roundHalfEven(2.5)).toBe(2)
    expect(roundHalfEven(3.5)).toBe(4)
    expect(roundHalfEven(-2.5)).toBe(-2)
    expect(roundHalfEven(-3.5)).toBe(-4)
    expect(roundHalfEven(0.5)).toBe(0)
  })

  it('rounds non-halves to the nearest integer', () => {
    expect(roundHalfEven(2.49)).toBe(2)
    expect(roundHalfEven(2.51)).toBe(3)
    expect(roundHalfEven(-1.2)).toBe(-1)
    expect(roundHalfEven(7)).toBe(7)
  })
})

describe('bboxToPixelRect', () => {
  it('maps a centered box to the expected rect', () => {
    expect(bboxToPixelRect([960, 540, 40, 90], 1920, 1080)).toEqual([940, 980, 495, 585])
  })

  it('clips to the frame bounds', () => {
    expect(bboxToPixelRect([0, 0, 10, 10], 100, 80)).toEqual([0, 5, 0, 5])
    expect(bboxToPixelRect([99, 79, 10, 10], 100, 80)).toEqual([94, 100, 74, 80])
  })

  it('collapses degenerate and out-of-frame boxes', () => {
    expect(bboxToPixelRect([-50, 40, 10, 10], 100, 80)).toEqual([0, 0, 0, 0])
    expect(bboxToPixelRect([50, 40, 0.2, 10], 100, 80)).toEqual([0, 0, 0, 0])
  })

  it('agrees with the downstream toolkit on half-pixel edges', async () => {
    const boxes: [number, number, number, number][] = [
      [5.0, 5.0, 5, 5],
      [5.5, 5.5, 5, 5],
      [6.0, 6.0, 5, 5],
      [2.75, 3.25, 3.5, 4.5],
      [10.5, 10.5, 7, 7],
      [960, 540, 40, 90],
      [0.5, 0.5, 1, 1],
      [19.5, 15.5, 39, 31],
    ]
    const script = [
      'import json',
      'from runperf.dataio.masking import bbox_to_pixel_rect',
      `boxes = ${JSON.stringify(boxes)}`,
      'print(json.dumps([list(bbox_to_pixel_rect(b, 1920, 1080)) for b in boxes]))',
    ].join('\n')
    const { stdout } = await execFileAsync('python3', ['-c', script])
    const reference: number[][] = JSON.parse(stdout)
    const ours = boxes.map((b) => [...bboxToPixelRect(b, 1920, 1080)])
    expect(ours).toEqual(reference)
  })
})

describe('maskContext', () => {
  const frame = makeFrame(8, 6, (x, y) => [10 + x, 20 + y, 30])

  it('keeps pixels inside the box and zeroes the rest', () => {
    const masked = maskContext(frame, [4, 3, 4, 2])
    // rect is x in [2, 6), y in [2, 4)
    for (let y = 0; y < 6; y++) {
      for (let x = 0; x < 8; x++) {
        const at = (y * 8 + x) * 3
        const inside = x >= 2 && x < 6 && y >= 2 && y < 4
        if (inside) {
          expect(masked.pixels[at]).toBe(10 + x)
          expect(masked.pixels[at + 1]).toBe(20 + y)
        } else {
          expect(masked.pixels[at]).toBe(0)
          expect(masked.pixels[at + 1]).toBe(0)
        }
      }
    }
  })

  it('supports a custom fill value', () => {
    const masked = maskContext(frame, [4, 3, 2, 2], 7)
    expect(masked.pixels[0]).toBe(7)
  })

  it('blanks the whole frame for a degenerate box', () => {
    const masked = maskContext(frame, [-100, -100, 4, 4])
    expect(masked.pixels.every((v) => v === 0)).toBe(true)
  })

  it('is idempotent', () => {
    const once = maskContext(frame, [4, 3, 4, 2])
    const twice = maskContext(once, [4, 3, 4, 2])
    expect(twice.pixels).toEqual(once.pixels)
  })

  it('preserves dimensions', () => {
    const masked = maskContext(frame, [4, 3, 4, 2])
    expect(masked.width).toBe(frame.width)
    expect(masked.height).toBe(frame.height)
  })

  it('rejects a fill outside the 8-bit range', () => {
    expect(() => maskContext(frame, [4, 3, 4, 2], 300)).toThrow(/8-bit/)
    expect(() => maskContext(frame, [4, 3, 4, 2], -1)).toThrow(/8-bit/)
  })
})
