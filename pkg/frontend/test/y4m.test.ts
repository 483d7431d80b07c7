import { readFileSync } from 'fs'
import * as path from 'path'

import { describe, expect, it } from 'vitest'

import { durationMs, frameTimeMs, nearestFrameIndex, parseY4M, renderY4M, Y4MError } from '../src/y4m'

const CLIP = path.join(__dirname, '..', 'testdata', 'clip10s.y4m')

describe('parseY4M', () => {
  it('decodes the bundled clip', () => {
    const video = parseY4M(readFileSync(CLIP))
    expect(video.width).toBe(64)
    expect(video.height).toBe(48)
    expect(video.fpsNum).toBe(6)
    expect(video.fpsDen).toBe(1)
    expect(video.frames.length).toBe(60)
    expect(durationMs(video)).toBe(10000)
    expect(video.frames[0]!.y.length).toBe(64 * 48)
    expect(video.frames[0]!.u.length).toBe(32 * 24)
  })

  it('round-trips through renderY4M', () => {
    const bytes = readFileSync(CLIP)
    const video = parseY4M(bytes)
    expect(Buffer.compare(renderY4M(video), bytes)).toBe(0)
  })

  it('rejects non-y4m data', () => {
    expect(() => parseY4M(Buffer.from('RIFFxxxx\n'))).toThrow(Y4MError)
  })

  it('rejects truncated frames', () => {
    const bytes = readFileSync(CLIP)
    expect(() => parseY4M(bytes.subarray(0, bytes.length - 100))).toThrow(/truncated/)
  })

  it('rejects unsupported colorspaces', () => {
    expect(() => parseY4M(Buffer.from('YUV4MPEG2 W4 H4 F1:1 C444\n'))).toThrow(/colorspace/)
  })

  it('maps timestamps to nearest frames', () => {
    const video = parseY4M(readFileSync(CLIP))
    expect(frameTimeMs(video, 6)).toBe(1000)
    expect(nearestFrameIndex(video, 0)).toBe(0)
    expect(nearestFrameIndex(video, 1000)).toBe(6)
    expect(nearestFrameIndex(video, 99999)).toBe(59)
  })
})
