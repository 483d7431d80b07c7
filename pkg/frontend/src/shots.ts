/**
 * Shot-boundary detection for the exporter.
 *
 * The preferred route is a neural detector supplied as a local tfjs
 * GraphModel (`tfjs-graph:<dir>`); when no model is available the error
 * says so and points at the built-in `histogram` detector, which cuts on
 * L1 jumps between per-frame color histograms (matching the consumer
 * pipeline's fallback semantics: boundaries closer than the minimum shot
 * length to the last kept boundary are suppressed, shots tile the video).
 */
import * as fs from 'fs'
import * as path from 'path'

import type { Shot } from './memfeat'
import { frameTimeMs, Y4MVideo } from './y4m'

export const DEFAULT_SBD = 'histogram'
export const DEFAULT_THRESHOLD = 0.5
export const DEFAULT_MIN_SHOT_MS = 400

export class SbdUnavailableError extends Error {}

/** Normalized 4x4x4 YUV color histogram of one frame. */
export function colorHistogram(video: Y4MVideo, frameIndex: number): Float64Array {
  const frame = video.frames[frameIndex]!
  const hist = new Float64Array(64)
  const cw = video.width / 2
  for (let sy = 0; sy < video.height; sy++) {
    const yRow = sy * video.width
    const cRow = Math.floor(sy / 2) * cw
    for (let sx = 0; sx < video.width; sx++) {
      const ci = cRow + Math.floor(sx / 2)
      const qy = frame.y[yRow + sx]! >> 6
      const qu = frame.u[ci]! >> 6
      const qv = frame.v[ci]! >> 6
      hist[(qy << 4) | (qu << 2) | qv]! += 1
    }
  }
  const n = video.width * video.height
  for (let i = 0; i < 64; i++) hist[i]! /= n
  return hist
}

function l1Distance(a: Float64Array, b: Float64Array): number {
  let sum = 0
  for (let i = 0; i < a.length; i++) sum += Math.abs(a[i]! - b[i]!)
  return sum
}

export interface DetectOptions {
  threshold?: number
  minShotMs?: number
}

export function detectShotsHistogram(
  video: Y4MVideo,
  episodeId: string,
  options: DetectOptions = {},
): Shot[] {
  const threshold = options.threshold ?? DEFAULT_THRESHOLD
  const minShotMs = options.minShotMs ?? DEFAULT_MIN_SHOT_MS
  if (!(threshold > 0 && threshold <= 2)) {
    throw new RangeError(`threshold must be in (0, 2], got ${threshold}`)
  }
  if (!(minShotMs > 0)) {
    throw new RangeError(`minShotMs must be > 0, got ${minShotMs}`)
  }
  const n = video.frames.length
  if (n === 0) return []
  const boundaries: number[] = []
  if (n >= 2) {
    let prev = colorHistogram(video, 0)
    let lastKept = 0
    for (let i = 1; i < n; i++) {
      const current = colorHistogram(video, i)
      if (l1Distance(prev, current) > threshold) {
        const t = Math.round(frameTimeMs(video, i))
        if (t - lastKept >= minShotMs) {
          boundaries.push(t)
          lastKept = t
        }
      }
      prev = current
    }
  }
  const end = Math.round(frameTimeMs(video, n))
  const edges = [0, ...boundaries, end]
  const shots: Shot[] = []
  for (let i = 0; i + 1 < edges.length; i++) {
    shots.push({ episodeId, shotIndex: i, startMs: edges[i]!, endMs: edges[i + 1]! })
  }
  return shots
}

export function detectShots(
  video: Y4MVideo,
  episodeId: string,
  sbd: string = DEFAULT_SBD,
  options: DetectOptions = {},
): Shot[] {
  if (sbd === 'histogram') {
    return detectShotsHistogram(video, episodeId, options)
  }
  if (sbd.startsWith('tfjs-graph:')) {
    const dir = sbd.slice('tfjs-graph:'.length)
    if (!fs.existsSync(path.join(dir, 'model.json'))) {
      throw new SbdUnavailableError(
        `no shot-boundary model at ${dir}; rerun with --sbd histogram to use ` +
          `the built-in fallback detector`,
      )
    }
    // Room for a real neural detector once a model ships; nothing in the
    // sandbox provides one, so reaching this line means the caller placed
    // a model we do not know how to postprocess.
    throw new SbdUnavailableError(
      `neural shot-boundary inference is not wired for ${dir}; ` +
        `use --sbd histogram`,
    )
  }
  throw new SbdUnavailableError(
    `unknown shot detector "${sbd}" (expected histogram or tfjs-graph:<dir>)`,
  )
}
