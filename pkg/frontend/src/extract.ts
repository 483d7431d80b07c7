/**
 * Orchestration: decode a clip, sample the frame grid, embed each sampled
 * frame and write the MEMFEAT table (plus, optionally, a shot list).
 */
import * as fs from 'fs'
import * as path from 'path'

import { getEncoder, DEFAULT_ENCODER_ID, FrameImage } from './encoder'
import { FeatureRow, writeMemfeat, writeShotList } from './memfeat'
import { sampleTimes } from './sampling'
import { detectShots, DetectOptions, DEFAULT_SBD } from './shots'
import { durationMs, nearestFrameIndex, parseY4M, Y4MVideo } from './y4m'

export interface ExtractConfig {
  video: string
  outFeatures: string
  outShots?: string
  fps?: number
  encoder?: string
  sbd?: string
  episodeId?: string
  detect?: DetectOptions
}

export interface ExtractResult {
  rows: number
  dim: number
  shots: number
  durationMs: number
}

export function loadVideo(videoPath: string): Y4MVideo {
  let data: Buffer
  try {
    data = fs.readFileSync(videoPath)
  } catch {
    throw new Error(`cannot read video file ${videoPath}`)
  }
  return parseY4M(data)
}

export async function extractFeatures(config: ExtractConfig): Promise<ExtractResult> {
  const video = loadVideo(config.video)
  const fps = config.fps ?? 3
  const episodeId = config.episodeId ?? path.basename(config.video).replace(/\.y4m$/i, '')
  const encoder = getEncoder(config.encoder ?? DEFAULT_ENCODER_ID)

  const totalMs = durationMs(video)
  const rows: FeatureRow[] = []
  let dim = 0
  for (const t of sampleTimes(totalMs, fps)) {
    const frame = video.frames[nearestFrameIndex(video, t)]!
    const image: FrameImage = { ...frame, width: video.width, height: video.height }
    const vector = await encoder.embed(image)
    dim = vector.length
    rows.push({ timestampMs: t, vector })
  }
  if (rows.length === 0) {
    dim = encoder.dim
  }
  writeMemfeat(config.outFeatures, dim, rows, {
    encoder: encoder.id,
    fps: String(fps),
    source: path.basename(config.video),
  })

  let shotCount = 0
  if (config.outShots) {
    const shots = detectShots(video, episodeId, config.sbd ?? DEFAULT_SBD, config.detect)
    writeShotList(config.outShots, shots)
    shotCount = shots.length
  }
  return { rows: rows.length, dim, shots: shotCount, durationMs: totalMs }
}
