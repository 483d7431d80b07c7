/**
 * Minimal YUV4MPEG2 (.y4m) decoder: uncompressed planar 4:2:0 video with a
 * plain-text signature, which makes it decodable without native codecs.
 */

export interface Y4MFrame {
  y: Uint8Array
  u: Uint8Array
  v: Uint8Array
}

export interface Y4MVideo {
  width: number
  height: number
  fpsNum: number
  fpsDen: number
  frames: Y4MFrame[]
}

export class Y4MError extends Error {}

const SIGNATURE = 'YUV4MPEG2'

export function parseY4M(data: Buffer): Y4MVideo {
  const headerEnd = data.indexOf(0x0a)
  if (headerEnd < 0) {
    throw new Y4MError('missing stream header line')
  }
  const header = data.subarray(0, headerEnd).toString('ascii')
  const fields = header.split(' ')
  if (fields[0] !== SIGNATURE) {
    throw new Y4MError(`not a YUV4MPEG2 stream (signature ${fields[0]!})`)
  }
  let width = 0
  let height = 0
  let fpsNum = 0
  let fpsDen = 0
  let colorspace = '420jpeg'
  for (const field of fields.slice(1)) {
    const tag = field[0]
    const rest = field.slice(1)
    if (tag === 'W') width = Number(rest)
    else if (tag === 'H') height = Number(rest)
    else if (tag === 'F') {
      const [num, den] = rest.split(':')
      fpsNum = Number(num)
      fpsDen = Number(den)
    } else if (tag === 'C') colorspace = rest
    // interlacing (I), aspect (A) and X comments do not affect decoding here
  }
  if (!Number.isInteger(width) || width <= 0 || !Number.isInteger(height) || height <= 0) {
    throw new Y4MError(`bad frame size ${width}x${height}`)
  }
  if (!Number.isInteger(fpsNum) || fpsNum <= 0 || !Number.isInteger(fpsDen) || fpsDen <= 0) {
    throw new Y4MError(`bad frame rate ${fpsNum}:${fpsDen}`)
  }
  if (!colorspace.startsWith('420')) {
    throw new Y4MError(`unsupported colorspace C${colorspace} (only 4:2:0 is handled)`)
  }
  if (width % 2 !== 0 || height % 2 !== 0) {
    throw new Y4MError(`4:2:0 needs even dimensions, got ${width}x${height}`)
  }

  const ySize = width * height
  const cSize = (width / 2) * (height / 2)
  const frames: Y4MFrame[] = []
  let offset = headerEnd + 1
  while (offset < data.length) {
    const markerEnd = data.indexOf(0x0a, offset)
    if (markerEnd < 0) {
      throw new Y4MError(`truncated FRAME marker at byte ${offset}`)
    }
    const marker = data.subarray(offset, markerEnd).toString('ascii')
    if (!marker.startsWith('FRAME')) {
      throw new Y4MError(`expected FRAME marker at byte ${offset}, got "${marker.slice(0, 16)}"`)
    }
    offset = markerEnd + 1
    if (offset + ySize + 2 * cSize > data.length) {
      throw new Y4MError(`truncated frame ${frames.length} at byte ${offset}`)
    }
    frames.push({
      y: Uint8Array.prototype.slice.call(data, offset, offset + ySize),
      u: Uint8Array.prototype.slice.call(data, offset + ySize, offset + ySize + cSize),
      v: Uint8Array.prototype.slice.call(data, offset + ySize + cSize, offset + ySize + 2 * cSize),
    })
    offset += ySize + 2 * cSize
  }
  return { width, height, fpsNum, fpsDen, frames }
}

/** Exact duration in (possibly fractional) milliseconds. */
export function durationMs(video: Y4MVideo): number {
  return (video.frames.length * 1000 * video.fpsDen) / video.fpsNum
}

/** Timestamp of frame i in fractional milliseconds. */
export function frameTimeMs(video: Y4MVideo, index: number): number {
  return (index * 1000 * video.fpsDen) / video.fpsNum
}

/** Index of the decoded frame nearest to a timestamp. */
export function nearestFrameIndex(video: Y4MVideo, tMs: number): number {
  const raw = Math.round((tMs * video.fpsNum) / (1000 * video.fpsDen))
  return Math.max(0, Math.min(video.frames.length - 1, raw))
}

export function renderY4M(video: Y4MVideo): Buffer {
  const header = `${SIGNATURE} W${video.width} H${video.height} F${video.fpsNum}:${video.fpsDen} Ip A1:1 C420jpeg\n`
  const parts: Buffer[] = [Buffer.from(header, 'ascii')]
  for (const frame of video.frames) {
    parts.push(Buffer.from('FRAME\n', 'ascii'))
    parts.push(Buffer.from(frame.y), Buffer.from(frame.u), Buffer.from(frame.v))
  }
  return Buffer.concat(parts)
}
