/**
 * Writers for the text interchange formats the consumer pipeline reads:
 * MEMFEAT v1 feature tables and tab-separated shot lists. Both are UTF-8
 * with LF line endings; feature floats are written in the shortest
 * decimal form that round-trips at 32-bit precision.
 */
import { writeFileSync } from 'fs'

export interface FeatureRow {
  timestampMs: number
  vector: Float32Array
}

export interface Shot {
  episodeId: string
  shotIndex: number
  startMs: number
  endMs: number
}

/** Shortest decimal string s with fround(Number(s)) === fround(value). */
export function formatFloat32(value: number): string {
  const v = Math.fround(value)
  if (!Number.isFinite(v)) {
    throw new RangeError(`feature values must be finite, got ${value}`)
  }
  if (v === 0) return Object.is(v, -0) ? '-0' : '0'
  for (let precision = 1; precision <= 9; precision++) {
    const s = v.toPrecision(precision)
    if (Math.fround(Number(s)) === v) {
      // Re-stringify to drop padding zeros ("0.500" -> "0.5", "1.0e+30" -> "1e+30").
      return String(Number(s))
    }
  }
  return String(v)
}

export function renderMemfeat(
  dim: number,
  rows: Iterable<FeatureRow>,
  meta: Record<string, string> = {},
): string {
  const header = ['MEMFEAT', 'v1', `dim=${dim}`]
  for (const key of Object.keys(meta).sort()) {
    const value = meta[key]
    if (/[\t\n=]/.test(key) || /[\t\n]/.test(value)) {
      throw new Error(`bad meta field ${key}=${value}`)
    }
    header.push(`${key}=${value}`)
  }
  const lines = [header.join('\t')]
  let prev = -Infinity
  for (const row of rows) {
    if (!Number.isInteger(row.timestampMs)) {
      throw new Error(`timestamp must be integer ms, got ${row.timestampMs}`)
    }
    if (row.timestampMs <= prev) {
      throw new Error(`timestamps must increase: ${row.timestampMs} after ${prev}`)
    }
    prev = row.timestampMs
    if (row.vector.length !== dim) {
      throw new Error(`row at ${row.timestampMs} has dim ${row.vector.length}, expected ${dim}`)
    }
    const values = Array.from(row.vector, formatFloat32).join(',')
    lines.push(`${row.timestampMs}\t${values}`)
  }
  return lines.join('\n') + '\n'
}

export function writeMemfeat(
  path: string,
  dim: number,
  rows: Iterable<FeatureRow>,
  meta: Record<string, string> = {},
): void {
  writeFileSync(path, renderMemfeat(dim, rows, meta), 'utf-8')
}

export function renderShotList(shots: Iterable<Shot>): string {
  const lines = ['episode_id\tshot_index\tstart_ms\tend_ms']
  for (const s of shots) {
    if (s.startMs >= s.endMs) {
      throw new Error(`shot ${s.shotIndex}: start ${s.startMs} >= end ${s.endMs}`)
    }
    lines.push(`${s.episodeId}\t${s.shotIndex}\t${s.startMs}\t${s.endMs}`)
  }
  return lines.join('\n') + '\n'
}

export function writeShotList(path: string, shots: Iterable<Shot>): void {
  writeFileSync(path, renderShotList(shots), 'utf-8')
}
