import { execFileSync } from 'child_process'
import { mkdtempSync, readFileSync, writeFileSync } from 'fs'
import { tmpdir } from 'os'
import * as path from 'path'

import { beforeAll, describe, expect, it } from 'vitest'

import { extractFeatures } from '../src/extract'
import { detectShots } from '../src/shots'
import { loadVideo } from '../src/extract'
import { main } from '../src/cli'

const CLIP = path.join(__dirname, '..', 'testdata', 'clip10s.y4m')

let workDir: string

beforeAll(() => {
  workDir = mkdtempSync(path.join(tmpdir(), 'shotmem-frontend-'))
})

/** Run the consumer pipeline's validator; returns its stderr. */
function validateWithPrimary(kind: 'features' | 'shots', file: string): string {
  const result = execFileSync('shotmem', ['validate', kind, file], {
    encoding: 'utf-8',
    stdio: ['ignore', 'pipe', 'pipe'],
  })
  expect(result).toContain('ok:')
  return result
}

describe('extractFeatures contract', () => {
  it('emits exactly ceil(duration * fps) rows for the 10 s clip', async () => {
    const out = path.join(workDir, 'clip.memfeat')
    const result = await extractFeatures({ video: CLIP, outFeatures: out, fps: 3 })
    expect(result.durationMs).toBe(10000)
    expect(result.rows).toBe(30) // ceil(10 * 3)
    const lines = readFileSync(out, 'utf-8').trimEnd().split('\n')
    expect(lines.length).toBe(31) // header + 30 rows
    expect(lines[0]).toMatch(/^MEMFEAT\tv1\tdim=64\tencoder=seeded-cnn-v1\/64/)
  })

  it('is byte-stable across two runs', async () => {
    const a = path.join(workDir, 'run_a.memfeat')
    const b = path.join(workDir, 'run_b.memfeat')
    await extractFeatures({ video: CLIP, outFeatures: a, fps: 3 })
    await extractFeatures({ video: CLIP, outFeatures: b, fps: 3 })
    expect(Buffer.compare(readFileSync(a), readFileSync(b))).toBe(0)
  })

  it('validates against the consumer pipeline reader with no warnings', async () => {
    const out = path.join(workDir, 'validate_me.memfeat')
    await extractFeatures({ video: CLIP, outFeatures: out, fps: 3 })
    const stdout = validateWithPrimary('features', out)
    expect(stdout).toContain('dim=64')
    expect(stdout).toContain('30 frames')
  })

  it('writes a header-only file for a zero-length video', async () => {
    const empty = path.join(workDir, 'empty.y4m')
    writeFileSync(empty, 'YUV4MPEG2 W64 H48 F6:1 Ip A1:1 C420jpeg\n')
    const out = path.join(workDir, 'empty.memfeat')
    const result = await extractFeatures({ video: empty, outFeatures: out, fps: 3 })
    expect(result.rows).toBe(0)
    expect(readFileSync(out, 'utf-8')).toMatch(/^MEMFEAT\tv1\tdim=64/)
    validateWithPrimary('features', out)
  })

  it('matches the sample grid exactly', async () => {
    const out = path.join(workDir, 'grid.memfeat')
    await extractFeatures({ video: CLIP, outFeatures: out, fps: 3 })
    const lines = readFileSync(out, 'utf-8').trimEnd().split('\n').slice(1)
    const times = lines.map(line => Number(line.split('\t')[0]))
    const expected = Array.from({ length: 30 }, (_, k) => Math.floor((k * 1000) / 3))
    expect(times).toEqual(expected)
  })
})

describe('export shots contract', () => {
  it('locates the planted cut within two frames and round-trips', async () => {
    const outFeatures = path.join(workDir, 'with_shots.memfeat')
    const outShots = path.join(workDir, 'shots.tsv')
    const result = await extractFeatures({
      video: CLIP,
      outFeatures,
      outShots,
      fps: 3,
      episodeId: 's01e01',
      sbd: 'histogram',
    })
    expect(result.shots).toBe(2)
    const lines = readFileSync(outShots, 'utf-8').trimEnd().split('\n')
    expect(lines[0]).toBe('episode_id\tshot_index\tstart_ms\tend_ms')
    const boundary = Number(lines[2]!.split('\t')[2])
    const frameMs = 1000 / 6
    expect(Math.abs(boundary - 5000)).toBeLessThanOrEqual(2 * frameMs)
    validateWithPrimary('shots', outShots)
  })

  it('single static clip yields one shot', () => {
    const video = loadVideo(CLIP)
    const secondHalf = { ...video, frames: video.frames.slice(30) }
    const shots = detectShots(secondHalf, 'static', 'histogram')
    expect(shots.length).toBe(1)
    expect(shots[0]!.startMs).toBe(0)
    expect(shots[0]!.endMs).toBe(5000)
  })

  it('neural route without a model instructs fallback use', () => {
    const video = loadVideo(CLIP)
    expect(() => detectShots(video, 'e1', 'tfjs-graph:/nonexistent/model')).toThrow(
      /--sbd histogram/,
    )
  })
})

describe('cli', () => {
  it('extracts through the command line', async () => {
    const out = path.join(workDir, 'cli.memfeat')
    const outShots = path.join(workDir, 'cli_shots.tsv')
    const code = await main([
      'extract',
      '--video', CLIP,
      '--out-features', out,
      '--out-shots', outShots,
      '--fps', '3',
      '--episode-id', 's01e01',
    ])
    expect(code).toBe(0)
    validateWithPrimary('features', out)
    validateWithPrimary('shots', outShots)
  })

  it('missing video is an input error (exit 2)', async () => {
    const code = await main([
      'extract', '--video', '/nope.y4m', '--out-features', path.join(workDir, 'x'),
    ])
    expect(code).toBe(2)
  })

  it('undecodable video is a validation error (exit 3)', async () => {
    const bad = path.join(workDir, 'bad.y4m')
    writeFileSync(bad, 'not a video at all\n')
    const code = await main([
      'extract', '--video', bad, '--out-features', path.join(workDir, 'y'),
    ])
    expect(code).toBe(3)
  })

  it('bad flags are input errors', async () => {
    expect(await main(['extract', '--video', CLIP])).toBe(2)
    expect(await main(['bogus'])).toBe(2)
    expect(await main(['extract', '--frobnicate', '1'])).toBe(2)
    expect(
      await main([
        'extract', '--video', CLIP,
        '--out-features', path.join(workDir, 'z'), '--fps', 'abc',
      ]),
    ).toBe(2)
  })
})
