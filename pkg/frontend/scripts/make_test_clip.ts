/**
 * Generate the bundled deterministic test clip: 10 seconds of 64x48 4:2:0
 * video at 6 fps (60 frames) with one hard cut at frame 30 (t = 5000 ms).
 * Each segment has a distinct palette plus mild deterministic texture so
 * the two halves are visually different without intra-segment jumps.
 */
import { writeFileSync } from 'fs'
import * as path from 'path'

import { mulberry32 } from '../src/encoder'
import { renderY4M, Y4MFrame } from '../src/y4m'

const WIDTH = 64
const HEIGHT = 48
const FPS = 6
const FRAMES = 60
const CUT_FRAME = 30

function makeFrame(index: number, rng: () => number): Y4MFrame {
  const second = index >= CUT_FRAME
  const baseY = second ? 70 : 170
  const baseU = second ? 180 : 90
  const baseV = second ? 90 : 160
  const y = new Uint8Array(WIDTH * HEIGHT)
  for (let row = 0; row < HEIGHT; row++) {
    for (let col = 0; col < WIDTH; col++) {
      const gradient = second ? ((row + col) % 17) - 8 : ((row * 2 + col) % 13) - 6
      const noise = Math.floor(rng() * 7) - 3
      y[row * WIDTH + col] = Math.max(16, Math.min(235, baseY + gradient + noise))
    }
  }
  const u = new Uint8Array((WIDTH / 2) * (HEIGHT / 2)).fill(baseU)
  const v = new Uint8Array((WIDTH / 2) * (HEIGHT / 2)).fill(baseV)
  return { y, u, v }
}

function main() {
  const rng = mulberry32(0xc11b)
  const frames = Array.from({ length: FRAMES }, (_, i) => makeFrame(i, rng))
  const buffer = renderY4M({ width: WIDTH, height: HEIGHT, fpsNum: FPS, fpsDen: 1, frames })
  const out = path.join(__dirname, '..', '..', 'testdata', 'clip10s.y4m')
  writeFileSync(out, buffer)
  console.log(`wrote ${out}: ${FRAMES} frames @ ${FPS} fps, cut at frame ${CUT_FRAME}`)
}

main()
