/**
 * Image encoders producing per-frame embedding vectors.
 *
 * Three encoder families are registered, selected by id string:
 *
 *  - `seeded-cnn-v1/<dim>` (default `seeded-cnn-v1/64`): a small
 *    convolutional network run through tfjs whose weights come from a
 *    fixed-seed PRNG. No checkpoint download is needed and inference is
 *    fully deterministic, which keeps extraction byte-stable.
 *  - `luma-hist-v1/<bins>`: a plain luma histogram; no tfjs involved.
 *  - `tfjs-graph:<dir>`: a real pretrained tfjs GraphModel exported to
 *    disk (model.json + weight shards); the model must map a
 *    [1,H,W,3] float input to a [1,D] embedding.
 *
 * All embeddings are rounded to float32.
 */
import * as fs from 'fs'
import * as path from 'path'

import * as tf from '@tensorflow/tfjs'

import type { Y4MFrame } from './y4m'

export interface FrameImage extends Y4MFrame {
  width: number
  height: number
}

export interface Encoder {
  id: string
  dim: number
  embed(frame: FrameImage): Promise<Float32Array>
}

export const DEFAULT_ENCODER_ID = 'seeded-cnn-v1/64'

/** Deterministic 32-bit PRNG (mulberry32); good enough for weight init. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0
  return () => {
    state = (state + 0x6d2b79f5) >>> 0
    let t = state
    t = Math.imul(t ^ (t >>> 15), t | 1)
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61)
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

const PATCH = 32 // frames are resampled to PATCH x PATCH x 3 before encoding

/** Nearest-neighbor resample of the YUV planes into [0,1] RGB-ish channels. */
export function frameToPatch(frame: FrameImage, size = PATCH): Float32Array {
  const out = new Float32Array(size * size * 3)
  const cw = frame.width / 2
  for (let row = 0; row < size; row++) {
    const sy = Math.min(frame.height - 1, Math.floor(((row + 0.5) * frame.height) / size))
    for (let col = 0; col < size; col++) {
      const sx = Math.min(frame.width - 1, Math.floor(((col + 0.5) * frame.width) / size))
      const ci = Math.floor(sy / 2) * cw + Math.floor(sx / 2)
      const base = (row * size + col) * 3
      out[base] = frame.y[sy * frame.width + sx]! / 255
      out[base + 1] = frame.u[ci]! / 255
      out[base + 2] = frame.v[ci]! / 255
    }
  }
  return out
}

function seededConvWeights(dim: number, seed: number) {
  const rng = mulberry32(seed)
  const uniform = (n: number, scale: number) => {
    const w = new Float32Array(n)
    for (let i = 0; i < n; i++) w[i] = (rng() * 2 - 1) * scale
    return w
  }
  const c1 = 16
  return {
    w1: tf.tensor4d(uniform(3 * 3 * 3 * c1, Math.sqrt(2 / (3 * 3 * 3))), [3, 3, 3, c1]),
    w2: tf.tensor4d(uniform(3 * 3 * c1 * dim, Math.sqrt(2 / (3 * 3 * c1))), [3, 3, c1, dim]),
  }
}

export function seededCnnEncoder(dim = 64, seed = 0x5ee0): Encoder {
  let weights: ReturnType<typeof seededConvWeights> | null = null
  return {
    id: `seeded-cnn-v1/${dim}`,
    dim,
    async embed(frame) {
      await tf.ready()
      weights ??= seededConvWeights(dim, seed)
      const { w1, w2 } = weights
      const out = tf.tidy(() => {
        const x = tf.tensor4d(frameToPatch(frame), [1, PATCH, PATCH, 3])
        const h1 = tf.relu(tf.conv2d(x, w1, 2, 'same'))
        const h2 = tf.relu(tf.conv2d(h1, w2, 2, 'same'))
        return tf.mean(h2, [1, 2]) // global average pool -> [1, dim]
      })
      const data = (await out.data()) as Float32Array
      out.dispose()
      return Float32Array.from(data)
    },
  }
}

export function lumaHistEncoder(bins = 64): Encoder {
  return {
    id: `luma-hist-v1/${bins}`,
    dim: bins,
    async embed(frame) {
      const hist = new Float32Array(bins)
      for (const value of frame.y) {
        hist[Math.min(bins - 1, Math.floor((value * bins) / 256))]! += 1
      }
      const n = frame.y.length || 1
      for (let i = 0; i < bins; i++) hist[i] = Math.fround(hist[i]! / n)
      return hist
    },
  }
}

/** tf.io handler reading a GraphModel from local disk (model.json + shards). */
function localFileIO(dir: string): tf.io.IOHandler {
  return {
    async load() {
      const modelPath = path.join(dir, 'model.json')
      const json = JSON.parse(fs.readFileSync(modelPath, 'utf-8'))
      const manifest = json.weightsManifest as Array<{
        paths: string[]
        weights: tf.io.WeightsManifestEntry[]
      }>
      const specs: tf.io.WeightsManifestEntry[] = []
      const buffers: Buffer[] = []
      for (const group of manifest) {
        specs.push(...group.weights)
        for (const rel of group.paths) {
          buffers.push(fs.readFileSync(path.join(dir, rel)))
        }
      }
      const blob = Buffer.concat(buffers)
      return {
        modelTopology: json.modelTopology,
        format: json.format,
        generatedBy: json.generatedBy,
        convertedBy: json.convertedBy,
        weightSpecs: specs,
        weightData: blob.buffer.slice(blob.byteOffset, blob.byteOffset + blob.byteLength),
      }
    },
  }
}

export class EncoderUnavailableError extends Error {}

export function graphModelEncoder(dir: string, dim?: number): Encoder {
  if (!fs.existsSync(path.join(dir, 'model.json'))) {
    throw new EncoderUnavailableError(
      `no tfjs GraphModel at ${dir} (expected model.json); ` +
        `use the built-in "${DEFAULT_ENCODER_ID}" encoder or export a model there`,
    )
  }
  let model: tf.GraphModel | null = null
  let probedDim = dim ?? 0
  return {
    id: `tfjs-graph:${dir}`,
    get dim() {
      return probedDim
    },
    async embed(frame) {
      await tf.ready()
      model ??= await tf.loadGraphModel(localFileIO(dir))
      const x = tf.tensor4d(frameToPatch(frame), [1, PATCH, PATCH, 3])
      const out = model.predict(x) as tf.Tensor
      const data = (await out.data()) as Float32Array
      x.dispose()
      out.dispose()
      probedDim = data.length
      return Float32Array.from(data)
    },
  }
}

export function getEncoder(id: string = DEFAULT_ENCODER_ID): Encoder {
  if (id.startsWith('tfjs-graph:')) {
    return graphModelEncoder(id.slice('tfjs-graph:'.length))
  }
  const seeded = id.match(/^seeded-cnn-v1\/(\d+)$/)
  if (seeded) {
    return seededCnnEncoder(Number(seeded[1]))
  }
  const luma = id.match(/^luma-hist-v1\/(\d+)$/)
  if (luma) {
    return lumaHistEncoder(Number(luma[1]))
  }
  throw new EncoderUnavailableError(
    `unknown encoder id "${id}" (expected seeded-cnn-v1/<dim>, luma-hist-v1/<bins> ` +
      `or tfjs-graph:<dir>)`,
  )
}
