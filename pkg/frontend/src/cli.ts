/**
 * Command line:
 *   extract --video in.y4m --out-features out.memfeat [--out-shots shots.tsv]
 *           [--fps 3] [--encoder seeded-cnn-v1/64] [--sbd histogram]
 *           [--threshold 0.5] [--min-shot-ms 400] [--episode-id id]
 *
 * Exit codes mirror the consumer pipeline: 0 ok, 2 missing/unreadable
 * input (including an unavailable model), 3 decode/validation failure.
 */
import { EncoderUnavailableError } from './encoder'
import { extractFeatures, ExtractConfig } from './extract'
import { SbdUnavailableError } from './shots'
import { Y4MError } from './y4m'

const EXIT_OK = 0
const EXIT_INPUT = 2
const EXIT_VALIDATION = 3

const FLAGS: Record<string, { key: string; parse?: (v: string) => unknown }> = {
  '--video': { key: 'video' },
  '--out-features': { key: 'outFeatures' },
  '--out-shots': { key: 'outShots' },
  '--episode-id': { key: 'episodeId' },
  '--encoder': { key: 'encoder' },
  '--sbd': { key: 'sbd' },
  '--fps': { key: 'fps', parse: Number },
  '--threshold': { key: 'threshold', parse: Number },
  '--min-shot-ms': { key: 'minShotMs', parse: Number },
}

function usage(): string {
  return (
    'usage: extract --video <clip.y4m> --out-features <file.memfeat> ' +
    '[--out-shots <shots.tsv>] [--fps N] [--encoder ID] [--sbd histogram] ' +
    '[--threshold T] [--min-shot-ms N] [--episode-id ID]'
  )
}

export function parseArgs(argv: string[]): ExtractConfig {
  if (argv[0] !== 'extract') {
    throw new UsageError(`unknown command "${argv[0] ?? ''}"\n${usage()}`)
  }
  const raw: Record<string, unknown> = {}
  for (let i = 1; i < argv.length; i += 2) {
    const flag = FLAGS[argv[i]!]
    if (!flag) {
      throw new UsageError(`unknown flag "${argv[i]}"\n${usage()}`)
    }
    const value = argv[i + 1]
    if (value === undefined) {
      throw new UsageError(`flag ${argv[i]} needs a value`)
    }
    raw[flag.key] = flag.parse ? flag.parse(value) : value
  }
  if (typeof raw.video !== 'string' || typeof raw.outFeatures !== 'string') {
    throw new UsageError(`--video and --out-features are required\n${usage()}`)
  }
  for (const key of ['fps', 'threshold', 'minShotMs'] as const) {
    const value = raw[key]
    if (value !== undefined && !Number.isFinite(value)) {
      throw new UsageError(`--${key.replace(/[A-Z]/g, c => '-' + c.toLowerCase())} needs a number`)
    }
  }
  const config: ExtractConfig = {
    video: raw.video,
    outFeatures: raw.outFeatures,
    outShots: raw.outShots as string | undefined,
    episodeId: raw.episodeId as string | undefined,
    encoder: raw.encoder as string | undefined,
    sbd: raw.sbd as string | undefined,
    fps: raw.fps as number | undefined,
  }
  if (raw.threshold !== undefined || raw.minShotMs !== undefined) {
    config.detect = {
      threshold: raw.threshold as number | undefined,
      minShotMs: raw.minShotMs as number | undefined,
    }
  }
  return config
}

export class UsageError extends Error {}

export async function main(argv: string[]): Promise<number> {
  let config: ExtractConfig
  try {
    config = parseArgs(argv)
  } catch (error) {
    console.error(`error: ${(error as Error).message}`)
    return EXIT_INPUT
  }
  try {
    const result = await extractFeatures(config)
    console.log(
      `extracted ${result.rows} feature rows (dim ${result.dim}) from ` +
        `${(result.durationMs / 1000).toFixed(2)} s of video -> ${config.outFeatures}`,
    )
    if (config.outShots) {
      console.log(`wrote ${result.shots} shots -> ${config.outShots}`)
    }
    return EXIT_OK
  } catch (error) {
    console.error(`error: ${(error as Error).message}`)
    if (
      error instanceof SbdUnavailableError ||
      error instanceof EncoderUnavailableError ||
      (error as Error).message.startsWith('cannot read video file')
    ) {
      return EXIT_INPUT
    }
    if (error instanceof Y4MError) {
      return EXIT_VALIDATION
    }
    return EXIT_VALIDATION
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then(code => process.exit(code))
}
