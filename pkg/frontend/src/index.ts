export { sampleTimes } from './sampling'
export { formatFloat32, renderMemfeat, writeMemfeat, renderShotList, writeShotList } from './memfeat'
export type { FeatureRow, Shot } from './memfeat'
export { parseY4M, renderY4M, durationMs, frameTimeMs, nearestFrameIndex, Y4MError } from './y4m'
export type { Y4MFrame, Y4MVideo } from './y4m'
export {
  getEncoder,
  seededCnnEncoder,
  lumaHistEncoder,
  graphModelEncoder,
  EncoderUnavailableError,
  DEFAULT_ENCODER_ID,
} from './encoder'
export type { Encoder, FrameImage } from './encoder'
export { detectShots, detectShotsHistogram, colorHistogram, SbdUnavailableError } from './shots'
export { extractFeatures, loadVideo } from './extract'
export type { ExtractConfig, ExtractResult } from './extract'
