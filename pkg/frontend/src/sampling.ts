/**
 * Frame sampling grid, matching the consumer pipeline exactly:
 * t_k = floor(k * 1000 / rate) for k = 0 .. ceil(durationMs * rate / 1000) - 1.
 * Every timestamp is strictly below durationMs.
 */
export function sampleTimes(durationMs: number, ratePerS = 3): number[] {
  if (!(durationMs >= 0)) {
    throw new RangeError(`durationMs must be >= 0, got ${durationMs}`)
  }
  if (!(ratePerS > 0)) {
    throw new RangeError(`ratePerS must be > 0, got ${ratePerS}`)
  }
  const count = Math.ceil((durationMs * ratePerS) / 1000)
  const times: number[] = []
  for (let k = 0; k < count; k++) {
    times.push(Math.floor((k * 1000) / ratePerS))
  }
  return times
}
