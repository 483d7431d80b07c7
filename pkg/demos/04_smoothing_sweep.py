#!/usr/bin/env python3
"""Smooth a jagged memorability signal across the window sweep.

Builds a noisy signal with a planted bump, smooths it at increasing
window sizes, and reports how total variation falls while the bump
stays visible until the window outgrows it.
"""

import numpy as np

from shotmem.signals import MemSignal, SignalPoint, smooth_scores, sweep_windows


def main():
    rng = np.random.default_rng(3)
    n = 400
    raw = 0.78 + rng.normal(0, 0.03, n)
    raw[180:220] += 0.08  # a 40-shot memorable stretch
    signal = MemSignal(
        episode_id="demo",
        points=tuple(SignalPoint(i, i * 2000, float(s)) for i, s in enumerate(raw)),
    )

    tv = lambda v: float(np.abs(np.diff(v)).sum())
    print(f"raw signal: {n} shots, total variation {tv(raw):.2f}")
    print(f"{'window':>7} {'total variation':>16} {'bump height':>12}")
    for window in (1, 3, 15, 55, 155, 305):
        out = smooth_scores(raw, window)
        bump = out[180:220].mean() - np.concatenate([out[:150], out[250:]]).mean()
        print(f"{window:>7} {tv(out):>16.3f} {bump:>12.4f}")

    smoothed = sweep_windows(signal)  # the default 15..305 step-10 sweep
    print(f"\nsweep produced {len(smoothed)} smoothed signals "
          f"(windows {min(smoothed)}..{max(smoothed)})")
    assert all(len(sig) == n for sig in smoothed.values())
    print("every smoothed signal preserves the input length")


if __name__ == "__main__":
    main()
