import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shotmem.errors import ValidationError
from shotmem.regression import ShotScore
from shotmem.shots import Shot
from shotmem.signals import (
    MemSignal,
    SignalPoint,
    SmoothingConfig,
    build_signal,
    read_signal,
    smooth,
    smooth_scores,
    sweep_windows,
    write_signal,
)


def naive_smooth(x, window):
    """Independent per-index oracle for the shrink-window moving average."""
    x = list(x)
    half = window // 2
    out = []
    for i in range(len(x)):
        lo = max(i - half, 0)
        hi = min(i + half, len(x) - 1)
        chunk = x[lo : hi + 1]
        out.append(sum(chunk) / len(chunk))
    return out


def make_signal(scores, starts=None):
    starts = starts or [i * 2000 for i in range(len(scores))]
    return MemSignal(
        episode_id="e1",
        points=tuple(
            SignalPoint(i, start, float(s)) for i, (start, s) in enumerate(zip(starts, scores))
        ),
    )


def score_list(values):
    return [ShotScore(i, float(v), 0.01, 1) for i, v in enumerate(values)]


class TestBuildSignal:
    def shots(self, n):
        return [Shot("e1", i, i * 2000, (i + 1) * 2000) for i in range(n)]

    def test_three_shots_in_time_order(self):
        signal = build_signal(self.shots(3), score_list([0.7, 0.8, 0.9]))
        assert [p.score for p in signal.points] == [0.7, 0.8, 0.9]
        assert [p.start_ms for p in signal.points] == [0, 2000, 4000]

    def test_shuffled_scores_keyed_by_index(self):
        scores = score_list([0.7, 0.8, 0.9])
        a = build_signal(self.shots(3), scores)
        b = build_signal(self.shots(3), list(reversed(scores)))
        assert a == b

    def test_empty(self):
        assert len(build_signal([], [])) == 0

    def test_count_mismatch_reports_counts(self):
        with pytest.raises(ValidationError, match="3 shots, 2 scores"):
            build_signal(self.shots(3), score_list([0.7, 0.8]))

    def test_extra_scores_rejected(self):
        with pytest.raises(ValidationError, match="2 shots, 3 scores"):
            build_signal(self.shots(2), score_list([0.7, 0.8, 0.9]))


class TestSmooth:
    def test_constant_is_fixed_point(self):
        signal = make_signal([0.8] * 40)
        out = smooth(signal, SmoothingConfig(window=15))
        assert np.allclose(out.scores(), 0.8, atol=0)

    def test_hand_computed_window_three(self):
        out = smooth_scores(np.array([0.7, 0.8, 0.9]), 3)
        # shrink at edges: [mean(.7,.8), mean(.7,.8,.9), mean(.8,.9)]
        np.testing.assert_allclose(out, [0.75, 0.8, 0.85], atol=1e-15)

    def test_window_one_is_identity(self):
        scores = [0.4, 0.9, 0.1, 0.6]
        out = smooth(make_signal(scores), SmoothingConfig(window=1))
        assert list(out.scores()) == scores

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(30):
            x = rng.uniform(0, 1, size=rng.integers(1, 60))
            for window in (1, 2, 3, 4, 15, 100):
                np.testing.assert_allclose(
                    smooth_scores(x, window), naive_smooth(x, window), atol=1e-12
                )

    def test_even_window_uses_floor_half(self):
        # floor(4/2)=2 either side: same as window 5
        x = np.array([0.1, 0.5, 0.9, 0.3, 0.7])
        np.testing.assert_allclose(smooth_scores(x, 4), smooth_scores(x, 5), atol=0)

    def test_length_preserved(self):
        for n in (1, 2, 7, 100):
            x = np.linspace(0, 1, n)
            for window in (1, 3, 15, 305):
                assert smooth_scores(x, window).shape == (n,)

    @given(
        scores=st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=80),
        window=st.integers(min_value=1, max_value=305),
    )
    @settings(max_examples=80, deadline=None)
    def test_bounded_by_signal_extremes(self, scores, window):
        out = smooth_scores(np.array(scores), window)
        assert out.min() >= min(scores) - 1e-12
        assert out.max() <= max(scores) + 1e-12

    @given(
        scores=st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=2, max_size=60),
        window=st.integers(min_value=1, max_value=31),
        a=st.floats(min_value=-2.0, max_value=2.0),
        b=st.floats(min_value=-1.0, max_value=1.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_linearity(self, scores, window, a, b):
        x = np.array(scores)
        lhs = smooth_scores(a * x + b, window)
        rhs = a * smooth_scores(x, window) + b
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    @given(
        scores=st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=2, max_size=60),
        window=st.integers(min_value=1, max_value=305),
    )
    @settings(max_examples=80, deadline=None)
    def test_total_variation_non_increasing(self, scores, window):
        x = np.array(scores)
        out = smooth_scores(x, window)
        tv = lambda v: np.abs(np.diff(v)).sum()
        assert tv(out) <= tv(x) + 1e-10


class TestSweep:
    def test_default_sweep_has_30_entries_with_endpoints(self):
        signal = make_signal(np.random.default_rng(0).uniform(0, 1, 50))
        out = sweep_windows(signal)
        assert len(out) == 30
        assert sorted(out)[0] == 15 and sorted(out)[-1] == 305
        assert sorted(out) == list(range(15, 306, 10))

    def test_single_entry(self):
        out = sweep_windows(make_signal([0.5, 0.6]), n_min=15, n_max=15)
        assert list(out) == [15]

    def test_constant_signal_constant_everywhere(self):
        out = sweep_windows(make_signal([0.8] * 20))
        for sig in out.values():
            assert np.allclose(sig.scores(), 0.8, atol=0)

    def test_bad_range_rejected(self):
        with pytest.raises(ValidationError):
            sweep_windows(make_signal([0.5]), n_min=20, n_max=10)


class TestSignalIO:
    def test_round_trip(self, tmp_path):
        signal = make_signal([0.7, 0.8, 0.9, 0.65])
        smoothed = sweep_windows(signal, n_min=3, n_max=5, step=2)
        path = tmp_path / "signal.tsv"
        write_signal(signal, smoothed, path)
        raw_back, smoothed_back = read_signal(path, episode_id="e1")
        assert raw_back == signal
        assert set(smoothed_back) == {3, 5}
        for n in (3, 5):
            np.testing.assert_array_equal(
                smoothed_back[n].scores(), smoothed[n].scores()
            )

    def test_header_lists_windows(self, tmp_path):
        signal = make_signal([0.7, 0.8])
        path = tmp_path / "signal.tsv"
        write_signal(signal, sweep_windows(signal, 15, 25, 10), path)
        header = path.read_text().splitlines()[0]
        assert header == "shot_index\tstart_ms\traw\tsmoothed_15\tsmoothed_25"
