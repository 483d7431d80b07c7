import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shotmem.errors import ParseError, SchemaError, ValidationError
from shotmem.shots import (
    FrameHistogramSequence,
    Shot,
    detect_shots_histogram,
    parse_shot_list,
    read_histograms,
    validate_shot_list,
    write_histograms,
    write_shot_list,
)

HEADER = "episode_id\tshot_index\tstart_ms\tend_ms"


def shot_text(rows):
    return "\n".join([HEADER, *(f"e1\t{i}\t{a}\t{b}" for i, a, b in rows)]) + "\n"


def constant_histograms(n, bins=64):
    h = np.full((n, bins), 1.0 / bins)
    return FrameHistogramSequence(frame_interval_ms=40, histograms=h)


def hist_with_changes(n, change_at, bins=64, interval=40):
    """Histogram sequence with mass flips at the given frame indices."""
    base = np.zeros(bins)
    base[0] = 1.0
    rows = []
    flip = False
    for i in range(n):
        if i in change_at:
            flip = not flip
        row = np.zeros(bins)
        row[1 if flip else 0] = 1.0
        rows.append(row)
    return FrameHistogramSequence(frame_interval_ms=interval, histograms=np.array(rows))


class TestParseShotList:
    def test_two_rows(self):
        shots = parse_shot_list(shot_text([(0, 0, 5000), (1, 5000, 9000)]))
        assert len(shots) == 2
        assert shots[0] == Shot("e1", 0, 0, 5000)

    def test_out_of_order_rejected_in_strict_mode(self):
        text = shot_text([(0, 5000, 9000), (1, 0, 5000)])
        with pytest.raises(ValidationError, match="out of order"):
            parse_shot_list(text)

    def test_lenient_mode_sorts_and_reindexes(self):
        text = "\n".join(
            [HEADER, "e1\t7\t8000\t9000", "e1\t5\t0\t4000", "e1\t6\t4000\t8000"]
        )
        shots = parse_shot_list(text, strict=False)
        assert [s.shot_index for s in shots] == [0, 1, 2]
        assert [s.start_ms for s in shots] == [0, 4000, 8000]

    def test_overlap_names_indices(self):
        text = shot_text([(0, 0, 5000), (1, 4000, 9000)])
        with pytest.raises(ValidationError, match="0 and 1"):
            parse_shot_list(text)

    def test_overlap_rejected_even_in_lenient_mode(self):
        text = shot_text([(0, 0, 5000), (1, 4000, 9000)])
        with pytest.raises(ValidationError, match="overlap"):
            parse_shot_list(text, strict=False)

    def test_bad_header(self):
        with pytest.raises(SchemaError):
            parse_shot_list("a\tb\tc\td\n")

    def test_bad_integer_names_line(self):
        text = "\n".join([HEADER, "e1\t0\tzero\t100"])
        with pytest.raises(ParseError, match="line 2"):
            parse_shot_list(text)

    def test_degenerate_interval_rejected(self):
        text = shot_text([(0, 1000, 1000)])
        with pytest.raises(ValidationError):
            parse_shot_list(text)

    def test_round_trip(self, tmp_path):
        shots = parse_shot_list(shot_text([(0, 0, 5000), (1, 5000, 9000)]))
        path = tmp_path / "shots.tsv"
        write_shot_list(shots, path)
        assert parse_shot_list(path.read_text()) == shots


class TestDetector:
    def test_constant_histograms_single_shot(self):
        shots = detect_shots_histogram(constant_histograms(200), episode_id="e1")
        assert shots == [Shot("e1", 0, 0, 200 * 40)]

    def test_boundary_position_exact(self):
        # One abrupt change between frames 99 and 100 at 40 ms spacing.
        seq = hist_with_changes(200, {100})
        shots = detect_shots_histogram(seq, episode_id="e1")
        assert [(s.start_ms, s.end_ms) for s in shots] == [(0, 4000), (4000, 8000)]

    def test_close_second_boundary_suppressed(self):
        # Changes at frames 100 and 105: 200 ms apart with min_shot_ms=500.
        seq = hist_with_changes(200, {100, 105})
        shots = detect_shots_histogram(seq, episode_id="e1", min_shot_ms=500)
        assert [s.start_ms for s in shots] == [0, 4000]

    def test_fewer_than_two_frames(self):
        assert detect_shots_histogram(constant_histograms(1)) == [Shot("", 0, 0, 40)]
        assert detect_shots_histogram(constant_histograms(0)) == []

    def test_threshold_domain(self):
        with pytest.raises(ValueError):
            detect_shots_histogram(constant_histograms(5), threshold=0.0)
        with pytest.raises(ValueError):
            detect_shots_histogram(constant_histograms(5), threshold=2.5)

    @given(
        changes=st.sets(st.integers(min_value=1, max_value=99), max_size=12),
        min_shot=st.sampled_from([40, 120, 400, 1000]),
    )
    @settings(max_examples=60, deadline=None)
    def test_tiling_and_min_length(self, changes, min_shot):
        seq = hist_with_changes(100, changes)
        shots = detect_shots_histogram(seq, min_shot_ms=min_shot)
        assert shots[0].start_ms == 0
        assert shots[-1].end_ms == seq.duration_ms
        for a, b in zip(shots, shots[1:]):
            assert a.end_ms == b.start_ms
        for shot in shots[:-1]:
            assert shot.duration_ms >= min_shot
        assert [s.shot_index for s in shots] == list(range(len(shots)))

    def test_threshold_monotonicity(self):
        rng = np.random.default_rng(11)
        hist = rng.dirichlet(np.ones(64), size=300)
        seq = FrameHistogramSequence(frame_interval_ms=40, histograms=hist)
        counts = [
            len(detect_shots_histogram(seq, threshold=t))
            for t in np.linspace(0.05, 2.0, 10)
        ]
        assert counts == sorted(counts, reverse=True)


class TestValidateShotList:
    def test_tiling_is_clean(self):
        shots = [Shot("e", 0, 0, 5000), Shot("e", 1, 5000, 9000)]
        report = validate_shot_list(shots, 9000)
        assert report.is_clean

    def test_gap_reported(self):
        shots = [Shot("e", 0, 0, 5000), Shot("e", 1, 5200, 9000)]
        report = validate_shot_list(shots, 9000)
        assert report.gaps == ((5000, 5200),)
        assert not report.overlaps

    def test_out_of_duration_reported(self):
        shots = [Shot("e", 0, 0, 5000), Shot("e", 1, 5000, 9500)]
        report = validate_shot_list(shots, 9000)
        assert report.out_of_range == (1,)

    def test_overlap_reported(self):
        shots = [Shot("e", 0, 0, 5000), Shot("e", 1, 4000, 9000)]
        report = validate_shot_list(sorted(shots, key=lambda s: s.start_ms), 9000)
        assert report.overlaps == ((0, 1),)

    def test_leading_gap(self):
        report = validate_shot_list([Shot("e", 0, 1000, 2000)], 2000)
        assert (0, 1000) in report.gaps


class TestHistogramIO:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        hist = rng.dirichlet(np.ones(16), size=5).astype(np.float32)
        seq = FrameHistogramSequence(frame_interval_ms=100, histograms=hist)
        path = tmp_path / "h.tsv"
        write_histograms(seq, path)
        back = read_histograms(path)
        assert back.frame_interval_ms == 100
        np.testing.assert_array_equal(
            back.histograms.astype(np.float32), seq.histograms.astype(np.float32)
        )

    def test_unnormalized_rejected(self):
        with pytest.raises(ValidationError, match="not normalized"):
            FrameHistogramSequence(frame_interval_ms=40, histograms=np.ones((2, 4)))
