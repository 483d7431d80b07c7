import pytest
from hypothesis import given, strategies as st

from shotmem.errors import ParseError
from shotmem.timecode import MS_PER_DAY, format_timestamp, parse_timestamp


def test_table_style_timestamp():
    assert parse_timestamp("00:36.5") == 36500


def test_zero():
    assert parse_timestamp("00:00.0") == 0


def test_hours_form():
    # 1 h + 2 min + 3.4 s = 3600000 + 120000 + 3400
    assert parse_timestamp("01:02:03.4") == 3723400


def test_fraction_precision_preserved():
    assert parse_timestamp("00:01.25") == 1250
    assert parse_timestamp("00:01.257") == 1257


@pytest.mark.parametrize(
    "bad",
    ["", "12", "1:2.5", "00:61.0", "01:60:00.0", "00:36.5000", "ab:cd.e", "-01:00.0"],
)
def test_malformed_rejected(bad):
    with pytest.raises(ParseError):
        parse_timestamp(bad)


def test_canonical_format_matches_corpus_style():
    assert format_timestamp(36500) == "00:36.5"
    assert format_timestamp(0) == "00:00.0"
    assert format_timestamp(3723400) == "01:02:03.4"


@given(st.integers(min_value=0, max_value=MS_PER_DAY // 100 - 1))
def test_parse_inverts_format_at_100ms_resolution(ticks):
    ms = ticks * 100
    assert parse_timestamp(format_timestamp(ms)) == ms


@given(st.integers(min_value=0, max_value=MS_PER_DAY - 1))
def test_parse_inverts_format_at_full_resolution(ms):
    assert parse_timestamp(format_timestamp(ms)) == ms
