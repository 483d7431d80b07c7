"""Timestamp parsing and formatting for the annotation corpora.

Corpus timestamps look like ``"00:36.5"`` (MM:SS.s) or ``"01:02:03.4"``
(HH:MM:SS.s). They are stored internally as integer milliseconds; the
written precision (up to three fractional digits) is preserved exactly,
never rounded.
"""

from __future__ import annotations

import re

from .errors import ParseError

_TIMESTAMP_RE = re.compile(
    r"^(?:(?P<h>\d{1,2}):(?=\d{2}:))?(?P<m>\d{1,3}):(?P<s>\d{2})(?:\.(?P<frac>\d{1,3}))?$"
)

MS_PER_DAY = 86_400_000


def parse_timestamp(text: str) -> int:
    """Parse ``MM:SS.s`` or ``HH:MM:SS.s`` into integer milliseconds.

    The fractional part may carry one to three digits; more would imply
    sub-millisecond precision the corpus does not have and is rejected.
    """
    m = _TIMESTAMP_RE.match(text.strip())
    if m is None:
        raise ParseError(f"malformed timestamp {text!r} (expected MM:SS.s or HH:MM:SS.s)")
    hours = int(m.group("h")) if m.group("h") else 0
    minutes = int(m.group("m"))
    seconds = int(m.group("s"))
    if seconds > 59:
        raise ParseError(f"malformed timestamp {text!r}: seconds field {seconds} > 59")
    if m.group("h") and minutes > 59:
        raise ParseError(f"malformed timestamp {text!r}: minutes field {minutes} > 59")
    frac = m.group("frac") or "0"
    millis = int(frac.ljust(3, "0"))
    return ((hours * 60 + minutes) * 60 + seconds) * 1000 + millis


def format_timestamp(ms: int) -> str:
    """Canonical formatter, the left inverse of :func:`parse_timestamp`.

    Values under one hour render as ``MM:SS.s``, longer ones as
    ``HH:MM:SS.s``. Trailing zeros in the fraction are trimmed but at
    least one digit is kept, matching the source corpus style
    (``"00:36.5"``, ``"00:00.0"``).
    """
    if ms < 0:
        raise ValueError(f"negative timestamp: {ms}")
    total_s, millis = divmod(int(ms), 1000)
    hours, rem = divmod(total_s, 3600)
    minutes, seconds = divmod(rem, 60)
    frac = f"{millis:03d}".rstrip("0") or "0"
    if hours:
        return f"{hours:02d}:{minutes:02d}:{seconds:02d}.{frac}"
    return f"{minutes:02d}:{seconds:02d}.{frac}"
