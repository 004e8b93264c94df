"""Caption segmentation.

Splits a figure caption into labeled subcaption segments by scanning for
panel-label markers. A marker is one of "(X)", "X)", "X." or "X:" where X
is a single letter, a comma/ampersand list of letters ("A, B"), or a
two-letter ascending range ("a-c", "a–c", "a~c"). Markers count only at
segment-initial positions: the start of the caption, after sentence-ending
punctuation, or (parenthesized form only) immediately after the previous
marker. Anything else ("a vessel", "MRI.", "(a) E. coli") is prose.

Segment text runs from the end of its marker to the start of the next
marker (or the caption end), trimmed. A marker listing several letters
yields one segment per letter, all sharing the same text and span.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import UnparsableBody

FLAG_DUPLICATE_LABEL = "duplicate_label"
FLAG_EMPTY_SEGMENT = "empty_segment"

_LETTER = r"[A-Za-z]"
_LIST_BODY = rf"{_LETTER}(?:\s*[,&]\s*{_LETTER})+"
_RANGE_BODY = rf"{_LETTER}\s*[-–~]\s*{_LETTER}"
# list before range before single so the longest body form wins
_BODY = rf"(?:{_LIST_BODY}|{_RANGE_BODY}|{_LETTER})"
_MARKER_RE = re.compile(
    rf"\(\s*(?P<paren>{_BODY})\s*\)"
    rf"|(?P<half>{_BODY})\)(?=\s|$)"
    rf"|(?P<dot>{_BODY})[.:](?=\s|$)"
)
_RANGE_SPLIT_RE = re.compile(r"[-–~]")
_LIST_SPLIT_RE = re.compile(r"[,&]")

_SENTENCE_END = frozenset(".!?;:")
_MAX_RANGE_SPAN = 8


@dataclass(frozen=True)
class LabelMarker:
    """One recognized label marker inside a caption.

    byte_offset and marker_len address the raw UTF-8 bytes; char_start and
    char_end are the matching str indices, kept for slicing.
    """

    byte_offset: int
    marker_len: int
    letters: tuple[str, ...]
    char_start: int
    char_end: int


@dataclass(frozen=True)
class SubcaptionSegment:
    """A labeled span of caption text.

    span is a [start, end) byte range into the original caption such that
    the raw bytes decode to exactly `text`. label is None for the single
    segment of an unlabeled caption.
    """

    label: str | None
    text: str
    span: tuple[int, int]


@dataclass(frozen=True)
class ParsedCaption:
    segments: tuple[SubcaptionSegment, ...]
    shared_context: str
    flags: frozenset[str]
    markers: tuple[LabelMarker, ...]


def expand_range(raw_label_body: str) -> tuple[str, ...]:
    """Expand a marker body into its lowercase letters, ascending.

    Lists are deduplicated and sorted; ranges must be strictly ascending
    and span at most 8 letters. Raises UnparsableBody otherwise, which
    callers treat as "this marker is not a label".
    """
    body = raw_label_body.strip()
    if _LIST_SPLIT_RE.search(body):
        letters = set()
        for part in _LIST_SPLIT_RE.split(body):
            part = part.strip()
            if len(part) != 1 or not part.isalpha() or not part.isascii():
                raise UnparsableBody(raw_label_body)
            letters.add(part.lower())
        return tuple(sorted(letters))
    if _RANGE_SPLIT_RE.search(body):
        parts = [p.strip() for p in _RANGE_SPLIT_RE.split(body)]
        if len(parts) != 2 or any(
            len(p) != 1 or not p.isalpha() or not p.isascii() for p in parts
        ):
            raise UnparsableBody(raw_label_body)
        lo, hi = (p.lower() for p in parts)
        span = ord(hi) - ord(lo) + 1
        if span < 2 or span > _MAX_RANGE_SPAN:
            raise UnparsableBody(raw_label_body)
        return tuple(chr(c) for c in range(ord(lo), ord(hi) + 1))
    if len(body) == 1 and body.isalpha() and body.isascii():
        return (body.lower(),)
    raise UnparsableBody(raw_label_body)


def _byte_offsets(caption: str) -> list[int]:
    """offsets[i] = byte offset of char i; offsets[len] = total bytes."""
    offsets = [0]
    total = 0
    for ch in caption:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def _segment_initial(caption: str, start: int, prev_end: int | None, paren: bool) -> bool:
    j = start - 1
    while j >= 0 and caption[j].isspace():
        j -= 1
    if j < 0:
        return True
    if caption[j] in _SENTENCE_END:
        return True
    # only a parenthesized marker may directly follow the previous marker;
    # "(a) E. coli" must not turn the genus initial into a label
    return paren and prev_end is not None and j == prev_end - 1


def scan_labels(caption: str) -> list[LabelMarker]:
    """Find label markers in ascending offset order.

    Candidates at non-segment-initial positions or with unparsable bodies
    are passed over; accepted markers never overlap.
    """
    offsets = _byte_offsets(caption)
    markers: list[LabelMarker] = []
    prev_end: int | None = None
    pos = 0
    while True:
        m = _MARKER_RE.search(caption, pos)
        if m is None:
            break
        if not _segment_initial(caption, m.start(), prev_end, paren=m["paren"] is not None):
            pos = m.start() + 1
            continue
        body = m["paren"] or m["half"] or m["dot"]
        try:
            letters = expand_range(body)
        except UnparsableBody:
            pos = m.start() + 1
            continue
        markers.append(
            LabelMarker(
                byte_offset=offsets[m.start()],
                marker_len=offsets[m.end()] - offsets[m.start()],
                letters=letters,
                char_start=m.start(),
                char_end=m.end(),
            )
        )
        prev_end = m.end()
        pos = m.end()
    return markers


def _stripped_span(caption: str, lo: int, hi: int) -> tuple[str, int, int]:
    """Trim caption[lo:hi]; return (text, char_start, char_end) of the trim."""
    while lo < hi and caption[lo].isspace():
        lo += 1
    while hi > lo and caption[hi - 1].isspace():
        hi -= 1
    return caption[lo:hi], lo, hi


def _whole_caption_segment(caption: str, offsets: list[int]) -> SubcaptionSegment:
    text, lo, hi = _stripped_span(caption, 0, len(caption))
    return SubcaptionSegment(label=None, text=text, span=(offsets[lo], offsets[hi]))


def parse_caption(caption: str) -> ParsedCaption:
    """Segment a caption, reporting quality flags and the raw markers.

    No markers, or a letter repeated across markers (flag duplicate_label),
    yields a single unlabeled whole-caption segment. Empty inter-marker
    text drops that segment and sets flag empty_segment. shared_context is
    the prose before the first marker; it is never merged into segments.
    """
    offsets = _byte_offsets(caption)
    markers = tuple(scan_labels(caption))
    if not markers:
        return ParsedCaption(
            segments=(_whole_caption_segment(caption, offsets),),
            shared_context="",
            flags=frozenset(),
            markers=(),
        )
    all_letters = [letter for marker in markers for letter in marker.letters]
    if len(all_letters) != len(set(all_letters)):
        return ParsedCaption(
            segments=(_whole_caption_segment(caption, offsets),),
            shared_context="",
            flags=frozenset({FLAG_DUPLICATE_LABEL}),
            markers=markers,
        )
    shared_context = caption[: markers[0].char_start].strip()
    flags: set[str] = set()
    segments: list[SubcaptionSegment] = []
    for marker, nxt in zip(markers, (*markers[1:], None)):
        raw_hi = nxt.char_start if nxt is not None else len(caption)
        text, lo, hi = _stripped_span(caption, marker.char_end, raw_hi)
        if not text:
            flags.add(FLAG_EMPTY_SEGMENT)
            continue
        span = (offsets[lo], offsets[hi])
        segments.extend(
            SubcaptionSegment(label=letter, text=text, span=span)
            for letter in marker.letters
        )
    return ParsedCaption(
        segments=tuple(segments),
        shared_context=shared_context,
        flags=frozenset(flags),
        markers=markers,
    )


def segment_caption(caption: str) -> list[SubcaptionSegment]:
    """Ordered subcaption segments of a caption (see parse_caption)."""
    return list(parse_caption(caption).segments)


__all__ = [
    "FLAG_DUPLICATE_LABEL",
    "FLAG_EMPTY_SEGMENT",
    "LabelMarker",
    "ParsedCaption",
    "SubcaptionSegment",
    "expand_range",
    "parse_caption",
    "scan_labels",
    "segment_caption",
]
