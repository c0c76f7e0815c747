"""Script classification and span segmentation for code-mixed text."""

from dataclasses import dataclass
from enum import StrEnum

from src.corpus.labels import Language


class Script(StrEnum):
    """Writing system of a character. NEUTRAL covers digits, punctuation, whitespace, emoji."""

    LATIN = "latin"
    KANNADA = "kannada"
    MALAYALAM = "malayalam"
    TAMIL = "tamil"
    NEUTRAL = "neutral"


SCRIPT_FOR_LANGUAGE = {
    Language.KANNADA: Script.KANNADA,
    Language.MALAYALAM: Script.MALAYALAM,
    Language.TAMIL: Script.TAMIL,
}

# Inclusive Unicode block bounds.
SCRIPT_BLOCKS = {
    Script.KANNADA: (0x0C80, 0x0CFF),
    Script.MALAYALAM: (0x0D00, 0x0D7F),
    Script.TAMIL: (0x0B80, 0x0BFF),
}

_LATIN_EXTENDED = ((0x00C0, 0x024F), (0x1E00, 0x1EFF))


def detect_script(ch: str) -> Script:
    """Classify a single character. Total over all Unicode scalar values."""
    cp = ord(ch)
    if ("a" <= ch <= "z") or ("A" <= ch <= "Z"):
        return Script.LATIN
    for script, (lo, hi) in SCRIPT_BLOCKS.items():
        if lo <= cp <= hi:
            return script
    if ch.isalpha() and any(lo <= cp <= hi for lo, hi in _LATIN_EXTENDED):
        return Script.LATIN
    return Script.NEUTRAL


def in_block(ch: str, script: Script) -> bool:
    """Check whether a character lies in a Dravidian script's Unicode block."""
    lo, hi = SCRIPT_BLOCKS[script]
    return lo <= ord(ch) <= hi


@dataclass(frozen=True, slots=True)
class SpanSegment:
    """A maximal run of one script.

    Attributes:
        text: Span text, never empty
        script: Script shared by all non-neutral characters of the span
    """

    text: str
    script: Script


def segment_spans(text: str) -> list[SpanSegment]:
    """Partition text into single-script spans.

    Neutral characters join the preceding span; leading neutral characters join the
    first scripted span. A text with no scripted characters is one NEUTRAL span.
    """
    spans: list[SpanSegment] = []
    current: list[str] = []
    current_script: Script | None = None
    for ch in text:
        script = detect_script(ch)
        if script is Script.NEUTRAL or script is current_script:
            current.append(ch)
            continue
        if current_script is None:
            # Leading neutral characters attach to this first scripted span.
            current_script = script
            current.append(ch)
            continue
        spans.append(SpanSegment("".join(current), current_script))
        current, current_script = [ch], script
    if current:
        spans.append(SpanSegment("".join(current), current_script or Script.NEUTRAL))
    return spans
