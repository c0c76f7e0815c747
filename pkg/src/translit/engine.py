"""Deterministic longest-match transliteration of romanized spans."""

import logging
from dataclasses import dataclass

from src.corpus.dataset import Dataset, LabeledComment, Origin
from src.corpus.labels import Language
from src.errors import LanguageMismatchError
from src.translit.mapping import INHERENT_VOWEL, GraphemeMapping
from src.translit.scripts import Script, detect_script, segment_spans

logger = logging.getLogger(__name__)


@dataclass
class TransliterationStats:
    """Counters accumulated while transliterating.

    Attributes:
        texts: Texts processed
        latin_spans: Latin spans converted
        latin_chars: Characters inside converted spans
        unmapped_chars: Latin letters no mapping key matched (passed through unchanged)
    """

    texts: int = 0
    latin_spans: int = 0
    latin_chars: int = 0
    unmapped_chars: int = 0

    def to_dict(self) -> dict[str, int]:
        return {
            "texts": self.texts,
            "latin_spans": self.latin_spans,
            "latin_chars": self.latin_chars,
            "unmapped_chars": self.unmapped_chars,
        }


def _is_key_char(ch: str) -> bool:
    return "a" <= ch <= "z"


def _longest_match(lowered: str, start: int, mapping: GraphemeMapping) -> tuple[str, str] | None:
    """Find the longest key at ``start``; returns (key, kind) with kind in consonant/vowel/special."""
    limit = min(mapping.max_key_len, len(lowered) - start)
    for length in range(limit, 0, -1):
        key = lowered[start : start + length]
        if key in mapping.consonants:
            return key, "consonant"
        if key in mapping.independent_vowels:
            return key, "vowel"
        if key in mapping.specials:
            return key, "special"
    return None


def transliterate_span(
    latin_text: str,
    mapping: GraphemeMapping,
    stats: TransliterationStats | None = None,
) -> str:
    """Convert a Latin span to the mapping's script.

    Matching is case-insensitive and greedy longest-key-first. A consonant followed by
    a vowel key takes that vowel's sign; a consonant followed by anything else takes
    the virama. Characters no key matches pass through unchanged.

    Args:
        latin_text: Span text (normally one Latin span from segment_spans)
        mapping: Grapheme table
        stats: Optional counters to update

    Returns:
        Transliterated text
    """
    # ASCII-only lowercasing keeps indices aligned with the original text.
    lowered = "".join(ch.lower() if ch.isascii() else ch for ch in latin_text)
    out: list[str] = []
    pending: str | None = None
    unmapped = 0
    i, n = 0, len(lowered)

    while i < n:
        ch = lowered[i]
        match = _longest_match(lowered, i, mapping) if _is_key_char(ch) else None
        if match is None:
            if pending is not None:
                out.append(pending + mapping.virama)
                pending = None
            out.append(latin_text[i])
            if detect_script(ch) is Script.LATIN:
                unmapped += 1
            i += 1
            continue

        key, kind = match
        end = i + len(key)
        if kind == "vowel":
            if pending is None:
                out.append(mapping.independent_vowels[key])
            else:
                sign = mapping.vowel_signs[key]
                word_final = end >= n or not _is_key_char(lowered[end])
                if key == INHERENT_VOWEL and word_final and mapping.final_inherent_sign:
                    sign = mapping.final_inherent_sign
                out.append(pending + sign)
                pending = None
        else:
            if pending is not None:
                out.append(pending + mapping.virama)
                pending = None
            if kind == "consonant":
                pending = mapping.consonants[key]
            else:
                out.append(mapping.specials[key])
        i = end

    if pending is not None:
        out.append(pending + mapping.virama)

    if stats is not None:
        stats.latin_spans += 1
        stats.latin_chars += n
        stats.unmapped_chars += unmapped
    return "".join(out)


def transliterate_text(
    text: str,
    language: Language,
    mapping: GraphemeMapping,
    stats: TransliterationStats | None = None,
) -> str:
    """Transliterate the Latin spans of a text; everything else is copied unchanged.

    Raises:
        LanguageMismatchError: If the mapping is for another language
    """
    if mapping.language is not language:
        raise LanguageMismatchError(
            f"{mapping.language.value} mapping cannot transliterate {language.value} text"
        )
    parts = []
    for span in segment_spans(text):
        if span.script is Script.LATIN:
            parts.append(transliterate_span(span.text, mapping, stats))
        else:
            parts.append(span.text)
    if stats is not None:
        stats.texts += 1
    return "".join(parts)


def transliterate_dataset(
    dataset: Dataset,
    mapping: GraphemeMapping,
) -> tuple[Dataset, TransliterationStats]:
    """Transliterate every sample, tagging the results TRANSLITERATED.

    Labels are carried over unchanged; the pseudo-labeling stage replaces them unless
    gold labels are explicitly requested.
    """
    stats = TransliterationStats()
    samples = [
        LabeledComment(
            text=transliterate_text(sample.text, dataset.language, mapping, stats),
            label=sample.label,
            language=sample.language,
            origin=Origin.TRANSLITERATED,
        )
        for sample in dataset
    ]
    if stats.unmapped_chars:
        logger.warning(
            "%d Latin character(s) had no %s mapping and were kept as-is",
            stats.unmapped_chars,
            dataset.language.value,
        )
    logger.info(
        "Transliterated %d texts (%d Latin spans)", stats.texts, stats.latin_spans
    )
    return dataset.with_samples(samples), stats
