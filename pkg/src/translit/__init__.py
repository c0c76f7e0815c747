"""Rule-based transliteration of romanized Dravidian text into native scripts."""

from src.translit.engine import (
    TransliterationStats,
    transliterate_dataset,
    transliterate_span,
    transliterate_text,
)
from src.translit.mapping import (
    GraphemeMapping,
    MappingEntry,
    MappingLoader,
    PositionClass,
    default_table_path,
    get_mapping_loader,
    load_mapping,
    parse_mapping,
)
from src.translit.scripts import Script, SpanSegment, detect_script, segment_spans

__all__ = [
    "GraphemeMapping",
    "MappingEntry",
    "MappingLoader",
    "PositionClass",
    "Script",
    "SpanSegment",
    "TransliterationStats",
    "default_table_path",
    "detect_script",
    "get_mapping_loader",
    "load_mapping",
    "parse_mapping",
    "segment_spans",
    "transliterate_dataset",
    "transliterate_span",
    "transliterate_text",
]
