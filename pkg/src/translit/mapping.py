"""Grapheme mapping tables for Latin to native-script transliteration.

Tables are UTF-8 TSV files, one per language, shipped under ``src/data/translit``:

    <latin_key>\\t<native_value>\\t<position_class>

Lines starting with ``#`` are comments. Vowel keys are listed twice, once as
``independent_vowel`` and once as ``vowel_sign``; every other key appears once.
"""

import logging
from dataclasses import dataclass, field
from enum import StrEnum
from importlib import resources
from pathlib import Path

from src.corpus.labels import Language
from src.errors import ConfigError, IoError
from src.translit.scripts import SCRIPT_FOR_LANGUAGE, in_block

logger = logging.getLogger(__name__)


class PositionClass(StrEnum):
    """How an entry composes with its neighbours."""

    INDEPENDENT_VOWEL = "independent_vowel"
    CONSONANT = "consonant"
    VOWEL_SIGN = "vowel_sign"
    SPECIAL = "special"


# Script facts the tables do not carry: the virama, and the sign used for a word-final
# inherent vowel where the orthography lengthens it.
VIRAMA = {
    Language.KANNADA: "\u0ccd",
    Language.MALAYALAM: "\u0d4d",
    Language.TAMIL: "\u0bcd",
}
FINAL_INHERENT_SIGN = {
    Language.TAMIL: "\u0bbe",
}
INHERENT_VOWEL = "a"


@dataclass(frozen=True, slots=True)
class MappingEntry:
    """One table row.

    Attributes:
        latin_key: Lowercase ASCII letters
        native_value: Replacement text in the target script
        position_class: Composition role
    """

    latin_key: str
    native_value: str
    position_class: PositionClass


@dataclass(frozen=True)
class GraphemeMapping:
    """A validated, longest-key-first substitution table for one language.

    Attributes:
        language: Target language
        entries: Entries sorted by descending key length, then key, then class
        max_key_len: Length of the longest key
        virama: Sign that suppresses a consonant's inherent vowel
        final_inherent_sign: Sign for a word-final inherent vowel, if the script lengthens it
    """

    language: Language
    entries: tuple[MappingEntry, ...]
    max_key_len: int = 0
    virama: str = ""
    final_inherent_sign: str | None = None
    _by_class: dict[PositionClass, dict[str, str]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        entries = tuple(
            sorted(self.entries, key=lambda e: (-len(e.latin_key), e.latin_key, e.position_class))
        )
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "max_key_len", max((len(e.latin_key) for e in entries), default=0))
        if not self.virama:
            object.__setattr__(self, "virama", VIRAMA[self.language])
        if self.final_inherent_sign is None:
            object.__setattr__(self, "final_inherent_sign", FINAL_INHERENT_SIGN.get(self.language))
        by_class: dict[PositionClass, dict[str, str]] = {pc: {} for pc in PositionClass}
        for entry in entries:
            by_class[entry.position_class][entry.latin_key] = entry.native_value
        object.__setattr__(self, "_by_class", by_class)
        self._validate()

    def _validate(self) -> None:
        script = SCRIPT_FOR_LANGUAGE[self.language]
        seen: dict[tuple[str, PositionClass], None] = {}
        for entry in self.entries:
            key = entry.latin_key
            if not key or not key.isascii() or not key.isalpha() or key != key.lower():
                raise ConfigError(f"mapping key must be lowercase ASCII letters: {key!r}")
            if (key, entry.position_class) in seen:
                raise ConfigError(f"duplicate mapping key {key!r} ({entry.position_class.value})")
            seen[(key, entry.position_class)] = None
            bad = [ch for ch in entry.native_value if not in_block(ch, script)]
            if bad:
                raise ConfigError(
                    f"mapping value for {key!r} has characters outside the {script.value} block: "
                    + ", ".join(f"U+{ord(ch):04X}" for ch in bad)
                )
            if not entry.native_value and not (
                entry.position_class is PositionClass.VOWEL_SIGN and key == INHERENT_VOWEL
            ):
                raise ConfigError(f"empty mapping value for {key!r}")

        independent = set(self._by_class[PositionClass.INDEPENDENT_VOWEL])
        signs = set(self._by_class[PositionClass.VOWEL_SIGN])
        if independent != signs:
            raise ConfigError(
                "vowel keys must have both an independent and a sign form: "
                + ", ".join(sorted(independent ^ signs))
            )
        kinds = (independent, set(self.consonants), set(self.specials))
        for i, a in enumerate(kinds):
            for b in kinds[i + 1 :]:
                if a & b:
                    raise ConfigError(f"mapping keys used by two kinds: {sorted(a & b)}")

    @property
    def consonants(self) -> dict[str, str]:
        return self._by_class[PositionClass.CONSONANT]

    @property
    def independent_vowels(self) -> dict[str, str]:
        return self._by_class[PositionClass.INDEPENDENT_VOWEL]

    @property
    def vowel_signs(self) -> dict[str, str]:
        return self._by_class[PositionClass.VOWEL_SIGN]

    @property
    def specials(self) -> dict[str, str]:
        return self._by_class[PositionClass.SPECIAL]


def parse_mapping(text: str, language: Language, source: str = "<string>") -> GraphemeMapping:
    """Parse table text into a GraphemeMapping.

    Raises:
        ConfigError: On malformed rows or invalid entries
    """
    entries = []
    for number, line in enumerate(text.split("\n"), start=1):
        line = line.removesuffix("\r")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ConfigError(f"{source}:{number}: expected 3 tab-separated fields, got {len(fields)}")
        key, value, raw_class = fields
        try:
            position_class = PositionClass(raw_class.strip())
        except ValueError:
            raise ConfigError(f"{source}:{number}: unknown position class {raw_class!r}") from None
        entries.append(MappingEntry(key.strip(), value, position_class))
    return GraphemeMapping(language=language, entries=tuple(entries))


def default_table_path(language: Language) -> Path:
    """Location of the shipped table for a language."""
    return Path(str(resources.files("src") / "data" / "translit" / f"{language.value}.tsv"))


class MappingLoader:
    """Loads and caches grapheme mappings.

    Mappings are cached per (language, path) for the lifetime of the loader.
    """

    def __init__(self) -> None:
        self._cache: dict[tuple[Language, Path], GraphemeMapping] = {}

    def load(self, language: Language, path: Path | str | None = None) -> GraphemeMapping:
        """Load the table for a language, from ``path`` or the shipped default.

        Raises:
            IoError: If the file cannot be read
            ConfigError: If the table is invalid
        """
        table_path = Path(path) if path is not None else default_table_path(language)
        cache_key = (language, table_path.resolve())
        if cache_key in self._cache:
            return self._cache[cache_key]
        try:
            text = table_path.read_text(encoding="utf-8")
        except OSError as e:
            raise IoError(
                f"cannot read transliteration table {table_path}: {e}",
                detail="Pass --translit-table with a valid file",
            ) from e
        mapping = parse_mapping(text, language, source=str(table_path))
        logger.debug("Loaded %d mapping entries for %s from %s", len(mapping.entries), language.value, table_path)
        self._cache[cache_key] = mapping
        return mapping

    def clear_cache(self) -> None:
        """Clear all cached mappings."""
        self._cache.clear()


_default_loader: MappingLoader | None = None


def get_mapping_loader() -> MappingLoader:
    """Get the shared mapping loader instance."""
    global _default_loader
    if _default_loader is None:
        _default_loader = MappingLoader()
    return _default_loader


def load_mapping(language: Language, path: Path | str | None = None) -> GraphemeMapping:
    """Load a mapping through the shared loader."""
    return get_mapping_loader().load(language, path)
