"""Label taxonomy, languages, and raw label aliases.

Canonical label strings are the enum values. Raw strings found in the distributed
DravidianCodeMix files map onto them through a single frozen alias table; anything
outside the table is an error.
"""

from enum import StrEnum
from types import MappingProxyType

from src.errors import LabelParseError


class OffenseLabel(StrEnum):
    """Offense classes in canonical order (NO < OL < OTI < OTG < OTO < OU)."""

    NOT_OFFENSIVE = "Not_offensive"
    OTHER_LANGUAGE = "Other_language"
    TARGETED_INDIVIDUAL = "Offensive_Targeted_Insult_Individual"
    TARGETED_GROUP = "Offensive_Targeted_Insult_Group"
    TARGETED_OTHER = "Offensive_Targeted_Insult_Other"
    UNTARGETED = "Offensive_Untargeted"

    @property
    def index(self) -> int:
        """Position in the canonical ordering."""
        return _ORDER[self]

    @property
    def code(self) -> str:
        """Short code used in tables (NO, OL, ...)."""
        return _CODES[self]

    @property
    def display_name(self) -> str:
        """Row name used in classification reports."""
        return _DISPLAY_NAMES[self]

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, OffenseLabel):
            return NotImplemented
        return self.index < other.index

    def __le__(self, other: object) -> bool:
        if not isinstance(other, OffenseLabel):
            return NotImplemented
        return self.index <= other.index

    def __gt__(self, other: object) -> bool:
        if not isinstance(other, OffenseLabel):
            return NotImplemented
        return self.index > other.index

    def __ge__(self, other: object) -> bool:
        if not isinstance(other, OffenseLabel):
            return NotImplemented
        return self.index >= other.index


_ORDER = {label: i for i, label in enumerate(OffenseLabel)}

_CODES = {
    OffenseLabel.NOT_OFFENSIVE: "NO",
    OffenseLabel.OTHER_LANGUAGE: "OL",
    OffenseLabel.TARGETED_INDIVIDUAL: "OTI",
    OffenseLabel.TARGETED_GROUP: "OTG",
    OffenseLabel.TARGETED_OTHER: "OTO",
    OffenseLabel.UNTARGETED: "OU",
}

_DISPLAY_NAMES = {
    OffenseLabel.NOT_OFFENSIVE: "Not Offensive",
    OffenseLabel.OTHER_LANGUAGE: "Other Language",
    OffenseLabel.TARGETED_INDIVIDUAL: "Offensive Targeted Individual",
    OffenseLabel.TARGETED_GROUP: "Offensive Targeted Group",
    OffenseLabel.TARGETED_OTHER: "Offensive Targeted Others",
    OffenseLabel.UNTARGETED: "Offensive Untargeted",
}


class Language(StrEnum):
    """Corpus languages; each carries its permitted label set."""

    KANNADA = "kannada"
    MALAYALAM = "malayalam"
    TAMIL = "tamil"

    @property
    def labels(self) -> tuple[OffenseLabel, ...]:
        """Permitted labels in canonical order."""
        if self is Language.MALAYALAM:
            return tuple(label for label in OffenseLabel if label is not OffenseLabel.TARGETED_OTHER)
        return tuple(OffenseLabel)

    @property
    def num_classes(self) -> int:
        return len(self.labels)

    def permits(self, label: OffenseLabel) -> bool:
        """Check whether a label belongs to this language's label set."""
        return label in self.labels


# Raw strings enumerated from the distributed train/dev/test files, plus canonical
# strings and short codes.
LABEL_ALIASES: MappingProxyType[str, OffenseLabel] = MappingProxyType(
    {
        **{label.value: label for label in OffenseLabel},
        **{label.code: label for label in OffenseLabel},
        "Offensive_Untargetede": OffenseLabel.UNTARGETED,
        "not-Kannada": OffenseLabel.OTHER_LANGUAGE,
        "not-kannada": OffenseLabel.OTHER_LANGUAGE,
        "not-malayalam": OffenseLabel.OTHER_LANGUAGE,
        "not-Malayalam": OffenseLabel.OTHER_LANGUAGE,
        "not-Tamil": OffenseLabel.OTHER_LANGUAGE,
        "not-tamil": OffenseLabel.OTHER_LANGUAGE,
    }
)


def parse_label(raw: str) -> OffenseLabel:
    """Parse a raw label string through the alias table.

    Args:
        raw: Label field as it appears in a corpus file

    Returns:
        The canonical OffenseLabel

    Raises:
        LabelParseError: If the string is not a registered alias
    """
    try:
        return LABEL_ALIASES[raw.strip()]
    except KeyError:
        raise LabelParseError(
            f"unknown label string: {raw!r}",
            detail="Register new raw spellings in LABEL_ALIASES",
        ) from None
