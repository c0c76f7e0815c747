"""Published corpus statistics and dataset descriptions.

The DravidianCodeMix offensive-language release documents split sizes and per-class
counts. Loaded files are compared against those figures and every discrepancy is
logged; nothing is reconciled.
"""

import logging
from dataclasses import dataclass, field

from src.corpus.dataset import Dataset, Split, class_distribution
from src.corpus.labels import Language, OffenseLabel

logger = logging.getLogger(__name__)

NO = OffenseLabel.NOT_OFFENSIVE
OL = OffenseLabel.OTHER_LANGUAGE
OTI = OffenseLabel.TARGETED_INDIVIDUAL
OTG = OffenseLabel.TARGETED_GROUP
OTO = OffenseLabel.TARGETED_OTHER
OU = OffenseLabel.UNTARGETED

PUBLISHED_SPLIT_SIZES: dict[Language, dict[Split, int]] = {
    Language.KANNADA: {Split.TRAIN: 6_217, Split.DEV: 777, Split.TEST: 778},
    Language.MALAYALAM: {Split.TRAIN: 16_010, Split.DEV: 1_999, Split.TEST: 2_001},
    Language.TAMIL: {Split.TRAIN: 35_129, Split.DEV: 4_388, Split.TEST: 4_392},
}

PUBLISHED_CLASS_COUNTS: dict[Language, dict[Split, dict[OffenseLabel, int]]] = {
    Language.KANNADA: {
        Split.TRAIN: {NO: 3_544, OL: 1_522, OTI: 487, OTG: 329, OTO: 123, OU: 212},
        Split.TEST: {NO: 417, OL: 185, OTI: 75, OTG: 44, OTO: 14, OU: 33},
    },
    Language.MALAYALAM: {
        Split.TRAIN: {NO: 14_153, OL: 1_287, OTI: 239, OTG: 140, OU: 191},
        Split.TEST: {NO: 1_765, OL: 157, OTI: 27, OTG: 23, OU: 29},
    },
    Language.TAMIL: {
        Split.TRAIN: {NO: 25_415, OL: 1_454, OTI: 2_343, OTG: 2_557, OTO: 454, OU: 2_906},
        Split.TEST: {NO: 3_190, OL: 165, OTI: 315, OTG: 288, OTO: 71, OU: 368},
    },
}


@dataclass
class Discrepancy:
    """A difference between a loaded dataset and a published figure.

    Attributes:
        quantity: What was compared ("size", "class total", or a label code)
        expected: Published value
        actual: Value found in the file
    """

    quantity: str
    expected: int
    actual: int

    def __str__(self) -> str:
        return f"{self.quantity}: published {self.expected}, found {self.actual}"


@dataclass
class DatasetSummary:
    """Size and class make-up of a dataset.

    Attributes:
        language: Dataset language
        split: Split tag
        size: Number of samples
        distribution: Per-label counts (empty for unlabeled data)
        discrepancies: Differences from the published figures
    """

    language: Language
    split: Split
    size: int
    distribution: dict[OffenseLabel, int] = field(default_factory=dict)
    discrepancies: list[Discrepancy] = field(default_factory=list)

    def shares(self) -> dict[OffenseLabel, float]:
        """Fraction of samples per label."""
        if not self.size:
            return dict.fromkeys(self.distribution, 0.0)
        return {label: count / self.size for label, count in self.distribution.items()}


def compare_with_published(dataset: Dataset) -> list[Discrepancy]:
    """Compare size and class counts with the published tables.

    Both the published split size and the published class total are checked, so the
    Kannada test split (778 listed, 768 counted by class) always yields one warning.
    Splits without published figures return no discrepancies.
    """
    language, split = dataset.language, dataset.split
    discrepancies = []
    expected_size = PUBLISHED_SPLIT_SIZES[language].get(split)
    if expected_size is not None and expected_size != len(dataset):
        discrepancies.append(Discrepancy("size", expected_size, len(dataset)))

    expected_counts = PUBLISHED_CLASS_COUNTS[language].get(split)
    if expected_counts is not None:
        class_total = sum(expected_counts.values())
        if class_total != len(dataset):
            discrepancies.append(Discrepancy("class total", class_total, len(dataset)))
        if dataset.is_labeled:
            actual = class_distribution(dataset)
            for label, expected in expected_counts.items():
                if actual.get(label, 0) != expected:
                    discrepancies.append(Discrepancy(label.code, expected, actual.get(label, 0)))

    for discrepancy in discrepancies:
        logger.warning("%s %s split differs from published figures: %s", language.value, split.value, discrepancy)
    return discrepancies


def describe(dataset: Dataset, check_published: bool = False) -> DatasetSummary:
    """Summarize a dataset, optionally comparing it with the published figures."""
    summary = DatasetSummary(language=dataset.language, split=dataset.split, size=len(dataset))
    if dataset.is_labeled:
        summary.distribution = class_distribution(dataset)
    if check_published:
        summary.discrepancies = compare_with_published(dataset)
    return summary
