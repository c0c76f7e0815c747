"""Core corpus types: labeled comments, datasets, and record parsing."""

import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from src.corpus.labels import Language, OffenseLabel, parse_label
from src.errors import (
    EmptyTextError,
    LabelSetError,
    LanguageMismatchError,
    UnlabeledSampleError,
)

logger = logging.getLogger(__name__)


class Origin(StrEnum):
    """Where a sample came from. Values double as the TSV origin column."""

    CODE_MIXED = "cm"
    TRANSLITERATED = "tra"


class Split(StrEnum):
    """Dataset split tag."""

    TRAIN = "train"
    DEV = "dev"
    TEST = "test"
    UNSPLIT = "unsplit"


@dataclass(frozen=True, slots=True)
class LabeledComment:
    """One text sample.

    Attributes:
        text: Comment text, non-empty after trimming
        label: Offense label, or None for unlabeled samples
        language: Corpus language
        origin: CODE_MIXED for original comments, TRANSLITERATED for converted ones
    """

    text: str
    label: OffenseLabel | None
    language: Language
    origin: Origin = Origin.CODE_MIXED

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise EmptyTextError("comment text is empty")

    def with_label(self, label: OffenseLabel | None) -> "LabeledComment":
        """Return a copy carrying a different label."""
        return LabeledComment(self.text, label, self.language, self.origin)


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable collection of comments in one language.

    Attributes:
        samples: Comments in insertion order
        language: Language shared by every sample
        split: Split tag
    """

    samples: tuple[LabeledComment, ...]
    language: Language
    split: Split = Split.UNSPLIT

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        for i, sample in enumerate(self.samples):
            if sample.language is not self.language:
                raise LanguageMismatchError(
                    f"sample {i} is {sample.language.value}, dataset is {self.language.value}"
                )

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[LabeledComment]:
        return iter(self.samples)

    def __getitem__(self, index: int) -> LabeledComment:
        return self.samples[index]

    def texts(self) -> list[str]:
        return [sample.text for sample in self.samples]

    def labels(self) -> list[OffenseLabel]:
        """Gold labels in sample order.

        Raises:
            UnlabeledSampleError: If any sample lacks a label
        """
        labels = []
        for i, sample in enumerate(self.samples):
            if sample.label is None:
                raise UnlabeledSampleError(f"sample {i} has no label")
            labels.append(sample.label)
        return labels

    @property
    def is_labeled(self) -> bool:
        return all(sample.label is not None for sample in self.samples)

    def with_samples(self, samples: Iterable[LabeledComment]) -> "Dataset":
        """Return a dataset with the same language and split but new samples."""
        return Dataset(tuple(samples), self.language, self.split)

    def filter_origin(self, origin: Origin) -> "Dataset":
        return self.with_samples(s for s in self.samples if s.origin is origin)

    def shuffled(self, rng: np.random.Generator) -> "Dataset":
        """Return a copy in the order of one permutation drawn from ``rng``."""
        order = rng.permutation(len(self.samples))
        return self.with_samples(self.samples[i] for i in order)


@dataclass
class LabelValidationResult:
    """Outcome of validate_labels.

    Attributes:
        is_valid: True when every present label is permitted
        violations: (sample index, label) pairs that are not permitted
    """

    is_valid: bool
    violations: list[tuple[int, OffenseLabel]] = field(default_factory=list)


def parse_tsv_record(line: str, language: Language, labeled: bool) -> LabeledComment:
    """Parse one corpus line.

    The label is the field after the LAST tab; the text is everything before it, so
    texts may themselves contain tabs.

    Args:
        line: Record without its line terminator
        language: Corpus language
        labeled: Whether the record carries a label field

    Returns:
        Parsed comment with origin CODE_MIXED

    Raises:
        LabelParseError: Unknown label string
        LabelSetError: Label not permitted for the language
        EmptyTextError: Empty text
    """
    line = line.rstrip("\r\n")
    if labeled:
        text, sep, raw_label = line.rpartition("\t")
        if not sep:
            raise EmptyTextError("labeled record has no tab-separated label field")
        label = parse_label(raw_label)
    else:
        text = line.rpartition("\t")[0] if "\t" in line else line
        label = None
    if label is not None and not language.permits(label):
        raise LabelSetError(
            f"label {label.code} is not permitted for {language.value}",
            detail=f"Permitted: {', '.join(lbl.code for lbl in language.labels)}",
        )
    return LabeledComment(text=text, label=label, language=language)


def serialize_record(sample: LabeledComment, with_origin: bool = False) -> str:
    """Serialize a comment to one TSV line (without terminator)."""
    fields = [sample.text]
    if sample.label is not None or with_origin or "\t" in sample.text:
        fields.append(sample.label.value if sample.label is not None else "")
    if with_origin:
        fields.append(sample.origin.value)
    return "\t".join(fields)


def class_distribution(dataset: Dataset) -> dict[OffenseLabel, int]:
    """Count samples per label over the language's label set.

    Raises:
        UnlabeledSampleError: If any sample is unlabeled
    """
    counts = dict.fromkeys(dataset.language.labels, 0)
    for label in dataset.labels():
        counts[label] = counts.get(label, 0) + 1
    return counts


def validate_labels(dataset: Dataset) -> LabelValidationResult:
    """Check that every present label is permitted for the dataset's language.

    Records parsed from files are checked on the way in; this catches datasets
    assembled in code, e.g. from model predictions.
    """
    violations = [
        (i, sample.label)
        for i, sample in enumerate(dataset.samples)
        if sample.label is not None and not dataset.language.permits(sample.label)
    ]
    if violations:
        logger.warning(
            "%d label(s) not permitted for %s", len(violations), dataset.language.value
        )
    return LabelValidationResult(is_valid=not violations, violations=violations)


def merge_datasets(a: Dataset, b: Dataset) -> Dataset:
    """Concatenate two datasets of the same language, a's samples first.

    The result keeps a's split tag when both agree and is UNSPLIT otherwise.

    Raises:
        LanguageMismatchError: If the languages differ
    """
    if a.language is not b.language:
        raise LanguageMismatchError(
            f"cannot merge {a.language.value} with {b.language.value}"
        )
    split = a.split if a.split is b.split else Split.UNSPLIT
    return Dataset(a.samples + b.samples, a.language, split)


def merge_all(datasets: Sequence[Dataset]) -> Dataset:
    """Left fold of merge_datasets over a non-empty sequence."""
    if not datasets:
        raise ValueError("merge_all needs at least one dataset")
    result = datasets[0]
    for other in datasets[1:]:
        result = merge_datasets(result, other)
    return result
