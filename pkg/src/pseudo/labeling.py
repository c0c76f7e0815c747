"""Pseudo-labeling of the transliterated training split and CM-TRA assembly.

A trained classifier labels the transliterated copy of the training data with its
argmax predictions; the labeled copy is then merged with the gold code-mixed
training data and shuffled once to form CM-TRA. The test split never reaches this
module.
"""

import logging
from collections.abc import Sequence
from typing import Literal, Protocol

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.corpus.dataset import Dataset, Origin, Split, merge_datasets
from src.corpus.labels import Language
from src.errors import ConfigError, LanguageMismatchError, OriginError, ShapeError, SplitLeakError
from src.utils.seeding import substream

logger = logging.getLogger(__name__)


class ProbabilisticClassifier(Protocol):
    """Anything that scores texts over its language's label set."""

    language: Language | None

    def predict_proba(self, texts: Sequence[str]) -> np.ndarray: ...


class PseudoLabelConfig(BaseModel):
    """Pseudo-labeling options."""

    threshold: float | None = Field(
        default=None,
        ge=0.0,
        le=1.0,
        description="Drop samples whose top probability is below this (default: keep all)",
    )
    labeler: Literal["shared", "separate"] = Field(
        default="shared",
        description=(
            "shared: the CM-trained model labels and then continues training on CM-TRA; "
            "separate: a dedicated labeler, and a fresh model trained on CM-TRA"
        ),
    )
    use_gold_labels: bool = Field(
        default=False,
        description="tra variant only: keep the gold labels carried over by transliteration",
    )


class PseudoLabelRun(BaseModel):
    """Record of one pseudo-labeling pass."""

    source_model: str = Field(..., description="Identifier of the labeling model")
    language: Language
    threshold: float | None = Field(default=None, description="Confidence threshold, if any")
    input_size: int = Field(..., ge=0)
    labeled: int = Field(..., ge=0)
    skipped_below_threshold: int = Field(default=0, ge=0)
    histogram: dict[str, int] = Field(
        default_factory=dict, description="Pseudo-label counts by label code"
    )

    @model_validator(mode="after")
    def _check_counts(self) -> "PseudoLabelRun":
        if self.labeled + self.skipped_below_threshold != self.input_size:
            raise ValueError("labeled + skipped must equal the input size")
        if sum(self.histogram.values()) != self.labeled:
            raise ValueError("histogram must sum to the labeled count")
        return self


def _check_not_test(dataset: Dataset, what: str) -> None:
    if dataset.split is Split.TEST:
        raise SplitLeakError(
            f"the test split cannot be used as {what}",
            detail="Only the transliterated training split is pseudo-labeled",
        )


def _check_origin(dataset: Dataset, origin: Origin, what: str) -> None:
    for i, sample in enumerate(dataset):
        if sample.origin is not origin:
            raise OriginError(f"{what} sample {i} has origin {sample.origin.value}, expected {origin.value}")


def generate_pseudo_labels(
    model: ProbabilisticClassifier,
    transliterated: Dataset,
    threshold: float | None = None,
    source_model: str = "classifier",
) -> tuple[Dataset, PseudoLabelRun]:
    """Label transliterated samples with the model's argmax predictions.

    Args:
        model: Labeler; its language must match the dataset's
        transliterated: TRANSLITERATED-origin samples (never the test split)
        threshold: Optional minimum top probability; samples below it are dropped
        source_model: Identifier recorded in the run

    Returns:
        (labeled samples in input order, run record)

    Raises:
        LanguageMismatchError: If model and dataset languages differ
        SplitLeakError: If the dataset is tagged as the test split
        OriginError: If a sample is not TRANSLITERATED
    """
    _check_not_test(transliterated, "pseudo-labeling input")
    language = transliterated.language
    if model.language is None:
        raise ConfigError("the labeling model has no language, so it cannot emit labels")
    if model.language is not language:
        raise LanguageMismatchError(
            f"{model.language.value} model cannot label {language.value} data"
        )
    _check_origin(transliterated, Origin.TRANSLITERATED, "pseudo-labeling")
    if threshold is not None and not 0.0 <= threshold <= 1.0:
        raise ConfigError(f"threshold must be in [0, 1], got {threshold}")

    labels = language.labels
    histogram = dict.fromkeys((label.code for label in labels), 0)
    if len(transliterated) == 0:
        run = PseudoLabelRun(
            source_model=source_model,
            language=language,
            threshold=threshold,
            input_size=0,
            labeled=0,
            histogram=histogram,
        )
        return transliterated, run

    probs = np.asarray(model.predict_proba(transliterated.texts()))
    if probs.shape != (len(transliterated), len(labels)):
        raise ShapeError(
            f"labeler returned shape {probs.shape}, expected ({len(transliterated)}, {len(labels)})"
        )
    predicted = np.argmax(probs, axis=1)
    confidence = probs.max(axis=1)

    samples = []
    skipped = 0
    for sample, index, top in zip(transliterated, predicted, confidence, strict=True):
        if threshold is not None and top < threshold:
            skipped += 1
            continue
        label = labels[int(index)]
        histogram[label.code] += 1
        samples.append(sample.with_label(label))

    run = PseudoLabelRun(
        source_model=source_model,
        language=language,
        threshold=threshold,
        input_size=len(transliterated),
        labeled=len(samples),
        skipped_below_threshold=skipped,
        histogram=histogram,
    )
    if skipped:
        logger.info("Dropped %d of %d samples below threshold %s", skipped, len(transliterated), threshold)
    logger.info("Pseudo-labeled %d %s samples", run.labeled, language.value)
    return transliterated.with_samples(samples), run


def build_cm_tra(cm_train: Dataset, pseudo_labeled: Dataset, seed: int) -> Dataset:
    """Merge gold code-mixed and pseudo-labeled transliterated data, then shuffle once.

    The shuffle draws from the ``cmtra/shuffle`` substream of ``seed``. Origin tags are
    kept, so the code-mixed half can be recovered with ``filter_origin``.

    Raises:
        LanguageMismatchError: If the languages differ
        UnlabeledSampleError: If any sample lacks a label
        OriginError: If either input carries the wrong origin
        SplitLeakError: If either input is the test split
    """
    _check_not_test(cm_train, "CM-TRA input")
    _check_not_test(pseudo_labeled, "CM-TRA input")
    cm_train.labels()
    pseudo_labeled.labels()
    _check_origin(cm_train, Origin.CODE_MIXED, "code-mixed")
    _check_origin(pseudo_labeled, Origin.TRANSLITERATED, "transliterated")
    merged = merge_datasets(cm_train, pseudo_labeled)
    shuffled = merged.shuffled(substream(seed, "cmtra", "shuffle"))
    logger.info(
        "Built CM-TRA: %d code-mixed + %d transliterated samples", len(cm_train), len(pseudo_labeled)
    )
    return Dataset(shuffled.samples, merged.language, Split.TRAIN)
