"""Corpus types, TSV loading, and dataset statistics."""

from src.corpus.dataset import (
    Dataset,
    LabeledComment,
    LabelValidationResult,
    Origin,
    Split,
    class_distribution,
    merge_datasets,
    parse_tsv_record,
    serialize_record,
    validate_labels,
)
from src.corpus.io import load_split, read_tagged, serialize_dataset, write_dataset
from src.corpus.labels import LABEL_ALIASES, Language, OffenseLabel, parse_label
from src.corpus.stats import compare_with_published, describe

__all__ = [
    "LABEL_ALIASES",
    "Dataset",
    "LabelValidationResult",
    "LabeledComment",
    "Language",
    "OffenseLabel",
    "Origin",
    "Split",
    "class_distribution",
    "compare_with_published",
    "describe",
    "load_split",
    "merge_datasets",
    "parse_label",
    "parse_tsv_record",
    "read_tagged",
    "serialize_dataset",
    "serialize_record",
    "validate_labels",
    "write_dataset",
]
