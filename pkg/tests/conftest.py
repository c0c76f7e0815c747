"""Shared fixtures: small synthetic corpora and tiny model settings."""

from pathlib import Path

import pytest

from src.corpus.dataset import Dataset, LabeledComment, Split
from src.corpus.labels import Language, OffenseLabel
from src.model.config import ModelConfig, TrainConfig

POSITIVE_WORDS = ("super", "chennagide", "olle", "nice", "song")
NEGATIVE_WORDS = ("waste", "kacheri", "bekku", "worst", "flop")


def separable_texts(count: int) -> list[tuple[str, OffenseLabel]]:
    """Alternating NO / OU comments whose vocabularies never overlap."""
    rows = []
    for i in range(count):
        words = POSITIVE_WORDS if i % 2 == 0 else NEGATIVE_WORDS
        label = OffenseLabel.NOT_OFFENSIVE if i % 2 == 0 else OffenseLabel.UNTARGETED
        text = " ".join(words[(i + k) % len(words)] for k in range(3))
        rows.append((text, label))
    return rows


def separable_dataset(count: int, split: Split = Split.TRAIN) -> Dataset:
    samples = tuple(
        LabeledComment(text, label, Language.KANNADA) for text, label in separable_texts(count)
    )
    return Dataset(samples, Language.KANNADA, split)


def write_corpus(path: Path, rows: list[tuple[str, OffenseLabel]], header: bool = True) -> Path:
    lines = ["text\tlabel"] if header else []
    lines += [f"{text}\t{label.value}" for text, label in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def tiny_model_config(**overrides: object) -> ModelConfig:
    values: dict[str, object] = {
        "d_model": 8,
        "num_heads": 2,
        "num_layers": 1,
        "d_ff": 16,
        "lstm_hidden": 4,
        "max_len": 8,
        "num_classes": Language.KANNADA.num_classes,
        "dropout": 0.0,
    }
    values.update(overrides)
    return ModelConfig(**values)


@pytest.fixture
def toy_corpus(tmp_path) -> dict[str, Path]:
    """Kannada train/dev/test TSV files of the separable two-class corpus."""
    return {
        "train": write_corpus(tmp_path / "kannada_train.tsv", separable_texts(50)),
        "dev": write_corpus(tmp_path / "kannada_dev.tsv", separable_texts(10)),
        "test": write_corpus(tmp_path / "kannada_test.tsv", separable_texts(20)),
    }


@pytest.fixture
def fast_train_config() -> TrainConfig:
    return TrainConfig(epochs=2, batch_size=8)
